#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <utility>
#include <vector>

#include "inlapf/inla.hpp"
#include "inlapf/kalman.hpp"
#include "inlapf/model.hpp"
#include "inlapf/quadrature.hpp"
#include "inlapf/tridiag.hpp"

using namespace inlapf;

namespace {

// Dense oracle for the linear-Gaussian posterior of x | y.
struct DensePosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd prec;

    DensePosterior(const Dataset& data, const HyperParams& theta, double s) {
        const auto T = static_cast<Eigen::Index>(data.T);
        const Eigen::MatrixXd Qd = to_dense(ar1_prior_precision(data.T, theta));
        prec = Qd + Eigen::MatrixXd::Identity(T, T) / (s * s);
        cov = prec.inverse();
        Eigen::VectorXd rhs(T);
        for (Eigen::Index i = 0; i < T; ++i)
            rhs(i) = (data.y[static_cast<std::size_t>(i)] - theta.alpha) / (s * s);
        mean = cov * rhs;
    }
};

// Dense Newton ascent for the Poisson latent mode, written independently of
// the library (Eigen linear solves, explicit score/curvature formulas).
Eigen::VectorXd dense_poisson_mode(const Dataset& data, const HyperParams& theta) {
    const auto T = static_cast<Eigen::Index>(data.T);
    const Eigen::MatrixXd Qd = to_dense(ar1_prior_precision(data.T, theta));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(T);
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd score(T);
        Eigen::MatrixXd H = Qd;
        for (Eigen::Index t = 0; t < T; ++t) {
            const double rate = std::exp(x(t) + theta.alpha);
            score(t) = data.y[static_cast<std::size_t>(t)] - rate;
            H(t, t) += rate;
        }
        const Eigen::VectorXd grad = -Qd * x + score;
        if (grad.lpNorm<Eigen::Infinity>() < 1e-13) break;
        x += H.llt().solve(grad);
    }
    return x;
}

ThetaGrid single_point_grid(const HyperParams& theta) {
    ThetaGrid grid;
    ThetaPoint pt;
    pt.theta = theta;
    pt.z = to_internal(theta);
    pt.k = {0, 0, 0};
    pt.log_post = 0.0;
    pt.weight = 1.0;
    grid.points.push_back(pt);
    grid.mode = theta;
    grid.mode_z = pt.z;
    grid.neg_hess = Eigen::Matrix3d::Identity();
    grid.z_basis = Eigen::Matrix3d::Identity();
    return grid;
}

// Linear-Gaussian wrapper with a constant added to every observation term.
class ShiftedLg final : public SsmModel {
public:
    ShiftedLg(double obs_noise, double shift) : base_(obs_noise), shift_(shift) {}
    std::string name() const override { return base_.name(); }
    double log_observation(double y, double x, const HyperParams& th) const override {
        return base_.log_observation(y, x, th) + shift_;
    }
    double sample_observation(double x, const HyperParams& th, Rng& rng) const override {
        return base_.sample_observation(x, th, rng);
    }
    double obs_score(double y, double x, const HyperParams& th) const override {
        return base_.obs_score(y, x, th);
    }
    double obs_neg_curvature(double y, double x, const HyperParams& th) const override {
        return base_.obs_neg_curvature(y, x, th);
    }

private:
    LinearGaussianSsm base_;
    double shift_;
};

} // namespace

TEST_CASE("gaussian_approx is exact for a Gaussian likelihood") {
    const double s = 0.4;
    const LinearGaussianSsm model(s);
    const HyperParams theta{0.8, 0.6, 0.5};
    const Dataset data = simulate(model, 30, theta, 1001);
    const GaussianChain chain = gaussian_approx(model, data, theta);
    const DensePosterior oracle(data, theta, s);
    for (std::size_t t = 0; t < data.T; ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        CHECK(chain.mean[t] == doctest::Approx(oracle.mean(i)).epsilon(1e-10));
        CHECK(chain.prec.diag[t] == doctest::Approx(oracle.prec(i, i)).epsilon(1e-12));
        if (t + 1 < data.T)
            CHECK(chain.prec.offdiag[t] == doctest::Approx(oracle.prec(i, i + 1)).epsilon(1e-12));
        CHECK(chain.pinv.var[t] == doctest::Approx(oracle.cov(i, i)).epsilon(1e-10));
    }
    // quadratic objective: one Newton step reaches the mode
    CHECK(chain.newton_iters <= 2);
}

TEST_CASE("single Poisson observation: mode solves x + e^x = y-free fixed point") {
    // y = 0, alpha = 0, rho = 0, sigma = 1: maximize -x^2/2 - e^x, so the
    // mode solves x + e^x = 0.  Bisection oracle:
    double lo = -1.0, hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((mid + std::exp(mid) < 0.0) ? lo : hi) = mid;
    }
    const double mode = 0.5 * (lo + hi);

    const PoissonSsm model;
    Dataset data;
    data.T = 1;
    data.y = {0.0};
    const HyperParams theta{0.0, 1.0, 0.0};
    const GaussianChain chain = gaussian_approx(model, data, theta);
    CHECK(chain.mean[0] == doctest::Approx(mode).epsilon(1e-10));
    CHECK(chain.prec.diag[0] == doctest::Approx(1.0 + std::exp(mode)).epsilon(1e-10));
}

TEST_CASE("Poisson T=20 mode matches an independent dense Newton solver") {
    const PoissonSsm model;
    const HyperParams theta{0.7, 0.5, 1.0};
    const Dataset data = simulate(model, 20, theta, 77);
    const GaussianChain chain = gaussian_approx(model, data, theta);
    const Eigen::VectorXd oracle = dense_poisson_mode(data, theta);
    for (std::size_t t = 0; t < 20; ++t) {
        CHECK(chain.mean[t] ==
              doctest::Approx(oracle(static_cast<Eigen::Index>(t))).epsilon(1e-8));
        const double rate = std::exp(oracle(static_cast<Eigen::Index>(t)) + theta.alpha);
        CHECK(chain.prec.diag[t] ==
              doctest::Approx(ar1_prior_precision(20, theta).diag[t] + rate).epsilon(1e-7));
    }
}

TEST_CASE("theta posterior is exact on the linear-Gaussian model") {
    const double s = 0.5;
    const LinearGaussianSsm model(s);
    const PriorSpec prior;
    const Dataset data = simulate(model, 25, HyperParams{0.6, 0.7, 0.2}, 555);

    for (const HyperParams& theta :
         {HyperParams{0.6, 0.7, 0.2}, HyperParams{0.3, 1.1, -0.4}, HyperParams{0.85, 0.4, 0.9}}) {
        const double got = log_theta_posterior(model, data, theta, prior);
        const double expected =
            kalman_loglik(data, theta, s) + log_prior_internal(to_internal(theta), prior);
        CHECK(got == doctest::Approx(expected).epsilon(1e-8));
    }

    SUBCASE("per-observation constants pass through") {
        const ShiftedLg shifted(s, 0.37);
        const HyperParams theta{0.5, 0.8, 0.0};
        const double base = log_theta_posterior(model, data, theta, prior);
        const double moved = log_theta_posterior(shifted, data, theta, prior);
        CHECK(moved - base == doctest::Approx(25.0 * 0.37).epsilon(1e-9));
    }
    SUBCASE("hands back the underlying Gaussian approximation") {
        GaussianChain chain;
        const HyperParams theta{0.6, 0.7, 0.2};
        log_theta_posterior(model, data, to_internal(theta), prior, {}, &chain);
        const GaussianChain direct = gaussian_approx(model, data, theta);
        for (std::size_t t = 0; t < data.T; ++t)
            CHECK(chain.mean[t] == doctest::Approx(direct.mean[t]).epsilon(1e-12));
    }
}

TEST_CASE("theta posterior matches brute-force quadrature on a tiny Poisson chain") {
    const PoissonSsm model;
    const HyperParams truth{0.6, 0.5, 2.0};
    const PriorSpec prior;
    const Dataset data = simulate(model, 3, truth, 4242);

    // a handful of theta values near the truth
    std::vector<HyperParams> thetas{
        {0.5, 0.45, 1.9}, {0.6, 0.5, 2.0}, {0.7, 0.55, 2.1}, {0.55, 0.6, 2.05}, {0.65, 0.4, 1.95}};
    std::vector<double> approx, exact;
    for (const auto& th : thetas) {
        approx.push_back(log_theta_posterior(model, data, th, prior));
        const ChainQuadrature quad(model, data, th, 96, 10.0);
        exact.push_back(quad.log_marginal_lik() + log_prior_internal(to_internal(th), prior));
    }
    // normalize both over the same set (log-sum-exp) and compare pointwise
    auto lse = [](const std::vector<double>& v) {
        double mx = v[0];
        for (double x : v) mx = std::max(mx, x);
        double s = 0.0;
        for (double x : v) s += std::exp(x - mx);
        return mx + std::log(s);
    };
    const double za = lse(approx), ze = lse(exact);
    for (std::size_t i = 0; i < thetas.size(); ++i)
        CHECK(approx[i] - za == doctest::Approx(exact[i] - ze).epsilon(1e-3));
}

TEST_CASE("exploration of a synthetic quadratic posterior") {
    const Eigen::Vector3d m(0.5, -1.0, 2.0);
    Eigen::Matrix3d A;
    A << 2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0;
    const auto log_post = [&](const InternalParams& z) {
        const Eigen::Vector3d d(z[0] - m(0), z[1] - m(1), z[2] - m(2));
        return -0.5 * d.dot(A * d);
    };
    // For an exactly quadratic objective the standardized lattice drops are
    // exactly |k|^2 dz^2/2, so the default drop threshold 2.5 ties with the
    // |k|^2 = 5 shell; nudge it off the tie so keep/drop is well determined.
    InlaConfig config;
    config.dz_drop = 2.7;
    const ThetaGrid grid = explore_theta_fn(log_post, {0.0, 0.0, 0.0}, config);

    for (int j = 0; j < 3; ++j) CHECK(grid.mode_z[static_cast<std::size_t>(j)] ==
                                      doctest::Approx(m(j)).epsilon(1e-6));
    CHECK(grid.hessian_pd);
    CHECK_FALSE(grid.truncated);
    CHECK(grid.points.size() > 5);
    CHECK(grid.points.size() < 500);

    double wsum = 0.0;
    Eigen::Vector3d wmean = Eigen::Vector3d::Zero();
    for (const auto& pt : grid.points) {
        wsum += pt.weight;
        wmean += pt.weight * Eigen::Vector3d(pt.z[0], pt.z[1], pt.z[2]);
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    // symmetric lattice + symmetric weights: weighted mean = mode exactly
    for (int j = 0; j < 3; ++j) CHECK(wmean(j) == doctest::Approx(m(j)).epsilon(1e-6));

    SUBCASE("estimated curvature matches the true Hessian") {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(grid.neg_hess(r, c) == doctest::Approx(A(r, c)).epsilon(1e-4));
    }
    SUBCASE("adding a constant changes nothing but the stored values") {
        const auto shifted = [&](const InternalParams& z) { return log_post(z) + 7.3; };
        const ThetaGrid g2 = explore_theta_fn(shifted, {0.0, 0.0, 0.0}, config);
        REQUIRE(g2.points.size() == grid.points.size());
        CHECK(g2.log_post_mode == doctest::Approx(grid.log_post_mode + 7.3).epsilon(1e-9));
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(g2.mode_z[j] == doctest::Approx(grid.mode_z[j]).epsilon(1e-8));
        // The eigenbasis sign is arbitrary, so the lattice may be enumerated
        // in mirrored order; compare the point sets after sorting.
        auto sorted = [](const ThetaGrid& g) {
            std::vector<std::pair<std::array<double, 3>, double>> v;
            for (const auto& pt : g.points) v.push_back({pt.z, pt.weight});
            std::sort(v.begin(), v.end());
            return v;
        };
        const auto s1 = sorted(grid), s2 = sorted(g2);
        for (std::size_t i = 0; i < s1.size(); ++i) {
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(s2[i].first[j] == doctest::Approx(s1[i].first[j]).epsilon(1e-6));
            CHECK(s2[i].second == doctest::Approx(s1[i].second).epsilon(1e-6));
        }
        // the normalized marginal outputs are what the interface promises
        for (std::size_t j = 0; j < 3; ++j) {
            const Marginal1D a = hyper_marginal_internal(grid, j, config);
            const Marginal1D b = hyper_marginal_internal(g2, j, config);
            REQUIRE(a.grid.size() == b.grid.size());
            for (std::size_t i = 0; i < a.grid.size(); ++i) {
                CHECK(b.grid[i] == doctest::Approx(a.grid[i]).epsilon(1e-8));
                CHECK(b.density(i) == doctest::Approx(a.density(i)).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("exploration on a simulated dataset recovers plausible parameters") {
    const PoissonSsm model;
    const HyperParams truth{0.7, 0.5, 1.0};
    const Dataset data = simulate(model, 100, truth, 20250817);
    PriorSpec prior;
    prior.s_rho = 1.0; // wide enough to let the data place the mode
    const ThetaGrid grid = explore_theta(model, data, prior);
    CHECK(std::abs(grid.mode.rho - truth.rho) < 0.25);
    CHECK(std::abs(grid.mode.sigma - truth.sigma) < 0.3);
    CHECK(std::abs(grid.mode.alpha - truth.alpha) < 0.5);
    // grid stays at "dozens of points" scale
    CHECK(grid.points.size() >= 10);
    CHECK(grid.points.size() <= 500);
    CHECK(grid.hessian_pd);
}

TEST_CASE("hyperparameter marginals of a separable synthetic posterior") {
    // log f(z) = sum_j [-(z_j-c_j)^2/(2 s_j^2) - b_j (z_j-c_j)^4]: separable,
    // smooth, slightly non-Gaussian; the marginal along each axis is exactly
    // the normalized per-axis factor.
    const std::array<double, 3> c{0.4, -0.3, 1.1};
    const std::array<double, 3> s{0.6, 1.0, 0.8};
    const std::array<double, 3> b{0.05, 0.02, 0.04};
    const auto log_post = [&](const InternalParams& z) {
        double lp = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            const double d = z[j] - c[j];
            lp += -0.5 * d * d / (s[j] * s[j]) - b[j] * d * d * d * d;
        }
        return lp;
    };
    InlaConfig config;
    config.dz = 0.5;
    config.dz_drop = 9.0;
    config.grid_max_points = 20000;
    const ThetaGrid grid = explore_theta_fn(log_post, {0.0, 0.0, 0.0}, config);

    for (std::size_t j = 0; j < 3; ++j) {
        const Marginal1D marg = hyper_marginal_internal(grid, j, config);
        // oracle: the factor evaluated on the same grid, normalized the same way
        std::vector<double> logf(marg.grid.size());
        for (std::size_t i = 0; i < marg.grid.size(); ++i) {
            const double d = marg.grid[i] - c[j];
            logf[i] = -0.5 * d * d / (s[j] * s[j]) - b[j] * d * d * d * d;
        }
        normalize_log_density(marg.grid, logf);
        double sup = 0.0;
        for (std::size_t i = 0; i < marg.grid.size(); ++i)
            sup = std::max(sup, std::abs(marg.density(i) - std::exp(logf[i])));
        CHECK(sup < 1e-3);
        // argmax sits at the factor's center within lattice resolution
        CHECK(std::abs(marg.argmax() - c[j]) < config.dz);
        // a proper density: integrates to one
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < marg.grid.size(); ++i)
            mass += 0.5 * (marg.density(i) + marg.density(i + 1)) *
                    (marg.grid[i + 1] - marg.grid[i]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("natural-scale marginal carries the change-of-variables Jacobian") {
    // Separable Gaussian in z; the alpha axis is identity, so its natural
    // marginal equals the internal one; the sigma axis must satisfy the
    // change of variables against a quadrature oracle.
    const auto log_post = [](const InternalParams& z) {
        return -0.5 * (z[0] * z[0] / 0.25 + (z[1] - 0.8) * (z[1] - 0.8) / 0.36 +
                       (z[2] - 1.0) * (z[2] - 1.0) / 0.49);
    };
    InlaConfig config;
    config.dz = 0.5;
    config.dz_drop = 9.0;
    config.grid_max_points = 20000;
    const ThetaGrid grid = explore_theta_fn(log_post, {0.0, 0.5, 0.5}, config);

    SUBCASE("alpha: identity transform") {
        const Marginal1D internal = hyper_marginal_internal(grid, 2, config);
        const Marginal1D natural = hyper_marginal(grid, 2, config);
        REQUIRE(internal.grid.size() == natural.grid.size());
        for (std::size_t i = 0; i < internal.grid.size(); ++i) {
            CHECK(natural.grid[i] == doctest::Approx(internal.grid[i]).epsilon(1e-12));
            CHECK(natural.density(i) == doctest::Approx(internal.density(i)).epsilon(1e-9));
        }
    }
    SUBCASE("sigma: density of exp(-z/2) under a Gaussian z") {
        const Marginal1D natural = hyper_marginal(grid, 1, config);
        // oracle: sigma = e^{-z/2}, z ~ N(0.8, 0.6^2) =>
        // p(sigma) = N(-2 log sigma; 0.8, 0.6^2) * 2/sigma
        for (std::size_t i = 2; i + 2 < natural.grid.size(); i += 7) {
            const double sig = natural.grid[i];
            const double z = -2.0 * std::log(sig);
            const double oracle = std::exp(normal_logpdf(z, 0.8, 0.6)) * 2.0 / sig;
            CHECK(natural.density(i) == doctest::Approx(oracle).epsilon(5e-3));
        }
        // ascending grid on the natural scale
        for (std::size_t i = 0; i + 1 < natural.grid.size(); ++i)
            CHECK(natural.grid[i] < natural.grid[i + 1]);
    }
    SUBCASE("rho: density of tanh(z/2) under a Gaussian z") {
        const Marginal1D natural = hyper_marginal(grid, 0, config);
        for (std::size_t i = 2; i + 2 < natural.grid.size(); i += 7) {
            const double r = natural.grid[i];
            const double z = rho_to_rhotilde(r);
            const double oracle =
                std::exp(normal_logpdf(z, 0.0, 0.5)) * 2.0 / (1.0 - r * r);
            CHECK(natural.density(i) == doctest::Approx(oracle).epsilon(5e-3));
        }
    }
}

TEST_CASE("single-point grids give spike marginals") {
    const ThetaGrid grid = single_point_grid(HyperParams{0.5, 0.7, 1.2});
    const Marginal1D m = hyper_marginal_internal(grid, 2, {});
    CHECK(m.argmax() == doctest::Approx(1.2).epsilon(1e-9));
    CHECK_THROWS_AS(hyper_marginal_internal(grid, 3, {}), IndexOutOfRange);
    ThetaGrid empty;
    CHECK_THROWS_AS(hyper_marginal_internal(empty, 0, {}), EmptyChain);
}

TEST_CASE("latent marginals: Gaussian mixture against the dense oracle") {
    const double s = 0.5;
    const LinearGaussianSsm model(s);
    const HyperParams theta{0.7, 0.8, 0.3};
    const Dataset data = simulate(model, 12, theta, 31);
    const ThetaGrid grid = single_point_grid(theta);
    const auto chains = chains_for_grid(model, data, grid);
    REQUIRE(chains.size() == 1);
    const DensePosterior oracle(data, theta, s);

    for (std::size_t i : {std::size_t{0}, std::size_t{5}, std::size_t{11}}) {
        const Marginal1D m = latent_marginal_gaussian(grid, chains, i);
        const auto ei = static_cast<Eigen::Index>(i);
        const double om = oracle.mean(ei);
        const double osd = std::sqrt(oracle.cov(ei, ei));
        CHECK(m.mean() == doctest::Approx(om).epsilon(1e-6));
        CHECK(m.sd() == doctest::Approx(osd).epsilon(1e-4));
        for (double x : {om - osd, om, om + 1.3 * osd})
            CHECK(m.interp_density(x) ==
                  doctest::Approx(std::exp(normal_logpdf(x, om, osd))).epsilon(1e-3));
        // integrates to one; vanishes outside the grid
        double mass = 0.0;
        for (std::size_t g = 0; g + 1 < m.grid.size(); ++g)
            mass += 0.5 * (m.density(g) + m.density(g + 1)) * (m.grid[g + 1] - m.grid[g]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(m.interp_density(m.grid.front() - 1.0) == 0.0);
        CHECK(m.interp_density(m.grid.back() + 1.0) == 0.0);
    }

    SUBCASE("duplicated equal-weight point changes nothing") {
        ThetaGrid dup = grid;
        dup.points.push_back(dup.points[0]);
        dup.points[0].weight = 0.5;
        dup.points[1].weight = 0.5;
        const auto chains2 = chains_for_grid(model, data, dup);
        const Marginal1D a = latent_marginal_gaussian(grid, chains, 4);
        const Marginal1D b = latent_marginal_gaussian(dup, chains2, 4);
        REQUIRE(a.grid.size() == b.grid.size());
        for (std::size_t g = 0; g < a.grid.size(); ++g) {
            CHECK(a.grid[g] == doctest::Approx(b.grid[g]).epsilon(1e-12));
            CHECK(a.density(g) == doctest::Approx(b.density(g)).epsilon(1e-12));
        }
    }
    SUBCASE("index guard") {
        CHECK_THROWS_AS(latent_marginal_gaussian(grid, chains, 12), IndexOutOfRange);
    }
}

TEST_CASE("nested latent marginal collapses to the Gaussian one on a Gaussian model") {
    const double s = 0.6;
    const LinearGaussianSsm model(s);
    const HyperParams theta{0.6, 0.7, -0.2};
    const Dataset data = simulate(model, 10, theta, 63);
    const ThetaGrid grid = single_point_grid(theta);
    const auto chains = chains_for_grid(model, data, grid);

    for (std::size_t i : {std::size_t{0}, std::size_t{4}, std::size_t{9}}) {
        const Marginal1D g = latent_marginal_gaussian(grid, chains, i);
        const Marginal1D l = latent_marginal_laplace(model, data, grid, chains, i);
        double peak = 0.0;
        for (std::size_t k = 0; k < g.grid.size(); ++k) peak = std::max(peak, g.density(k));
        for (std::size_t k = 0; k < g.grid.size(); ++k) {
            const double diff = std::abs(l.interp_density(g.grid[k]) - g.density(k));
            CHECK(diff <= 1e-8 * peak + 1e-12);
        }
        // a Gaussian target has zero skewness: third central moment of the
        // nested marginal vanishes at numerical scale
        double m1 = 0.0, m3 = 0.0, sd = l.sd();
        m1 = l.mean();
        for (std::size_t k = 0; k + 1 < l.grid.size(); ++k) {
            const double xm = 0.5 * (l.grid[k] + l.grid[k + 1]);
            const double dm = 0.5 * (l.density(k) + l.density(k + 1));
            m3 += dm * (xm - m1) * (xm - m1) * (xm - m1) * (l.grid[k + 1] - l.grid[k]);
        }
        CHECK(std::abs(m3 / (sd * sd * sd)) < 1e-6);
    }
}

TEST_CASE("full fit bundle on a small Poisson dataset") {
    const PoissonSsm model;
    const HyperParams truth{0.7, 0.5, 1.0};
    const Dataset data = simulate(model, 40, truth, 505);
    const InlaFit fit = run_inla(model, data, PriorSpec{});
    CHECK(fit.latent_mean.size() == 40);
    CHECK(fit.latent_sd.size() == 40);
    for (double sd : fit.latent_sd) CHECK(sd > 0.0);
    CHECK(fit.grid.points.size() >= 10);

    for (const Marginal1D* m : {&fit.rho_marginal, &fit.sigma_marginal, &fit.alpha_marginal}) {
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < m->grid.size(); ++i)
            mass += 0.5 * (m->density(i) + m->density(i + 1)) * (m->grid[i + 1] - m->grid[i]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(fit.rho_marginal.grid.front() > -1.0);
    CHECK(fit.rho_marginal.grid.back() < 1.0);
    CHECK(fit.sigma_marginal.grid.front() > 0.0);

    SUBCASE("latent mixture mean tracks the truth loosely") {
        double err = 0.0;
        for (std::size_t t = 0; t < 40; ++t)
            err += std::abs(fit.latent_mean[t] - (*data.x_true)[t]);
        CHECK(err / 40.0 < 0.6);
    }
}

TEST_CASE("Marginal1D statistics on a hand-built Gaussian grid") {
    Marginal1D m;
    const double mu = 1.0, sd = 0.5;
    for (int i = 0; i < 201; ++i) {
        const double x = mu - 5.0 * sd + 10.0 * sd * i / 200.0;
        m.grid.push_back(x);
        m.log_density.push_back(-0.5 * (x - mu) * (x - mu) / (sd * sd));
    }
    m.log_norm = normalize_log_density(m.grid, m.log_density);
    CHECK(m.log_norm == doctest::Approx(std::log(std::sqrt(2.0 * M_PI) * sd)).epsilon(1e-5));
    CHECK(m.mean() == doctest::Approx(mu).epsilon(1e-8));
    CHECK(m.sd() == doctest::Approx(sd).epsilon(1e-4));
    CHECK(m.argmax() == doctest::Approx(mu).epsilon(1e-8));
    CHECK(m.interp_density(mu) ==
          doctest::Approx(1.0 / (std::sqrt(2.0 * M_PI) * sd)).epsilon(1e-4));
}
