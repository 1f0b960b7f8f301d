#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "inlapf/model.hpp"
#include "inlapf/quadrature.hpp"
#include "inlapf/rng.hpp"
#include "inlapf/tridiag.hpp"

using namespace inlapf;

namespace {

// Trapezoid-free quadrature helper: integrate f over [a,b] with piecewise
// 64-node Gauss-Legendre panels.
template <typename F>
double integrate(F f, double a, double b, int panels = 8) {
    const GaussLegendre gl(64);
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const auto [nodes, weights] = gl.scaled(a + p * h, a + (p + 1) * h);
        for (std::size_t i = 0; i < nodes.size(); ++i) total += weights[i] * f(nodes[i]);
    }
    return total;
}

} // namespace

TEST_CASE("poisson observation log-density") {
    CHECK(poisson_log_obs(0, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(poisson_log_obs(1, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    // direct formula with lgamma
    const double expected = 3.0 * 1.5 - std::exp(1.5) - std::lgamma(4.0);
    CHECK(poisson_log_obs(3, 0.5, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(poisson_log_obs(-1, 0.0, 0.0), NegativeCount);

    SUBCASE("sums to one over y") {
        double total = 0.0;
        for (long y = 0; y < 200; ++y) total += std::exp(poisson_log_obs(y, 1.1, 0.7));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("AR(1) prior precision matrix") {
    SUBCASE("independent unit-variance chain is the identity") {
        const TridiagSym Q = ar1_prior_precision(3, HyperParams{0.0, 1.0, 0.0});
        for (double d : Q.diag) CHECK(d == doctest::Approx(1.0));
        for (double e : Q.offdiag) CHECK(e == doctest::Approx(0.0));
    }
    SUBCASE("rho=0.7 sigma=0.5 T=2") {
        const TridiagSym Q = ar1_prior_precision(2, HyperParams{0.7, 0.5, 0.0});
        CHECK(Q.diag[0] == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(Q.diag[1] == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(Q.offdiag[0] == doctest::Approx(-2.8).epsilon(1e-14));
    }
    SUBCASE("T=1 reduces to the stationary precision") {
        const TridiagSym Q = ar1_prior_precision(1, HyperParams{0.7, 0.5, 0.0});
        CHECK(Q.diag[0] == doctest::Approx((1.0 - 0.49) / 0.25).epsilon(1e-14));
        CHECK(Q.offdiag.empty());
    }
    SUBCASE("interior diagonal carries the 1+rho^2 factor") {
        const TridiagSym Q = ar1_prior_precision(5, HyperParams{0.3, 2.0, 0.0});
        CHECK(Q.diag[0] == doctest::Approx(0.25));
        CHECK(Q.diag[2] == doctest::Approx((1.0 + 0.09) / 4.0));
        CHECK(Q.offdiag[1] == doctest::Approx(-0.3 / 4.0));
    }
}

TEST_CASE("factorized chain density equals the joint Gaussian") {
    const PoissonSsm model;
    Rng rng(42);
    for (std::size_t T = 1; T <= 20; ++T) {
        const HyperParams theta{0.6, 0.8, 0.2};
        std::vector<double> x(T);
        for (auto& v : x) v = rng.normal();
        double factorized = model.log_initial(x[0], theta);
        for (std::size_t t = 1; t < T; ++t)
            factorized += model.log_transition(x[t], x[t - 1], theta);
        const TridiagSym Q = ar1_prior_precision(T, theta);
        const CholBidiag L = cholesky(Q);
        const std::vector<double> mean(T, 0.0);
        CHECK(factorized == doctest::Approx(gmrf_logpdf(Q, L, mean, x)).epsilon(1e-10));
    }
}

TEST_CASE("initial and transition densities normalize and match normals") {
    const PoissonSsm model;
    const HyperParams theta{0.7, 0.5, 1.0};
    const double stat_sd = 0.5 / std::sqrt(1.0 - 0.49);
    CHECK(model.log_initial(0.3, theta) ==
          doctest::Approx(normal_logpdf(0.3, 0.0, stat_sd)).epsilon(1e-14));
    CHECK(model.log_transition(0.2, -0.4, theta) ==
          doctest::Approx(normal_logpdf(0.2, 0.7 * -0.4, 0.5)).epsilon(1e-14));

    const double mass_init = integrate(
        [&](double x) { return std::exp(model.log_initial(x, theta)); }, -8.0, 8.0);
    CHECK(mass_init == doctest::Approx(1.0).epsilon(1e-10));
    const double mass_trans = integrate(
        [&](double x) { return std::exp(model.log_transition(x, 0.9, theta)); }, -6.0, 7.0);
    CHECK(mass_trans == doctest::Approx(1.0).epsilon(1e-10));

    SUBCASE("zero correlation makes transitions ignore the past") {
        const HyperParams ind{0.0, 0.8, 0.0};
        CHECK(model.log_transition(0.4, -3.0, ind) == model.log_transition(0.4, 11.0, ind));
    }
}

TEST_CASE("linear-Gaussian observation model and derivatives") {
    const LinearGaussianSsm model(0.4);
    const HyperParams theta{0.5, 1.0, 0.7};
    CHECK(model.log_observation(1.2, 0.3, theta) ==
          doctest::Approx(normal_logpdf(1.2, 1.0, 0.4)).epsilon(1e-14));
    const double mass = integrate(
        [&](double y) { return std::exp(model.log_observation(y, 0.3, theta)); }, -4.0, 6.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    SUBCASE("score and curvature match finite differences (both models)") {
        const PoissonSsm pois;
        const double h = 1e-5;
        for (double x : {-0.7, 0.0, 1.3}) {
            const double g1 = (model.log_observation(1.2, x + h, theta) -
                               model.log_observation(1.2, x - h, theta)) /
                              (2.0 * h);
            CHECK(model.obs_score(1.2, x, theta) == doctest::Approx(g1).epsilon(1e-7));
            const double g2 = (model.log_observation(1.2, x + h, theta) -
                               2.0 * model.log_observation(1.2, x, theta) +
                               model.log_observation(1.2, x - h, theta)) /
                              (h * h);
            CHECK(model.obs_neg_curvature(1.2, x, theta) == doctest::Approx(-g2).epsilon(1e-4));

            const double p1 = (pois.log_observation(3.0, x + h, theta) -
                               pois.log_observation(3.0, x - h, theta)) /
                              (2.0 * h);
            CHECK(pois.obs_score(3.0, x, theta) == doctest::Approx(p1).epsilon(1e-6));
            const double p2 = (pois.log_observation(3.0, x + h, theta) -
                               2.0 * pois.log_observation(3.0, x, theta) +
                               pois.log_observation(3.0, x - h, theta)) /
                              (h * h);
            CHECK(pois.obs_neg_curvature(3.0, x, theta) ==
                  doctest::Approx(-p2).epsilon(1e-4));
        }
    }
}

TEST_CASE("internal parametrization round trip") {
    CHECK(rho_to_rhotilde(0.7) == doctest::Approx(std::log(1.7) - std::log(0.3)).epsilon(1e-14));
    CHECK(rhotilde_to_rho(rho_to_rhotilde(0.7)) == doctest::Approx(0.7).epsilon(1e-12));
    for (double rho : {-0.95, -0.2, 0.0, 0.5, 0.99}) {
        for (double sigma : {0.1, 1.0, 3.0}) {
            const HyperParams theta{rho, sigma, -0.4};
            const HyperParams back = from_internal(to_internal(theta));
            CHECK(back.rho == doctest::Approx(theta.rho).epsilon(1e-12));
            CHECK(back.sigma == doctest::Approx(theta.sigma).epsilon(1e-12));
            CHECK(back.alpha == doctest::Approx(theta.alpha).epsilon(1e-12));
        }
    }
}

TEST_CASE("log prior matches quadrature-normalized factor densities") {
    const PriorSpec prior; // defaults
    const HyperParams theta{0.5, 0.5, 1.0};
    const InternalParams z = to_internal(theta);

    // rho-tilde factor: N(m_rho, s_rho^2), normalization recomputed by quadrature
    const double rt = z[0];
    const double un_r = -0.5 * (rt - prior.m_rho) * (rt - prior.m_rho) /
                        (prior.s_rho * prior.s_rho);
    const double norm_r = integrate(
        [&](double u) {
            return std::exp(-0.5 * (u - prior.m_rho) * (u - prior.m_rho) /
                            (prior.s_rho * prior.s_rho));
        },
        prior.m_rho - 12.0 * prior.s_rho, prior.m_rho + 12.0 * prior.s_rho);
    const double log_rho_factor = un_r - std::log(norm_r);

    // lambda factor: density proportional to exp(a*l - b*e^l); the far-left
    // tail decays like e^{a l}, so the panels must reach very negative l.
    const double lam = z[1];
    const double un_l = prior.a * lam - prior.b * std::exp(lam);
    double norm_l = 0.0;
    const double cuts[] = {-6000.0, -600.0, -60.0, 0.0, 20.0, 60.0};
    for (int s = 0; s + 1 < 6; ++s)
        norm_l += integrate(
            [&](double u) { return std::exp(prior.a * u - prior.b * std::exp(u)); }, cuts[s],
            cuts[s + 1], 16);
    const double log_lambda_factor = un_l - std::log(norm_l);

    // alpha factor
    const double un_a = -0.5 * (theta.alpha - prior.m_alpha) * (theta.alpha - prior.m_alpha) /
                        (prior.s_alpha * prior.s_alpha);
    const double norm_a = integrate(
        [&](double u) {
            return std::exp(-0.5 * (u - prior.m_alpha) * (u - prior.m_alpha) /
                            (prior.s_alpha * prior.s_alpha));
        },
        prior.m_alpha - 12.0 * prior.s_alpha, prior.m_alpha + 12.0 * prior.s_alpha);
    const double log_alpha_factor = un_a - std::log(norm_a);

    const double expected = log_rho_factor + log_lambda_factor + log_alpha_factor;
    CHECK(log_prior_internal(z, prior) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(log_prior(theta, prior) == doctest::Approx(log_prior_internal(z, prior)).epsilon(1e-14));

    SUBCASE("centered rho factor is the normal density at its mean") {
        const InternalParams z0{0.0, 0.0, 0.0};
        InternalParams z_shift = z0;
        z_shift[0] = 0.15; // one prior sd away
        const double diff = log_prior_internal(z0, prior) - log_prior_internal(z_shift, prior);
        CHECK(diff == doctest::Approx(0.5).epsilon(1e-12)); // half a squared sd
    }
    SUBCASE("alpha factor at the mean carries the -log(sqrt(2 pi) s_alpha) constant") {
        InternalParams za{0.0, 0.0, 0.0};
        InternalParams zb{0.0, 0.0, prior.s_alpha};
        const double diff = log_prior_internal(za, prior) - log_prior_internal(zb, prior);
        CHECK(diff == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(HyperParams(1.0, 0.5, 0.0).validate(), InvalidParams);
    CHECK_THROWS_AS(HyperParams(-1.2, 0.5, 0.0).validate(), InvalidParams);
    CHECK_THROWS_AS(HyperParams(0.5, 0.0, 0.0).validate(), InvalidParams);
    CHECK_THROWS_AS(HyperParams(0.5, -2.0, 0.0).validate(), InvalidParams);
    CHECK_NOTHROW(HyperParams(0.99, 0.01, -30.0).validate());

    PriorSpec bad;
    bad.s_rho = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = PriorSpec{};
    bad.a = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = PriorSpec{};
    bad.b = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("simulation") {
    const PoissonSsm model;
    SUBCASE("vanishing innovation keeps the chain at zero") {
        const Dataset data = simulate(model, 50, HyperParams{0.0, 1e-8, 0.0}, 5);
        REQUIRE(data.x_true.has_value());
        for (double x : *data.x_true) CHECK(std::abs(x) < 1e-6);
        // observations are then Poisson(1)
        double mean_y = 0.0;
        for (double y : data.y) mean_y += y;
        mean_y /= static_cast<double>(data.T);
        CHECK(mean_y > 0.4);
        CHECK(mean_y < 1.8);
    }
    SUBCASE("deterministic in the seed") {
        const Dataset a = simulate(model, 64, HyperParams{0.7, 0.5, 1.0}, 99);
        const Dataset b = simulate(model, 64, HyperParams{0.7, 0.5, 1.0}, 99);
        const Dataset c = simulate(model, 64, HyperParams{0.7, 0.5, 1.0}, 100);
        CHECK(a.y == b.y);
        CHECK(*a.x_true == *b.x_true);
        CHECK(a.y != c.y);
        CHECK(a.seed == 99);
    }
    SUBCASE("stationary variance of the latent chain") {
        const Dataset data = simulate(model, 10000, HyperParams{0.7, 0.5, 0.0}, 7);
        double s = 0.0, s2 = 0.0;
        for (double x : *data.x_true) {
            s += x;
            s2 += x * x;
        }
        const double n = static_cast<double>(data.T);
        const double var = s2 / n - (s / n) * (s / n);
        CHECK(var == doctest::Approx(0.25 / 0.51).epsilon(0.05));
    }
    SUBCASE("linear-Gaussian observations center on x + alpha") {
        const LinearGaussianSsm lg(0.3);
        const Dataset data = simulate(lg, 5000, HyperParams{0.0, 1e-8, 2.0}, 11);
        double s = 0.0, s2 = 0.0;
        for (double y : data.y) {
            s += y;
            s2 += y * y;
        }
        const double n = static_cast<double>(data.T);
        CHECK(s / n == doctest::Approx(2.0).epsilon(0.01));
        CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(0.09).epsilon(0.06));
    }
}

TEST_CASE("observation vector validation") {
    const PoissonSsm pois;
    CHECK_NOTHROW(pois.check_observations({0.0, 3.0, 17.0}));
    CHECK_THROWS_AS(pois.check_observations({1.0, 2.5}), InvalidParams);
    CHECK_THROWS_AS(pois.check_observations({-1.0}), NegativeCount);
    const LinearGaussianSsm lg(1.0);
    CHECK_NOTHROW(lg.check_observations({-3.7, 0.0, 12.5}));
}
