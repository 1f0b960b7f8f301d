#include "inlapf/quadrature.hpp"

#include <cmath>

#include "inlapf/numeric.hpp"

namespace inlapf {

GaussLegendre::GaussLegendre(std::size_t n) {
    if (n < 1) throw InvalidParams("GaussLegendre: need at least one node");
    nodes.resize(n);
    weights.resize(n);
    const double pi = 3.14159265358979323846264338327950288;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and its derivative.
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

GaussLegendre GaussLegendre::scaled(double a, double b) const {
    GaussLegendre out = *this;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out.nodes[i] = mid + half * nodes[i];
        out.weights[i] = weights[i] * half;
    }
    return out;
}

// ---------------------------------------------------------------------------

ChainQuadrature::ChainQuadrature(const SsmModel& model, const Dataset& data,
                                 const HyperParams& theta, std::size_t nodes_per_dim,
                                 double span_sd)
    : model_(model), data_(data), theta_(theta) {
    if (data.T > 4)
        throw DimensionTooLarge("ChainQuadrature: T = " + std::to_string(data.T) +
                                " (reference integrator is for T <= 4)");
    const std::size_t T = data.T;

    // Integration ranges per coordinate from the Gaussian approximation.
    const GaussianChain chain = gaussian_approx(model, data, theta);
    const GaussLegendre base(nodes_per_dim);
    x_.resize(T);
    w_.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const double sd = std::sqrt(chain.pinv.var[t]);
        const GaussLegendre g =
            base.scaled(chain.mean[t] - span_sd * sd, chain.mean[t] + span_sd * sd);
        x_[t] = g.nodes;
        w_[t] = g.weights;
    }

    const std::size_t n = nodes_per_dim;
    fwd_.assign(T, std::vector<double>(n, 0.0));
    bwd_.assign(T, std::vector<double>(n, 1.0));
    fwd_scale_.assign(T, 0.0);
    bwd_scale_.assign(T, 0.0);

    auto rescale = [](std::vector<double>& v, double& logscale) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        if (m <= 0.0) throw AllWeightsZero("ChainQuadrature: transfer values vanished");
        for (auto& x : v) x /= m;
        logscale += std::log(m);
    };

    for (std::size_t i = 0; i < n; ++i)
        fwd_[0][i] = std::exp(model.log_initial(x_[0][i], theta) +
                              model.log_observation(data.y[0], x_[0][i], theta));
    rescale(fwd_[0], fwd_scale_[0]);
    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += w_[t - 1][i] *
                     std::exp(model.log_transition(x_[t][j], x_[t - 1][i], theta)) * fwd_[t - 1][i];
            fwd_[t][j] = s * std::exp(model.log_observation(data.y[t], x_[t][j], theta));
        }
        fwd_scale_[t] = fwd_scale_[t - 1];
        rescale(fwd_[t], fwd_scale_[t]);
    }

    for (std::size_t t = T - 1; t-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += w_[t + 1][j] *
                     std::exp(model.log_transition(x_[t + 1][j], x_[t][i], theta) +
                              model.log_observation(data.y[t + 1], x_[t + 1][j], theta)) *
                     bwd_[t + 1][j];
            bwd_[t][i] = s;
        }
        bwd_scale_[t] = bwd_scale_[t + 1];
        rescale(bwd_[t], bwd_scale_[t]);
    }

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += w_[T - 1][i] * fwd_[T - 1][i];
    log_marginal_ = std::log(z) + fwd_scale_[T - 1];
}

double ChainQuadrature::log_joint_marginal(std::size_t i, double a) const {
    const std::size_t T = data_.T;
    if (i >= T) throw IndexOutOfRange("ChainQuadrature: index " + std::to_string(i));
    const std::size_t n = x_[0].size();

    double log_f; // log F_i(a): everything up to and including y_i
    if (i == 0) {
        log_f = model_.log_initial(a, theta_) + model_.log_observation(data_.y[0], a, theta_);
    } else {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += w_[i - 1][k] * std::exp(model_.log_transition(a, x_[i - 1][k], theta_)) *
                 fwd_[i - 1][k];
        if (s <= 0.0) return kNegInf;
        log_f = std::log(s) + fwd_scale_[i - 1] +
                model_.log_observation(data_.y[i], a, theta_);
    }

    double log_b = 0.0; // log B_i(a): everything after y_i
    if (i + 1 < T) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += w_[i + 1][j] *
                 std::exp(model_.log_transition(x_[i + 1][j], a, theta_) +
                          model_.log_observation(data_.y[i + 1], x_[i + 1][j], theta_)) *
                 bwd_[i + 1][j];
        if (s <= 0.0) return kNegInf;
        log_b = std::log(s) + bwd_scale_[i + 1];
    }
    return log_f + log_b;
}

// ---------------------------------------------------------------------------

PosteriorQuadrature posterior_quadrature(
    const std::function<double(const InternalParams&)>& loglik, const PriorSpec& prior,
    std::size_t nodes_per_axis, double span_sd, const InlaConfig& explore_config) {
    auto log_post = [&](const InternalParams& z) -> double {
        try {
            const double v = loglik(z) + log_prior_internal(z, prior);
            return std::isfinite(v) ? v : kNegInf;
        } catch (const Error&) {
            return kNegInf;
        }
    };

    const InternalParams start{prior.m_rho, std::log(prior.a / prior.b), prior.m_alpha};
    const ThetaGrid grid = explore_theta_fn(log_post, start, explore_config);

    std::array<double, 3> sd{1.0, 1.0, 1.0};
    if (grid.hessian_pd) {
        const Eigen::Matrix3d cov = grid.neg_hess.inverse();
        for (int j = 0; j < 3; ++j) sd[j] = std::sqrt(cov(j, j));
    }

    const GaussLegendre base(nodes_per_axis);
    std::array<GaussLegendre, 3> axis = {base, base, base};
    for (int j = 0; j < 3; ++j)
        axis[j] = base.scaled(grid.mode_z[j] - span_sd * sd[j],
                              grid.mode_z[j] + span_sd * sd[j]);

    // Accumulate in a single pass, shifting by the mode value for stability.
    const double shift = grid.log_post_mode;
    double z0 = 0.0;
    std::array<double, 3> zi{}, nat{}, nat2{};
    for (std::size_t i = 0; i < nodes_per_axis; ++i)
        for (std::size_t j = 0; j < nodes_per_axis; ++j)
            for (std::size_t k = 0; k < nodes_per_axis; ++k) {
                const InternalParams z{axis[0].nodes[i], axis[1].nodes[j], axis[2].nodes[k]};
                const double lp = log_post(z);
                if (lp == kNegInf) continue;
                const double w = axis[0].weights[i] * axis[1].weights[j] * axis[2].weights[k] *
                                 std::exp(lp - shift);
                z0 += w;
                const std::array<double, 3> natural{rhotilde_to_rho(z[0]), std::exp(-0.5 * z[1]),
                                                    z[2]};
                for (int d = 0; d < 3; ++d) {
                    zi[d] += w * z[d];
                    nat[d] += w * natural[d];
                    nat2[d] += w * natural[d] * natural[d];
                }
            }
    if (z0 <= 0.0) throw AllWeightsZero("posterior_quadrature: the posterior mass vanished");

    PosteriorQuadrature out;
    out.log_evidence = std::log(z0) + shift;
    for (int d = 0; d < 3; ++d) {
        out.mean_internal[d] = zi[d] / z0;
        out.mean_natural[d] = nat[d] / z0;
        out.sd_natural[d] = std::sqrt(std::max(nat2[d] / z0 - out.mean_natural[d] * out.mean_natural[d], 0.0));
    }
    return out;
}

} // namespace inlapf
