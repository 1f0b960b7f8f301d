#include "inlapf/model.hpp"

#include <cmath>
#include <string>

namespace inlapf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double normal_logpdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * kLog2Pi - std::log(sd) - 0.5 * z * z;
}

HyperParams::HyperParams(double rho_, double sigma_, double alpha_)
    : rho(rho_), sigma(sigma_), alpha(alpha_) {
    validate();
}

void HyperParams::validate() const {
    if (!(std::fabs(rho) < 1.0))
        throw InvalidParams("HyperParams: |rho| must be < 1, got " + std::to_string(rho));
    if (!(sigma > 0.0))
        throw InvalidParams("HyperParams: sigma must be > 0, got " + std::to_string(sigma));
    if (!std::isfinite(alpha))
        throw InvalidParams("HyperParams: alpha must be finite");
}

double rho_to_rhotilde(double rho) { return std::log1p(rho) - std::log1p(-rho); }

double rhotilde_to_rho(double rhotilde) { return std::tanh(0.5 * rhotilde); }

InternalParams to_internal(const HyperParams& theta) {
    theta.validate();
    return {rho_to_rhotilde(theta.rho), -2.0 * std::log(theta.sigma), theta.alpha};
}

HyperParams from_internal(const InternalParams& z) {
    return HyperParams(rhotilde_to_rho(z[0]), std::exp(-0.5 * z[1]), z[2]);
}

void PriorSpec::validate() const {
    if (!(s_rho > 0.0) || !(s_alpha > 0.0) || !(a > 0.0) || !(b > 0.0))
        throw InvalidParams("PriorSpec: s_rho, s_alpha, a, b must all be > 0");
}

double log_prior_internal(const InternalParams& z, const PriorSpec& prior) {
    prior.validate();
    const double rhotilde = z[0];
    const double lambda = z[1]; // log sigma^{-2}
    const double alpha = z[2];
    double lp = normal_logpdf(rhotilde, prior.m_rho, prior.s_rho);
    lp += normal_logpdf(alpha, prior.m_alpha, prior.s_alpha);
    lp += prior.a * lambda - prior.b * std::exp(lambda) + prior.a * std::log(prior.b) -
          std::lgamma(prior.a);
    return lp;
}

double log_prior(const HyperParams& theta, const PriorSpec& prior) {
    return log_prior_internal(to_internal(theta), prior);
}

double poisson_log_obs(long y, double x, double alpha) {
    if (y < 0) throw NegativeCount("poisson_log_obs: y = " + std::to_string(y));
    const double eta = x + alpha;
    return static_cast<double>(y) * eta - std::exp(eta) - std::lgamma(static_cast<double>(y) + 1.0);
}

TridiagSym ar1_prior_precision(std::size_t T, const HyperParams& theta) {
    theta.validate();
    if (T < 1) throw DimensionMismatch("ar1_prior_precision: T must be >= 1");
    const double inv_s2 = 1.0 / (theta.sigma * theta.sigma);
    const double rho = theta.rho;
    std::vector<double> diag(T, (1.0 + rho * rho) * inv_s2);
    if (T == 1) {
        diag[0] = (1.0 - rho * rho) * inv_s2;
    } else {
        diag[0] = inv_s2;
        diag[T - 1] = inv_s2;
    }
    std::vector<double> off(T >= 1 ? T - 1 : 0, -rho * inv_s2);
    return TridiagSym(T, std::move(diag), std::move(off));
}

double SsmModel::log_initial(double x1, const HyperParams& theta) const {
    const double sd = theta.sigma / std::sqrt(1.0 - theta.rho * theta.rho);
    return normal_logpdf(x1, 0.0, sd);
}

double SsmModel::log_transition(double xt, double xprev, const HyperParams& theta) const {
    return normal_logpdf(xt, theta.rho * xprev, theta.sigma);
}

double SsmModel::sample_initial(const HyperParams& theta, Rng& rng) const {
    const double sd = theta.sigma / std::sqrt(1.0 - theta.rho * theta.rho);
    return rng.normal(0.0, sd);
}

double SsmModel::sample_transition(double xprev, const HyperParams& theta, Rng& rng) const {
    return rng.normal(theta.rho * xprev, theta.sigma);
}

void SsmModel::check_observations(const std::vector<double>& y) const {
    for (double v : y)
        if (!std::isfinite(v)) throw InvalidParams(name() + ": non-finite observation");
}

double PoissonSsm::log_observation(double y, double x, const HyperParams& theta) const {
    const long k = static_cast<long>(std::llround(y));
    if (std::fabs(y - static_cast<double>(k)) > 1e-9)
        throw InvalidParams("poisson: observation " + std::to_string(y) + " is not an integer");
    return poisson_log_obs(k, x, theta.alpha);
}

double PoissonSsm::sample_observation(double x, const HyperParams& theta, Rng& rng) const {
    return static_cast<double>(rng.poisson(std::exp(x + theta.alpha)));
}

double PoissonSsm::obs_score(double y, double x, const HyperParams& theta) const {
    return y - std::exp(x + theta.alpha);
}

double PoissonSsm::obs_neg_curvature(double y, double x, const HyperParams& theta) const {
    (void)y;
    return std::exp(x + theta.alpha);
}

void PoissonSsm::check_observations(const std::vector<double>& y) const {
    for (double v : y) {
        const long k = static_cast<long>(std::llround(v));
        if (std::fabs(v - static_cast<double>(k)) > 1e-9)
            throw InvalidParams("poisson: observation " + std::to_string(v) +
                                " is not an integer");
        if (k < 0)
            throw NegativeCount("poisson: observation " + std::to_string(v) + " is negative");
    }
}

LinearGaussianSsm::LinearGaussianSsm(double obs_noise) : obs_noise_(obs_noise) {
    if (!(obs_noise > 0.0)) throw InvalidParams("linear_gaussian: obs_noise must be > 0");
}

double LinearGaussianSsm::log_observation(double y, double x, const HyperParams& theta) const {
    return normal_logpdf(y, x + theta.alpha, obs_noise_);
}

double LinearGaussianSsm::sample_observation(double x, const HyperParams& theta, Rng& rng) const {
    return rng.normal(x + theta.alpha, obs_noise_);
}

double LinearGaussianSsm::obs_score(double y, double x, const HyperParams& theta) const {
    return (y - x - theta.alpha) / (obs_noise_ * obs_noise_);
}

double LinearGaussianSsm::obs_neg_curvature(double y, double x, const HyperParams& theta) const {
    (void)y;
    (void)x;
    (void)theta;
    return 1.0 / (obs_noise_ * obs_noise_);
}

Dataset simulate(const SsmModel& model, std::size_t T, const HyperParams& theta,
                 std::uint64_t seed) {
    theta.validate();
    if (T < 1) throw DimensionMismatch("simulate: T must be >= 1");
    Rng rng(seed);
    Dataset data;
    data.T = T;
    data.seed = seed;
    data.y.resize(T);
    std::vector<double> x(T);
    x[0] = model.sample_initial(theta, rng);
    for (std::size_t t = 1; t < T; ++t) x[t] = model.sample_transition(x[t - 1], theta, rng);
    for (std::size_t t = 0; t < T; ++t) data.y[t] = model.sample_observation(x[t], theta, rng);
    data.x_true = std::move(x);
    return data;
}

} // namespace inlapf
