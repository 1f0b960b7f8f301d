#ifndef INLAPF_MODEL_HPP
#define INLAPF_MODEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inlapf/errors.hpp"
#include "inlapf/rng.hpp"
#include "inlapf/tridiag.hpp"

namespace inlapf {

/// Natural-scale hyperparameters of the AR(1) state-space models:
/// latent X₁ ~ N(0, σ²/(1−ρ²)), X_t = ρ·X_{t−1} + N(0, σ²), observation
/// offset α (log-rate for the Poisson model, mean shift for the
/// linear-Gaussian one).
struct HyperParams {
    double rho = 0.0;   // AR coefficient, |rho| < 1
    double sigma = 1.0; // innovation standard deviation, > 0
    double alpha = 0.0; // observation offset

    HyperParams() = default;
    HyperParams(double rho_, double sigma_, double alpha_);

    void validate() const;
};

/// Internal unconstrained parametrization used by every sampler and
/// optimizer: z = (ρ̃, λ, α) with ρ̃ = log(1+ρ) − log(1−ρ) and λ = log σ⁻².
using InternalParams = std::array<double, 3>;

double rho_to_rhotilde(double rho);
double rhotilde_to_rho(double rhotilde);
InternalParams to_internal(const HyperParams& theta);
HyperParams from_internal(const InternalParams& z);

/// Prior on the hyperparameters: ρ̃ ~ N(m_rho, s_rho²), α ~ N(m_alpha, s_alpha²),
/// σ⁻² ~ Gamma(a, b) in the shape–rate convention.
struct PriorSpec {
    double m_rho = 0.0;
    double s_rho = 0.15;
    double m_alpha = 0.0;
    double s_alpha = 10.0;
    double a = 0.01;
    double b = 0.01;

    void validate() const;
};

/// Log prior density of the internal coordinates z = (ρ̃, λ, α).  The ρ̃ and
/// α factors are already densities in internal coordinates; the Gamma factor
/// on σ⁻² = e^λ picks up the Jacobian e^λ, giving a·λ − b·e^λ + a·log b −
/// log Γ(a).
double log_prior_internal(const InternalParams& z, const PriorSpec& prior);
double log_prior(const HyperParams& theta, const PriorSpec& prior);

/// Simulated or loaded data for one model run.
struct Dataset {
    std::size_t T = 0;
    std::vector<double> y;
    std::optional<std::vector<double>> x_true;
    std::uint64_t seed = 0;
};

/// log Poisson(y; e^{x+alpha}) = y·(x+α) − e^{x+α} − log y!.
double poisson_log_obs(long y, double x, double alpha);

/// Precision of the stationary AR(1) chain (x₁,…,x_T):
/// Q = (1/σ²)·tridiag(diag = (1, 1+ρ², …, 1+ρ², 1), off = −ρ);
/// T = 1 reduces to the stationary precision (1−ρ²)/σ².
TridiagSym ar1_prior_precision(std::size_t T, const HyperParams& theta);

/// State-space model over the shared AR(1) latent chain.  Concrete models
/// supply the observation density, its sampler, and the first two
/// derivatives of log g(y|x) in x (used to build Gaussian approximations).
class SsmModel {
public:
    virtual ~SsmModel() = default;

    virtual std::string name() const = 0;

    double log_initial(double x1, const HyperParams& theta) const;
    double log_transition(double xt, double xprev, const HyperParams& theta) const;
    double sample_initial(const HyperParams& theta, Rng& rng) const;
    double sample_transition(double xprev, const HyperParams& theta, Rng& rng) const;

    virtual double log_observation(double y, double x, const HyperParams& theta) const = 0;
    virtual double sample_observation(double x, const HyperParams& theta, Rng& rng) const = 0;
    /// d/dx log g(y|x)
    virtual double obs_score(double y, double x, const HyperParams& theta) const = 0;
    /// −d²/dx² log g(y|x)
    virtual double obs_neg_curvature(double y, double x, const HyperParams& theta) const = 0;

    /// Validate that a loaded observation vector is admissible for the model.
    virtual void check_observations(const std::vector<double>& y) const;
};

/// Y_t | X_t = x ~ Poisson(e^{x+α}).
class PoissonSsm final : public SsmModel {
public:
    std::string name() const override { return "poisson"; }
    double log_observation(double y, double x, const HyperParams& theta) const override;
    double sample_observation(double x, const HyperParams& theta, Rng& rng) const override;
    double obs_score(double y, double x, const HyperParams& theta) const override;
    double obs_neg_curvature(double y, double x, const HyperParams& theta) const override;
    void check_observations(const std::vector<double>& y) const override;
};

/// Y_t | X_t = x ~ N(x + α, obs_noise²): exactly solvable via the Kalman
/// recursion, used as a correctness oracle for the sequential algorithms.
class LinearGaussianSsm final : public SsmModel {
public:
    explicit LinearGaussianSsm(double obs_noise = 1.0);

    std::string name() const override { return "linear_gaussian"; }
    double obs_noise() const { return obs_noise_; }
    double log_observation(double y, double x, const HyperParams& theta) const override;
    double sample_observation(double x, const HyperParams& theta, Rng& rng) const override;
    double obs_score(double y, double x, const HyperParams& theta) const override;
    double obs_neg_curvature(double y, double x, const HyperParams& theta) const override;

private:
    double obs_noise_;
};

/// Draw x₁ ~ μ_θ, x_t ~ f_θ(·|x_{t−1}), y_t ~ g_θ(·|x_t); deterministic in
/// `seed`.
Dataset simulate(const SsmModel& model, std::size_t T, const HyperParams& theta, std::uint64_t seed);

/// log N(x; mean, sd²).
double normal_logpdf(double x, double mean, double sd);

} // namespace inlapf

#endif
