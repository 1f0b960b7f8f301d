#ifndef INLAPF_PMMH_HPP
#define INLAPF_PMMH_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "inlapf/inla.hpp"
#include "inlapf/model.hpp"
#include "inlapf/smc.hpp"

namespace inlapf {

enum class InitKind { InlaModes, PriorDraw, Explicit };

struct PmmhConfig {
    std::size_t K = 10000;      // total MH iterations
    std::size_t burn_in = 1000; // discarded prefix (in iterations)
    std::size_t thin = 10;      // keep every thin-th post burn-in state
    double step_sd = 0.3;       // sqrt(tau): random-walk sd per coordinate
    std::size_t N = 100;        // particles per likelihood estimate
    InitKind init = InitKind::InlaModes;
    HyperParams explicit_init;  // used when init == Explicit
    /// Freeze coordinates of the internal walk (rho-tilde, log sigma^-2,
    /// alpha); frozen coordinates stay at their initial values.
    std::array<bool, 3> update_mask = {true, true, true};
    /// Use the approximation-based proposal inside the filter instead of the
    /// bootstrap kernels.
    bool inla_proposal = false;
    ResamplerKind resampler = ResamplerKind::Systematic;
    /// Settings for the initializing fit when init == InlaModes.
    InlaConfig inla;

    void validate() const;
};

struct PmmhChain {
    // Full per-iteration trace (k = 0 is the initial state).
    std::vector<HyperParams> trace_theta;
    std::vector<double> trace_loglik;
    std::vector<char> trace_accepted;

    // Post burn-in, thinned view used for inference.
    std::vector<HyperParams> samples;
    std::vector<double> loglik_trace;

    double accept_rate = 0.0; // over all K proposals
    HyperParams init_used;
};

/// Stochastic log-likelihood estimator of theta (internal coordinates); the
/// Rng is the chain's own stream.  Wrapping the particle filter, the exact
/// Kalman evaluation, or a synthetic density all fit this signature.
using LoglikEstimator = std::function<double(const InternalParams&, Rng&)>;

/// Metropolis–Hastings over the internal scale with a symmetric Gaussian
/// random walk N(current, step_sd^2 I): accept with probability
/// exp(loglik* + logprior* - loglik - logprior); the incumbent's stored
/// estimate is never recomputed (pseudo-marginal discipline), so the
/// estimator is invoked exactly K + 1 times.
PmmhChain pmmh_run_core(const LoglikEstimator& estimator,
                        const std::function<double(const InternalParams&)>& log_prior_fn,
                        const InternalParams& init, const PmmhConfig& config, std::uint64_t seed);

/// Full sampler: bootstrap-PF likelihood estimates on the given model/data.
PmmhChain pmmh_run(const SsmModel& model, const Dataset& data, const PriorSpec& prior,
                   const PmmhConfig& config, std::uint64_t seed);

/// Per-coordinate posterior modes of the fitted hyperparameter marginals.
HyperParams init_from_inla(const ThetaGrid& grid, const InlaConfig& config = {});

struct ParamHistogram {
    std::string name;
    std::vector<double> edges; // bins+1 ascending edges
    std::vector<double> mass;  // bins entries summing to 1
    double mode = 0.0;         // center of the heaviest bin
};

struct PmmhSummary {
    std::array<std::string, 3> names = {"rho", "sigma", "alpha"};
    std::array<double, 3> mean{};
    std::array<double, 3> sd{};
    std::array<double, 3> mode{};
    std::array<ParamHistogram, 3> histograms;
};

/// Posterior mean/sd/mode per parameter with fixed-width histograms
/// (default 50 bins, the documented choice for the mode estimate).
PmmhSummary chain_summary(const PmmhChain& chain, std::size_t bins = 50);

} // namespace inlapf

#endif
