#ifndef INLAPF_SMC_HPP
#define INLAPF_SMC_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "inlapf/model.hpp"
#include "inlapf/proposal.hpp"
#include "inlapf/rng.hpp"

namespace inlapf {

/// Ancestor indices (0-based) drawn from normalized weights.  All three
/// schemes reject weight vectors whose sum deviates from 1 by more than 1e-9.
std::vector<std::size_t> resample_systematic(const std::vector<double>& W, std::size_t N, Rng& rng);
std::vector<std::size_t> resample_stratified(const std::vector<double>& W, std::size_t N, Rng& rng);
std::vector<std::size_t> resample_multinomial(const std::vector<double>& W, std::size_t N, Rng& rng);

enum class ResamplerKind { Systematic, Stratified, Multinomial };

std::vector<std::size_t> resample(ResamplerKind kind, const std::vector<double>& W, std::size_t N,
                                  Rng& rng);

const char* resampler_name(ResamplerKind kind);

/// 1 / sum(W_i^2) for normalized weights.
double effective_sample_size(const std::vector<double>& W);

/// Proposal abstraction for the filter: the bootstrap kernels are the model
/// dynamics; the approximation-based kernels come from a ProposalChain.
class PfProposal {
public:
    virtual ~PfProposal() = default;
    virtual std::string name() const = 0;
    virtual double sample_first(const SsmModel& model, const HyperParams& theta, Rng& rng) const = 0;
    virtual double logpdf_first(const SsmModel& model, const HyperParams& theta, double x1) const = 0;
    virtual double sample_step(const SsmModel& model, const HyperParams& theta, std::size_t t,
                               double x_prev, Rng& rng) const = 0;
    virtual double logpdf_step(const SsmModel& model, const HyperParams& theta, std::size_t t,
                               double x_prev, double x_t) const = 0;
};

class BootstrapProposal final : public PfProposal {
public:
    std::string name() const override { return "bootstrap"; }
    double sample_first(const SsmModel& model, const HyperParams& theta, Rng& rng) const override;
    double logpdf_first(const SsmModel& model, const HyperParams& theta, double x1) const override;
    double sample_step(const SsmModel& model, const HyperParams& theta, std::size_t t,
                       double x_prev, Rng& rng) const override;
    double logpdf_step(const SsmModel& model, const HyperParams& theta, std::size_t t,
                       double x_prev, double x_t) const override;
};

class ChainProposal final : public PfProposal {
public:
    explicit ChainProposal(ProposalChain chain) : chain_(std::move(chain)) {}
    std::string name() const override { return "inla"; }
    const ProposalChain& chain() const { return chain_; }
    double sample_first(const SsmModel& model, const HyperParams& theta, Rng& rng) const override;
    double logpdf_first(const SsmModel& model, const HyperParams& theta, double x1) const override;
    double sample_step(const SsmModel& model, const HyperParams& theta, std::size_t t,
                       double x_prev, Rng& rng) const override;
    double logpdf_step(const SsmModel& model, const HyperParams& theta, std::size_t t,
                       double x_prev, double x_t) const override;

private:
    ProposalChain chain_;
};

struct FilterOptions {
    ResamplerKind resampler = ResamplerKind::Systematic;
    /// Default: resample at every step.  When true, resample only when the
    /// ESS of the current weights falls below ess_threshold_frac * N.
    bool adaptive_resampling = false;
    double ess_threshold_frac = 0.5;
    /// Keep per-step particles and ancestors (needed to trace a trajectory).
    bool store_history = false;
};

struct FilterOutput {
    double loglik = 0.0;
    std::vector<double> per_step_loglik; // log p-hat(y_t | y_{1:t-1})
    std::vector<double> ess;             // after each weight update
    std::vector<double> filt_mean;       // sum_i W_t^i X_t^i
    std::vector<double> final_weights;   // normalized weights at t = T
    // Present only when FilterOptions::store_history is set:
    std::vector<std::vector<double>> history_x;
    std::vector<std::vector<std::size_t>> history_ancestors; // T-1 rows
};

/// One run of the sequential filter: sample from the proposal, weight with
/// f·g/q in log space, resample ancestors, accumulate the per-step
/// likelihood factors log((sum_i W_prev^i w^i)) before normalization.
FilterOutput run_filter(const SsmModel& model, const Dataset& data, const HyperParams& theta,
                        const PfProposal& proposal, std::size_t N, std::uint64_t seed,
                        const FilterOptions& options = {});

/// Draw one latent trajectory from a history-storing filter run by sampling
/// a final particle from the final weights and walking its ancestry back.
std::vector<double> trace_trajectory(const FilterOutput& out, Rng& rng);

/// R independent replicates with seeds derived from base_seed (stream r).
/// Replicates are embarrassingly parallel: `threads` > 1 distributes them
/// over worker threads; results are keyed by replicate index, so the output
/// is identical for every thread count.
std::vector<FilterOutput> replicate_filters(const SsmModel& model, const Dataset& data,
                                            const HyperParams& theta, const PfProposal& proposal,
                                            std::size_t N, std::size_t R, std::uint64_t base_seed,
                                            const FilterOptions& options = {},
                                            std::size_t threads = 1);

/// Summary statistics across replicates.
struct ReplicateSummary {
    double mean_loglik = 0.0;
    double var_loglik = 0.0; // unbiased sample variance
    std::vector<double> mean_ess;
    std::vector<double> mean_filt;
};

ReplicateSummary summarize_replicates(const std::vector<FilterOutput>& runs);

/// Mean over replicates and time steps of |filt_mean - reference|.
double mean_abs_filtering_error(const std::vector<FilterOutput>& runs,
                                const std::vector<double>& reference);

} // namespace inlapf

#endif
