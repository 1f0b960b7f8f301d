#include "inlapf/smc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "inlapf/numeric.hpp"

namespace inlapf {

namespace {
void check_weights(const std::vector<double>& W) {
    if (W.empty()) throw DimensionMismatch("resample: empty weight vector");
    double s = 0.0;
    for (double w : W) {
        if (w < 0.0) throw UnnormalizedWeights("resample: negative weight");
        s += w;
    }
    if (std::fabs(s - 1.0) > 1e-9)
        throw UnnormalizedWeights("resample: weights sum to " + std::to_string(s));
}

// Map sorted uniform positions u_k to indices via the cumulative weights.
std::vector<std::size_t> positions_to_indices(const std::vector<double>& W,
                                              const std::vector<double>& u) {
    std::vector<std::size_t> idx(u.size());
    double cum = W[0];
    std::size_t j = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        while (u[k] > cum && j + 1 < W.size()) cum += W[++j];
        idx[k] = j;
    }
    return idx;
}
} // namespace

std::vector<std::size_t> resample_systematic(const std::vector<double>& W, std::size_t N,
                                             Rng& rng) {
    check_weights(W);
    const double u0 = rng.uniform01();
    std::vector<double> u(N);
    for (std::size_t k = 0; k < N; ++k) u[k] = (u0 + static_cast<double>(k)) / N;
    return positions_to_indices(W, u);
}

std::vector<std::size_t> resample_stratified(const std::vector<double>& W, std::size_t N,
                                             Rng& rng) {
    check_weights(W);
    std::vector<double> u(N);
    for (std::size_t k = 0; k < N; ++k) u[k] = (rng.uniform01() + static_cast<double>(k)) / N;
    return positions_to_indices(W, u);
}

std::vector<std::size_t> resample_multinomial(const std::vector<double>& W, std::size_t N,
                                              Rng& rng) {
    check_weights(W);
    // Sorted uniforms via the exponential-spacings trick keeps the lookup O(N).
    std::vector<double> u(N);
    double g = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        g += -std::log(1.0 - rng.uniform01());
        u[k] = g;
    }
    const double total = g - std::log(1.0 - rng.uniform01());
    for (auto& uk : u) uk /= total;
    return positions_to_indices(W, u);
}

std::vector<std::size_t> resample(ResamplerKind kind, const std::vector<double>& W, std::size_t N,
                                  Rng& rng) {
    switch (kind) {
        case ResamplerKind::Systematic: return resample_systematic(W, N, rng);
        case ResamplerKind::Stratified: return resample_stratified(W, N, rng);
        case ResamplerKind::Multinomial: return resample_multinomial(W, N, rng);
    }
    throw InvalidParams("resample: unknown scheme");
}

const char* resampler_name(ResamplerKind kind) {
    switch (kind) {
        case ResamplerKind::Systematic: return "systematic";
        case ResamplerKind::Stratified: return "stratified";
        case ResamplerKind::Multinomial: return "multinomial";
    }
    return "?";
}

double effective_sample_size(const std::vector<double>& W) {
    double s2 = 0.0;
    for (double w : W) s2 += w * w;
    return 1.0 / s2;
}

// ---------------------------------------------------------------------------
// Proposals

double BootstrapProposal::sample_first(const SsmModel& model, const HyperParams& theta,
                                       Rng& rng) const {
    return model.sample_initial(theta, rng);
}
double BootstrapProposal::logpdf_first(const SsmModel& model, const HyperParams& theta,
                                       double x1) const {
    return model.log_initial(x1, theta);
}
double BootstrapProposal::sample_step(const SsmModel& model, const HyperParams& theta,
                                      std::size_t t, double x_prev, Rng& rng) const {
    (void)t;
    return model.sample_transition(x_prev, theta, rng);
}
double BootstrapProposal::logpdf_step(const SsmModel& model, const HyperParams& theta,
                                      std::size_t t, double x_prev, double x_t) const {
    (void)t;
    return model.log_transition(x_t, x_prev, theta);
}

double ChainProposal::sample_first(const SsmModel&, const HyperParams&, Rng& rng) const {
    return q1_sample(chain_, rng);
}
double ChainProposal::logpdf_first(const SsmModel&, const HyperParams&, double x1) const {
    return q1_logpdf(chain_, x1);
}
double ChainProposal::sample_step(const SsmModel&, const HyperParams&, std::size_t t,
                                  double x_prev, Rng& rng) const {
    return qt_sample(chain_, t, x_prev, rng);
}
double ChainProposal::logpdf_step(const SsmModel&, const HyperParams&, std::size_t t,
                                  double x_prev, double x_t) const {
    return qt_logpdf(chain_, t, x_prev, x_t);
}

// ---------------------------------------------------------------------------
// The filter

FilterOutput run_filter(const SsmModel& model, const Dataset& data, const HyperParams& theta,
                        const PfProposal& proposal, std::size_t N, std::uint64_t seed,
                        const FilterOptions& options) {
    theta.validate();
    if (N < 2) throw InvalidParams("run_filter: need at least 2 particles");
    if (data.T < 1 || data.y.size() != data.T)
        throw DimensionMismatch("run_filter: dataset length mismatch");
    model.check_observations(data.y);

    const std::size_t T = data.T;
    Rng rng(seed);

    FilterOutput out;
    out.per_step_loglik.resize(T);
    out.ess.resize(T);
    out.filt_mean.resize(T);
    if (options.store_history) {
        out.history_x.reserve(T);
        out.history_ancestors.reserve(T - 1);
    }

    std::vector<double> x(N), logw(N), W(N, 1.0 / static_cast<double>(N));
    std::vector<double> x_new(N);

    for (std::size_t t = 0; t < T; ++t) {
        std::vector<std::size_t> ancestors;
        bool resampled = false;
        if (t > 0) {
            resampled = !options.adaptive_resampling ||
                        effective_sample_size(W) <
                            options.ess_threshold_frac * static_cast<double>(N);
            if (resampled) {
                ancestors = resample(options.resampler, W, N, rng);
                std::fill(W.begin(), W.end(), 1.0 / static_cast<double>(N));
            } else {
                ancestors.resize(N);
                for (std::size_t i = 0; i < N; ++i) ancestors[i] = i;
            }
        }

        // Propagate and weight (log space).
        for (std::size_t i = 0; i < N; ++i) {
            if (t == 0) {
                const double xi = proposal.sample_first(model, theta, rng);
                logw[i] = model.log_initial(xi, theta) +
                          model.log_observation(data.y[0], xi, theta) -
                          proposal.logpdf_first(model, theta, xi);
                x_new[i] = xi;
            } else {
                const double xp = x[ancestors[i]];
                const double xi = proposal.sample_step(model, theta, t, xp, rng);
                logw[i] = model.log_transition(xi, xp, theta) +
                          model.log_observation(data.y[t], xi, theta) -
                          proposal.logpdf_step(model, theta, t, xp, xi);
                x_new[i] = xi;
            }
        }
        std::swap(x, x_new);

        // Per-step likelihood factor: log(sum_i W_prev^i w^i); with
        // resampling W_prev is uniform and this is the log-mean of w.
        std::vector<double> terms(N);
        for (std::size_t i = 0; i < N; ++i) terms[i] = std::log(W[i]) + logw[i];
        const double step_ll = log_sum_exp(terms);
        if (!std::isfinite(step_ll))
            throw AllWeightsZero("run_filter: all weights vanished at t = " + std::to_string(t));
        out.per_step_loglik[t] = step_ll;
        out.loglik += step_ll;

        // Normalize the updated weights.
        for (std::size_t i = 0; i < N; ++i) W[i] = std::exp(terms[i] - step_ll);
        double wsum = 0.0;
        for (double w : W) wsum += w;
        for (auto& w : W) w /= wsum;

        out.ess[t] = effective_sample_size(W);
        double fm = 0.0;
        for (std::size_t i = 0; i < N; ++i) fm += W[i] * x[i];
        out.filt_mean[t] = fm;

        if (options.store_history) {
            out.history_x.push_back(x);
            if (t > 0) out.history_ancestors.push_back(std::move(ancestors));
        }
    }
    out.final_weights = std::move(W);
    return out;
}

std::vector<double> trace_trajectory(const FilterOutput& out, Rng& rng) {
    if (out.history_x.empty())
        throw InvalidParams("trace_trajectory: filter was run without store_history");
    const std::size_t T = out.history_x.size();
    const std::size_t N = out.final_weights.size();

    // Draw the final index from the final weights by inverse CDF.
    const double u = rng.uniform01();
    std::size_t idx = N - 1;
    double cum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        cum += out.final_weights[i];
        if (u <= cum) {
            idx = i;
            break;
        }
    }

    std::vector<double> traj(T);
    for (std::size_t t = T; t-- > 0;) {
        traj[t] = out.history_x[t][idx];
        if (t > 0) idx = out.history_ancestors[t - 1][idx];
    }
    return traj;
}

std::vector<FilterOutput> replicate_filters(const SsmModel& model, const Dataset& data,
                                            const HyperParams& theta, const PfProposal& proposal,
                                            std::size_t N, std::size_t R, std::uint64_t base_seed,
                                            const FilterOptions& options, std::size_t threads) {
    if (R < 1) throw InvalidParams("replicate_filters: R must be >= 1");
    std::vector<FilterOutput> runs(R);
    threads = std::max<std::size_t>(1, std::min(threads, R));
    if (threads == 1) {
        for (std::size_t r = 0; r < R; ++r)
            runs[r] = run_filter(model, data, theta, proposal, N, derive_seed(base_seed, r),
                                 options);
        return runs;
    }
    // Each worker owns a strided slice of replicate indices; every replicate
    // seed depends only on its index, so the result is thread-count invariant.
    std::vector<std::thread> pool;
    std::mutex error_lock;
    std::exception_ptr first_error;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w]() {
            for (std::size_t r = w; r < R; r += threads) {
                try {
                    runs[r] = run_filter(model, data, theta, proposal, N,
                                         derive_seed(base_seed, r), options);
                } catch (...) {
                    const std::lock_guard<std::mutex> hold(error_lock);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return runs;
}

ReplicateSummary summarize_replicates(const std::vector<FilterOutput>& runs) {
    if (runs.empty()) throw DimensionMismatch("summarize_replicates: no runs");
    const std::size_t R = runs.size();
    const std::size_t T = runs[0].ess.size();
    ReplicateSummary s;
    s.mean_ess.assign(T, 0.0);
    s.mean_filt.assign(T, 0.0);
    for (const auto& run : runs) {
        s.mean_loglik += run.loglik / static_cast<double>(R);
        for (std::size_t t = 0; t < T; ++t) {
            s.mean_ess[t] += run.ess[t] / static_cast<double>(R);
            s.mean_filt[t] += run.filt_mean[t] / static_cast<double>(R);
        }
    }
    if (R > 1) {
        double ss = 0.0;
        for (const auto& run : runs) {
            const double d = run.loglik - s.mean_loglik;
            ss += d * d;
        }
        s.var_loglik = ss / static_cast<double>(R - 1);
    }
    return s;
}

double mean_abs_filtering_error(const std::vector<FilterOutput>& runs,
                                const std::vector<double>& reference) {
    if (runs.empty()) throw DimensionMismatch("mean_abs_filtering_error: no runs");
    const std::size_t T = reference.size();
    double acc = 0.0;
    for (const auto& run : runs) {
        if (run.filt_mean.size() != T)
            throw DimensionMismatch("mean_abs_filtering_error: length mismatch");
        for (std::size_t t = 0; t < T; ++t) acc += std::fabs(run.filt_mean[t] - reference[t]);
    }
    return acc / static_cast<double>(runs.size() * T);
}

} // namespace inlapf
