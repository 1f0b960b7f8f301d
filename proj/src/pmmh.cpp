#include "inlapf/pmmh.hpp"

#include <algorithm>
#include <cmath>

#include "inlapf/numeric.hpp"

namespace inlapf {

void PmmhConfig::validate() const {
    if (K < 1) throw InvalidParams("pmmh: K must be >= 1");
    if (burn_in >= K) throw InvalidParams("pmmh: burn_in must be < K");
    if (thin < 1) throw InvalidParams("pmmh: thin must be >= 1");
    if (!(step_sd > 0.0)) throw InvalidParams("pmmh: step_sd must be > 0");
    if (N < 2) throw InvalidParams("pmmh: N must be >= 2");
}

PmmhChain pmmh_run_core(const LoglikEstimator& estimator,
                        const std::function<double(const InternalParams&)>& log_prior_fn,
                        const InternalParams& init, const PmmhConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);

    InternalParams z = init;
    double loglik = estimator(z, rng);
    double logprior = log_prior_fn(z);
    if (!std::isfinite(loglik) || !std::isfinite(logprior))
        throw InvalidInit("pmmh: likelihood estimate or prior is not finite at the initial state");

    PmmhChain chain;
    chain.init_used = from_internal(init);
    chain.trace_theta.reserve(config.K + 1);
    chain.trace_loglik.reserve(config.K + 1);
    chain.trace_accepted.reserve(config.K + 1);
    chain.trace_theta.push_back(from_internal(z));
    chain.trace_loglik.push_back(loglik);
    chain.trace_accepted.push_back(1);

    std::size_t accepted = 0;
    for (std::size_t k = 1; k <= config.K; ++k) {
        InternalParams zs = z;
        for (std::size_t d = 0; d < 3; ++d)
            if (config.update_mask[d]) zs[d] += config.step_sd * rng.normal();

        // Fresh estimate for the proposal only; the incumbent's estimate is
        // reused as stored (pseudo-marginal requirement).
        const double loglik_s = estimator(zs, rng);
        const double logprior_s = log_prior_fn(zs);
        const double log_ratio = loglik_s + logprior_s - loglik - logprior;

        const double log_u = std::log(1.0 - rng.uniform01());
        const bool accept = std::isfinite(loglik_s) && log_u < log_ratio;
        if (accept) {
            z = zs;
            loglik = loglik_s;
            logprior = logprior_s;
            ++accepted;
        }
        chain.trace_theta.push_back(from_internal(z));
        chain.trace_loglik.push_back(loglik);
        chain.trace_accepted.push_back(accept ? 1 : 0);
    }

    chain.accept_rate = static_cast<double>(accepted) / static_cast<double>(config.K);
    for (std::size_t k = config.burn_in + config.thin; k <= config.K; k += config.thin) {
        chain.samples.push_back(chain.trace_theta[k]);
        chain.loglik_trace.push_back(chain.trace_loglik[k]);
    }
    return chain;
}

PmmhChain pmmh_run(const SsmModel& model, const Dataset& data, const PriorSpec& prior,
                   const PmmhConfig& config, std::uint64_t seed) {
    config.validate();
    prior.validate();

    InternalParams init{};
    switch (config.init) {
        case InitKind::InlaModes: {
            const ThetaGrid grid = explore_theta(model, data, prior, config.inla);
            init = to_internal(init_from_inla(grid, config.inla));
            break;
        }
        case InitKind::PriorDraw: {
            Rng irng(derive_seed(seed, 0xC0FFEE));
            const double rhotilde = irng.normal(prior.m_rho, prior.s_rho);
            // Small Gamma shapes can round to zero (mass below DBL_MIN);
            // redraw so log(inv_s2) stays finite.
            double inv_s2 = irng.gamma(prior.a, prior.b);
            while (inv_s2 <= 0.0) inv_s2 = irng.gamma(prior.a, prior.b);
            const double alpha = irng.normal(prior.m_alpha, prior.s_alpha);
            init = {rhotilde, std::log(inv_s2), alpha};
            break;
        }
        case InitKind::Explicit:
            try {
                config.explicit_init.validate();
            } catch (const InvalidParams& e) {
                throw InvalidInit(std::string("pmmh: explicit initial state rejected: ") +
                                  e.what());
            }
            init = to_internal(config.explicit_init);
            break;
    }

    // Each estimate runs the filter on its own derived substream so that the
    // chain's walk randomness and the filters' randomness never interleave.
    std::uint64_t call_counter = 0;
    const std::uint64_t pf_seed_base = derive_seed(seed, 1);
    const BootstrapProposal bootstrap;

    FilterOptions fopt;
    fopt.resampler = config.resampler;

    LoglikEstimator estimator = [&, pf_seed_base](const InternalParams& z, Rng&) -> double {
        const HyperParams theta = from_internal(z);
        const std::uint64_t pf_seed = derive_seed(pf_seed_base, call_counter++);
        try {
            if (config.inla_proposal) {
                // The approximation-based kernels depend on theta, so they
                // are rebuilt for every proposed value.
                const GaussianChain chain = gaussian_approx(model, data, theta, config.inla);
                const ChainProposal prop(build_proposal(chain));
                return run_filter(model, data, theta, prop, config.N, pf_seed, fopt).loglik;
            }
            return run_filter(model, data, theta, bootstrap, config.N, pf_seed, fopt).loglik;
        } catch (const AllWeightsZero&) {
            // A vanished estimate means p-hat(y|theta) = 0: the move is
            // rejected by the acceptance rule rather than by an error.
            return kNegInf;
        }
    };

    auto log_prior_fn = [&](const InternalParams& z) { return log_prior_internal(z, prior); };
    PmmhChain chain = pmmh_run_core(estimator, log_prior_fn, init, config, derive_seed(seed, 2));
    return chain;
}

HyperParams init_from_inla(const ThetaGrid& grid, const InlaConfig& config) {
    const double rho = hyper_marginal(grid, 0, config).argmax();
    const double sigma = hyper_marginal(grid, 1, config).argmax();
    const double alpha = hyper_marginal(grid, 2, config).argmax();
    return HyperParams(rho, sigma, alpha);
}

namespace {
ParamHistogram make_histogram(const std::string& name, const std::vector<double>& values,
                              std::size_t bins) {
    ParamHistogram h;
    h.name = name;
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double lo = *mn_it, hi = *mx_it;
    if (hi - lo < 1e-12) { // constant chain: widen symmetrically
        lo -= 0.5e-6 + 0.5e-6 * std::fabs(lo);
        hi += 0.5e-6 + 0.5e-6 * std::fabs(hi);
    }
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    h.mass.assign(bins, 0.0);
    const double w = 1.0 / static_cast<double>(values.size());
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        h.mass[b] += w;
    }
    std::size_t best = 0;
    for (std::size_t b = 1; b < bins; ++b)
        if (h.mass[b] > h.mass[best]) best = b;
    h.mode = 0.5 * (h.edges[best] + h.edges[best + 1]);
    return h;
}
} // namespace

PmmhSummary chain_summary(const PmmhChain& chain, std::size_t bins) {
    if (chain.samples.empty()) throw EmptyChain("chain_summary: no post burn-in samples");
    if (bins < 1) throw InvalidParams("chain_summary: bins must be >= 1");

    PmmhSummary s;
    std::array<std::vector<double>, 3> cols;
    for (const auto& th : chain.samples) {
        cols[0].push_back(th.rho);
        cols[1].push_back(th.sigma);
        cols[2].push_back(th.alpha);
    }
    const double n = static_cast<double>(chain.samples.size());
    for (std::size_t j = 0; j < 3; ++j) {
        double m = 0.0;
        for (double v : cols[j]) m += v;
        m /= n;
        double ss = 0.0;
        for (double v : cols[j]) ss += (v - m) * (v - m);
        s.mean[j] = m;
        s.sd[j] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        s.histograms[j] = make_histogram(s.names[j], cols[j], bins);
        s.mode[j] = s.histograms[j].mode;
    }
    return s;
}

} // namespace inlapf
