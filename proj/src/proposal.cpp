#include "inlapf/proposal.hpp"

#include <cmath>
#include <string>

namespace inlapf {

ProposalChain build_proposal(const GaussianChain& chain, double inflate) {
    if (!(inflate >= 1.0))
        throw InvalidParams("build_proposal: inflation factor must be >= 1");
    const std::size_t T = chain.mean.size();
    ProposalChain p;
    p.mu = chain.mean;
    p.a.resize(T - 1);
    p.v.resize(T);
    const auto& var = chain.pinv.var;
    const auto& cov1 = chain.pinv.cov1;
    p.v[0] = var[0];
    for (std::size_t t = 1; t < T; ++t) {
        p.a[t - 1] = cov1[t - 1] / var[t - 1];
        p.v[t] = var[t] - cov1[t - 1] * cov1[t - 1] / var[t - 1];
    }
    for (std::size_t t = 0; t < T; ++t) {
        p.v[t] *= inflate;
        if (!(p.v[t] > 0.0))
            throw NonPositiveConditionalVariance("build_proposal: v[" + std::to_string(t) +
                                                 "] = " + std::to_string(p.v[t]));
    }
    return p;
}

double q1_sample(const ProposalChain& p, Rng& rng) {
    return rng.normal(p.mu[0], std::sqrt(p.v[0]));
}

double q1_logpdf(const ProposalChain& p, double x1) {
    return normal_logpdf(x1, p.mu[0], std::sqrt(p.v[0]));
}

namespace {
void check_t(const ProposalChain& p, std::size_t t) {
    if (t < 1 || t >= p.T())
        throw IndexOutOfRange("proposal kernel: t = " + std::to_string(t) +
                              " outside [1, " + std::to_string(p.T()) + ")");
}
} // namespace

double qt_sample(const ProposalChain& p, std::size_t t, double x_prev, Rng& rng) {
    check_t(p, t);
    const double mean = p.mu[t] + p.a[t - 1] * (x_prev - p.mu[t - 1]);
    return rng.normal(mean, std::sqrt(p.v[t]));
}

double qt_logpdf(const ProposalChain& p, std::size_t t, double x_prev, double x_t) {
    check_t(p, t);
    const double mean = p.mu[t] + p.a[t - 1] * (x_prev - p.mu[t - 1]);
    return normal_logpdf(x_t, mean, std::sqrt(p.v[t]));
}

} // namespace inlapf
