#ifndef INLAPF_PROPOSAL_HPP
#define INLAPF_PROPOSAL_HPP

#include <cstddef>
#include <vector>

#include "inlapf/inla.hpp"
#include "inlapf/rng.hpp"

namespace inlapf {

/// Sequential form of the joint Gaussian approximation
/// N(mu, Sigma): x_1 ~ N(mu_1, v_1) and
/// x_t | x_{t-1} ~ N(mu_t + a_t (x_{t-1} - mu_{t-1}), v_t).
///
/// Because the chain is Markov, the conditional of x_t given the WHOLE
/// history x_{1:t-1} collapses to a dependence on x_{t-1} alone, so the
/// full-history regression reduces to the lag-one coefficient
/// a_t = cov1_{t-1}/var_{t-1} with residual variance
/// v_t = var_t - cov1_{t-1}^2/var_{t-1}.
struct ProposalChain {
    std::vector<double> mu; // length T
    std::vector<double> a;  // length T-1; a[t-1] couples x_t to x_{t-1}
    std::vector<double> v;  // length T; conditional variances

    std::size_t T() const { return mu.size(); }
};

/// Collapse a GaussianChain into its sequential kernels.  `inflate` >= 1
/// optionally widens every conditional variance (tail safeguard; 1 = exact).
ProposalChain build_proposal(const GaussianChain& chain, double inflate = 1.0);

double q1_sample(const ProposalChain& p, Rng& rng);
double q1_logpdf(const ProposalChain& p, double x1);

/// t is the 0-based time index of the state being proposed (1 <= t < T).
double qt_sample(const ProposalChain& p, std::size_t t, double x_prev, Rng& rng);
double qt_logpdf(const ProposalChain& p, std::size_t t, double x_prev, double x_t);

} // namespace inlapf

#endif
