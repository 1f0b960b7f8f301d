// Release-gate checks: every check runs a pinned-seed experiment against an
// independent reference (dense linear algebra, exact Kalman/quadrature
// oracles, or enumerable cases) and reports pass/fail with the measured
// numbers.  The `quick` flag shrinks replicate counts for smoke runs; the
// release gate runs with quick = false.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inlapf/model.hpp"
#include "inlapf/smc.hpp"

namespace inlapf::checks {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured values and thresholds
};

struct CheckOptions {
    bool quick = false;
};

/// Shared Poisson comparison study (T=100, rho=0.7, sigma=0.5, alpha=1,
/// 50 replicates) reused by the variance, ESS, and filtering-error checks.
struct ComparisonRuns {
    Dataset data;
    HyperParams theta;
    std::size_t R = 0;
    std::vector<FilterOutput> boot_n100, boot_n1000, inla_n100, inla_n1000;
    std::vector<double> reference_filt; // high-N bootstrap filtering means
    std::size_t reference_N = 0;
};

ComparisonRuns run_comparison_study(const CheckOptions& opts);

CheckResult check_gaussian_exact_on_gaussian_likelihood();
CheckResult check_proposal_chain_rule_identity();
CheckResult check_loglik_estimate_unbiased(const CheckOptions& opts);
CheckResult check_variance_reduction(const ComparisonRuns& runs);
CheckResult check_ess_dominance(const ComparisonRuns& runs);
CheckResult check_filtering_error_parity(const ComparisonRuns& runs);
CheckResult check_pmmh_exact_mode_matches_quadrature(const CheckOptions& opts);
CheckResult check_pmmh_study_protocol(const CheckOptions& opts);
CheckResult check_latent_marginals_vs_quadrature();
CheckResult check_resampling_suite(const CheckOptions& opts);

/// All ten checks in order (the comparison study is run once and shared).
std::vector<CheckResult> run_acceptance_checks(const CheckOptions& opts = {});

/// "PASS  3 name: detail" — one line per check.
std::string format_result(const CheckResult& r);

} // namespace inlapf::checks
