// Command implementations behind the CLI front end: simulation, fitting,
// filter comparison studies, the MCMC study, and the one-shot full study
// with its release-gate report.  Each command returns a process exit code
// (0 success; the full study returns 3 when a gate check fails); usage
// problems throw UsageError (exit 1) and numerical/IO problems propagate
// inlapf::Error (exit 2).
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace inlapf::cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::size_t threads = 1;
    bool quick = false;
};

struct SimulateOptions {
    std::string preset;              // "", "fig1", "fig4"
    std::string config_path;         // optional key=value file
    std::optional<std::string> model;
    std::optional<long> T;
    std::optional<double> rho, sigma, alpha, obs_noise;
    std::string out = "dataset.csv"; // relative to out_dir unless absolute
};

struct PriorOptions {
    std::optional<double> m_rho, s_rho, m_alpha, s_alpha, a, b;
};

struct InlaFitOptions {
    std::string dataset;
    std::string config_path;
    PriorOptions prior;
    std::optional<double> dz, dz_drop;
};

struct PfRunOptions {
    std::string dataset;
    std::string config_path;
    std::optional<std::string> proposal;  // bootstrap | inla
    std::optional<long> N, replicates, reference_n;
    std::optional<std::string> resampler; // systematic | stratified | multinomial
    std::optional<double> rho, sigma, alpha; // default: dataset metadata
};

struct PfCompareOptions {
    std::string preset = "fig1";
    std::string dataset;             // overrides the preset's simulated data
    std::string config_path;
    std::vector<long> N_list;        // default from preset
    std::optional<long> replicates, reference_n;
};

struct PmmhOptions {
    std::string dataset;
    std::string config_path;
    PriorOptions prior;
    std::optional<long> K, burn_in, thin, N;
    std::optional<double> step_sd;
    std::optional<std::string> init; // inla | prior | explicit
    std::optional<double> init_rho, init_sigma, init_alpha;
    bool inla_proposal = false;
    std::optional<std::string> resampler;
};

struct FullStudyOptions {
    std::optional<long> reference_n;
};

int cmd_simulate(const SimulateOptions& opts, const GlobalOptions& global);
int cmd_inla_fit(const InlaFitOptions& opts, const GlobalOptions& global);
int cmd_pf_run(const PfRunOptions& opts, const GlobalOptions& global);
int cmd_pf_compare(const PfCompareOptions& opts, const GlobalOptions& global);
int cmd_pmmh(const PmmhOptions& opts, const GlobalOptions& global);
int cmd_full_study(const FullStudyOptions& opts, const GlobalOptions& global);

} // namespace inlapf::cli
