#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "inlapf/errors.hpp"
#include "inlapf/experiment.hpp"

namespace cli = inlapf::cli;

int main(int argc, char** argv) {
    CLI::App app{"Latent-chain state-space toolkit: simulation, posterior fits, "
                 "particle filtering, and pseudo-marginal MCMC"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    cli::GlobalOptions global;
    app.add_option("--seed", global.seed, "Master seed (all runs derive from it)")
        ->capture_default_str();
    app.add_option("--out-dir", global.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads for replicate runs")
        ->capture_default_str();
    app.add_flag("--quick", global.quick, "Reduced replicate counts (smoke runs)");

    cli::SimulateOptions sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "Draw a dataset from one of the models");
    c_sim->add_option("--preset", sim.preset, "fig1 or fig4 parameter preset");
    c_sim->add_option("--config", sim.config_path, "key=value config file");
    c_sim->add_option("--model", sim.model, "poisson or linear_gaussian");
    c_sim->add_option("--T", sim.T, "Series length");
    c_sim->add_option("--rho", sim.rho, "AR coefficient");
    c_sim->add_option("--sigma", sim.sigma, "Innovation sd");
    c_sim->add_option("--alpha", sim.alpha, "Observation offset");
    c_sim->add_option("--obs-noise", sim.obs_noise, "Observation sd (linear_gaussian only)");
    c_sim->add_option("--out", sim.out, "Dataset CSV name")->capture_default_str();

    cli::InlaFitOptions fit;
    CLI::App* c_fit = app.add_subcommand("inla-fit", "Posterior fit: hyperparameter and latent marginals");
    c_fit->add_option("--dataset", fit.dataset, "Dataset CSV")->required();
    c_fit->add_option("--config", fit.config_path, "key=value config file");
    c_fit->add_option("--m-rho", fit.prior.m_rho, "Prior mean of the transformed AR coefficient");
    c_fit->add_option("--s-rho", fit.prior.s_rho, "Prior sd of the transformed AR coefficient");
    c_fit->add_option("--m-alpha", fit.prior.m_alpha, "Prior mean of the offset");
    c_fit->add_option("--s-alpha", fit.prior.s_alpha, "Prior sd of the offset");
    c_fit->add_option("--prior-a", fit.prior.a, "Gamma shape for the innovation precision");
    c_fit->add_option("--prior-b", fit.prior.b, "Gamma rate for the innovation precision");
    c_fit->add_option("--dz", fit.dz, "Exploration lattice spacing");
    c_fit->add_option("--dz-drop", fit.dz_drop, "Log-posterior drop kept in the lattice");

    cli::PfRunOptions pfr;
    CLI::App* c_pfr = app.add_subcommand("pf-run", "Replicated particle-filter runs on one dataset");
    c_pfr->add_option("--dataset", pfr.dataset, "Dataset CSV")->required();
    c_pfr->add_option("--config", pfr.config_path, "key=value config file");
    c_pfr->add_option("--proposal", pfr.proposal, "bootstrap or inla");
    c_pfr->add_option("--N", pfr.N, "Particles");
    c_pfr->add_option("--replicates", pfr.replicates, "Independent runs");
    c_pfr->add_option("--reference-n", pfr.reference_n,
                      "Particles for the bootstrap reference run (0 = use the replicate mean)");
    c_pfr->add_option("--resampler", pfr.resampler, "systematic, stratified, or multinomial");
    c_pfr->add_option("--rho", pfr.rho, "Override the dataset's AR coefficient");
    c_pfr->add_option("--sigma", pfr.sigma, "Override the dataset's innovation sd");
    c_pfr->add_option("--alpha", pfr.alpha, "Override the dataset's offset");

    cli::PfCompareOptions pfc;
    CLI::App* c_pfc = app.add_subcommand("pf-compare",
                                         "Bootstrap vs approximation-based proposal comparison study");
    c_pfc->add_option("--preset", pfc.preset, "Study preset (fig1)")->capture_default_str();
    c_pfc->add_option("--dataset", pfc.dataset, "Compare on an existing dataset instead");
    c_pfc->add_option("--config", pfc.config_path, "key=value config file");
    c_pfc->add_option("--N", pfc.N_list, "Particle counts to compare");
    c_pfc->add_option("--replicates", pfc.replicates, "Replicates per (method, N)");
    c_pfc->add_option("--reference-n", pfc.reference_n, "Particles for the reference run");

    cli::PmmhOptions pm;
    CLI::App* c_pm = app.add_subcommand("pmmh", "Pseudo-marginal MCMC over the hyperparameters");
    c_pm->add_option("--dataset", pm.dataset, "Dataset CSV")->required();
    c_pm->add_option("--config", pm.config_path, "key=value config file");
    c_pm->add_option("--K", pm.K, "MCMC iterations");
    c_pm->add_option("--burn-in", pm.burn_in, "Discarded prefix");
    c_pm->add_option("--thin", pm.thin, "Keep every thin-th state");
    c_pm->add_option("--step-sd", pm.step_sd, "Random-walk sd (internal scale)");
    c_pm->add_option("--N", pm.N, "Particles per likelihood estimate");
    c_pm->add_option("--init", pm.init, "inla, prior, or explicit");
    c_pm->add_option("--init-rho", pm.init_rho, "Explicit init: AR coefficient");
    c_pm->add_option("--init-sigma", pm.init_sigma, "Explicit init: innovation sd");
    c_pm->add_option("--init-alpha", pm.init_alpha, "Explicit init: offset");
    c_pm->add_flag("--inla-proposal", pm.inla_proposal,
                   "Use the approximation-based proposal inside the filter");
    c_pm->add_option("--resampler", pm.resampler, "systematic, stratified, or multinomial");
    c_pm->add_option("--m-rho", pm.prior.m_rho, "Prior mean of the transformed AR coefficient");
    c_pm->add_option("--s-rho", pm.prior.s_rho, "Prior sd of the transformed AR coefficient");
    c_pm->add_option("--m-alpha", pm.prior.m_alpha, "Prior mean of the offset");
    c_pm->add_option("--s-alpha", pm.prior.s_alpha, "Prior sd of the offset");
    c_pm->add_option("--prior-a", pm.prior.a, "Gamma shape for the innovation precision");
    c_pm->add_option("--prior-b", pm.prior.b, "Gamma rate for the innovation precision");

    cli::FullStudyOptions fs;
    CLI::App* c_fs = app.add_subcommand(
        "full-study", "One-shot reproduction: comparison study, MCMC study, release-gate report");
    c_fs->add_option("--reference-n", fs.reference_n, "Particles for the reference runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*c_sim) return cli::cmd_simulate(sim, global);
        if (*c_fit) return cli::cmd_inla_fit(fit, global);
        if (*c_pfr) return cli::cmd_pf_run(pfr, global);
        if (*c_pfc) return cli::cmd_pf_compare(pfc, global);
        if (*c_pm) return cli::cmd_pmmh(pm, global);
        if (*c_fs) return cli::cmd_full_study(fs, global);
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const inlapf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
