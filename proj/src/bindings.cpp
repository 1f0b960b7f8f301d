// Python bindings: thin wrappers over the C++ core returning plain
// dict/list structures so the package has no compiled-type surface.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "inlapf/inla.hpp"
#include "inlapf/kalman.hpp"
#include "inlapf/model.hpp"
#include "inlapf/pmmh.hpp"
#include "inlapf/proposal.hpp"
#include "inlapf/smc.hpp"

namespace py = pybind11;
using namespace inlapf;

namespace {

std::unique_ptr<SsmModel> make_model(const std::string& name, double obs_noise) {
    if (name == "poisson") return std::make_unique<PoissonSsm>();
    if (name == "linear_gaussian") return std::make_unique<LinearGaussianSsm>(obs_noise);
    throw std::invalid_argument("unknown model '" + name + "' (use poisson or linear_gaussian)");
}

ResamplerKind resampler_kind(const std::string& name) {
    if (name == "systematic") return ResamplerKind::Systematic;
    if (name == "stratified") return ResamplerKind::Stratified;
    if (name == "multinomial") return ResamplerKind::Multinomial;
    throw std::invalid_argument("unknown resampler '" + name + "'");
}

Dataset make_dataset(const std::vector<double>& y) {
    Dataset data;
    data.T = y.size();
    data.y = y;
    return data;
}

PriorSpec make_prior(double m_rho, double s_rho, double m_alpha, double s_alpha, double a,
                     double b) {
    PriorSpec prior;
    prior.m_rho = m_rho;
    prior.s_rho = s_rho;
    prior.m_alpha = m_alpha;
    prior.s_alpha = s_alpha;
    prior.a = a;
    prior.b = b;
    prior.validate();
    return prior;
}

py::dict marginal_dict(const Marginal1D& m) {
    py::dict d;
    std::vector<double> dens(m.grid.size());
    for (std::size_t i = 0; i < m.grid.size(); ++i) dens[i] = m.density(i);
    d["grid"] = m.grid;
    d["density"] = dens;
    d["mean"] = m.mean();
    d["sd"] = m.sd();
    d["mode"] = m.argmax();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Latent-chain state-space toolkit: approximate fits, sequential "
              "filters, and chain-based samplers for AR(1) latent models.";

    py::register_exception<Error>(m, "CoreError");

    m.def(
        "simulate",
        [](const std::string& model, std::size_t T, double rho, double sigma, double alpha,
           std::uint64_t seed, double obs_noise) {
            auto ssm = make_model(model, obs_noise);
            Dataset data = simulate(*ssm, T, HyperParams{rho, sigma, alpha}, seed);
            py::dict out;
            out["y"] = data.y;
            out["x_true"] = *data.x_true;
            out["seed"] = data.seed;
            return out;
        },
        py::arg("model"), py::arg("T"), py::arg("rho"), py::arg("sigma"), py::arg("alpha"),
        py::arg("seed") = 1, py::arg("obs_noise") = 1.0,
        "Draw a dataset from the generative model; deterministic in seed.");

    m.def(
        "kalman_loglik",
        [](const std::vector<double>& y, double rho, double sigma, double alpha,
           double obs_noise) {
            return kalman_loglik(make_dataset(y), HyperParams{rho, sigma, alpha}, obs_noise);
        },
        py::arg("y"), py::arg("rho"), py::arg("sigma"), py::arg("alpha"),
        py::arg("obs_noise") = 1.0,
        "Exact log-marginal likelihood of the linear-Gaussian model.");

    m.def(
        "gaussian_approx",
        [](const std::vector<double>& y, const std::string& model, double rho, double sigma,
           double alpha, double obs_noise) {
            auto ssm = make_model(model, obs_noise);
            Dataset data = make_dataset(y);
            ssm->check_observations(data.y);
            GaussianChain chain = gaussian_approx(*ssm, data, HyperParams{rho, sigma, alpha});
            py::dict out;
            out["mean"] = chain.mean;
            out["var"] = chain.pinv.var;
            out["cov1"] = chain.pinv.cov1;
            out["newton_iters"] = chain.newton_iters;
            return out;
        },
        py::arg("y"), py::arg("model"), py::arg("rho"), py::arg("sigma"), py::arg("alpha"),
        py::arg("obs_noise") = 1.0,
        "Mode/curvature-matched Gaussian approximation of the latent chain.");

    m.def(
        "build_proposal",
        [](const std::vector<double>& y, const std::string& model, double rho, double sigma,
           double alpha, double obs_noise, double inflate) {
            auto ssm = make_model(model, obs_noise);
            Dataset data = make_dataset(y);
            ssm->check_observations(data.y);
            GaussianChain chain = gaussian_approx(*ssm, data, HyperParams{rho, sigma, alpha});
            ProposalChain p = build_proposal(chain, inflate);
            py::dict out;
            out["mu"] = p.mu;
            out["a"] = p.a;
            out["v"] = p.v;
            return out;
        },
        py::arg("y"), py::arg("model"), py::arg("rho"), py::arg("sigma"), py::arg("alpha"),
        py::arg("obs_noise") = 1.0, py::arg("inflate") = 1.0,
        "Markov (mu, a, v) factorization of the approximating Gaussian.");

    m.def(
        "run_inla",
        [](const std::vector<double>& y, const std::string& model, double obs_noise,
           double m_rho, double s_rho, double m_alpha, double s_alpha, double a, double b,
           double dz, double dz_drop) {
            auto ssm = make_model(model, obs_noise);
            Dataset data = make_dataset(y);
            ssm->check_observations(data.y);
            InlaConfig config;
            config.dz = dz;
            config.dz_drop = dz_drop;
            InlaFit fit =
                run_inla(*ssm, data, make_prior(m_rho, s_rho, m_alpha, s_alpha, a, b), config);
            py::dict out;
            out["rho"] = marginal_dict(fit.rho_marginal);
            out["sigma"] = marginal_dict(fit.sigma_marginal);
            out["alpha"] = marginal_dict(fit.alpha_marginal);
            out["latent_mean"] = fit.latent_mean;
            out["latent_sd"] = fit.latent_sd;
            HyperParams mode = fit.grid.mode;
            py::dict md;
            md["rho"] = mode.rho;
            md["sigma"] = mode.sigma;
            md["alpha"] = mode.alpha;
            out["mode"] = md;
            out["grid_points"] = fit.grid.points.size();
            return out;
        },
        py::arg("y"), py::arg("model") = "poisson", py::arg("obs_noise") = 1.0,
        py::arg("m_rho") = 0.0, py::arg("s_rho") = 0.15, py::arg("m_alpha") = 0.0,
        py::arg("s_alpha") = 10.0, py::arg("a") = 0.01, py::arg("b") = 0.01,
        py::arg("dz") = 1.0, py::arg("dz_drop") = 2.5,
        "Full fit: hyperparameter marginals plus latent mean/sd per step.");

    m.def(
        "run_filter",
        [](const std::vector<double>& y, const std::string& model, double rho, double sigma,
           double alpha, double obs_noise, const std::string& proposal, std::size_t N,
           std::uint64_t seed, const std::string& resampler, bool adaptive_resampling,
           double ess_threshold_frac, double inflate) {
            auto ssm = make_model(model, obs_noise);
            Dataset data = make_dataset(y);
            ssm->check_observations(data.y);
            HyperParams theta{rho, sigma, alpha};
            FilterOptions options;
            options.resampler = resampler_kind(resampler);
            options.adaptive_resampling = adaptive_resampling;
            options.ess_threshold_frac = ess_threshold_frac;
            std::unique_ptr<PfProposal> prop;
            if (proposal == "bootstrap") {
                prop = std::make_unique<BootstrapProposal>();
            } else if (proposal == "inla") {
                GaussianChain chain = gaussian_approx(*ssm, data, theta);
                prop = std::make_unique<ChainProposal>(build_proposal(chain, inflate));
            } else {
                throw std::invalid_argument("unknown proposal '" + proposal + "'");
            }
            FilterOutput out = run_filter(*ssm, data, theta, *prop, N, seed, options);
            py::dict d;
            d["loglik"] = out.loglik;
            d["per_step_loglik"] = out.per_step_loglik;
            d["ess"] = out.ess;
            d["filt_mean"] = out.filt_mean;
            d["final_weights"] = out.final_weights;
            return d;
        },
        py::arg("y"), py::arg("model"), py::arg("rho"), py::arg("sigma"), py::arg("alpha"),
        py::arg("obs_noise") = 1.0, py::arg("proposal") = "bootstrap", py::arg("N") = 100,
        py::arg("seed") = 1, py::arg("resampler") = "systematic",
        py::arg("adaptive_resampling") = false, py::arg("ess_threshold_frac") = 0.5,
        py::arg("inflate") = 1.0,
        "One particle-filter run; returns loglik, per-step ESS and filtering means.");

    m.def(
        "pmmh",
        [](const std::vector<double>& y, const std::string& model, double obs_noise,
           double m_rho, double s_rho, double m_alpha, double s_alpha, double a, double b,
           std::size_t K, std::size_t burn_in, std::size_t thin, double step_sd, std::size_t N,
           const std::string& init, double init_rho, double init_sigma, double init_alpha,
           bool inla_proposal, std::uint64_t seed) {
            auto ssm = make_model(model, obs_noise);
            Dataset data = make_dataset(y);
            ssm->check_observations(data.y);
            PmmhConfig config;
            config.K = K;
            config.burn_in = burn_in;
            config.thin = thin;
            config.step_sd = step_sd;
            config.N = N;
            config.inla_proposal = inla_proposal;
            if (init == "inla") {
                config.init = InitKind::InlaModes;
            } else if (init == "prior") {
                config.init = InitKind::PriorDraw;
            } else if (init == "explicit") {
                config.init = InitKind::Explicit;
                config.explicit_init = HyperParams{init_rho, init_sigma, init_alpha};
            } else {
                throw std::invalid_argument("unknown init '" + init + "'");
            }
            PmmhChain chain = pmmh_run(*ssm, data,
                                       make_prior(m_rho, s_rho, m_alpha, s_alpha, a, b), config,
                                       seed);
            PmmhSummary summary = chain_summary(chain);
            std::vector<std::array<double, 3>> samples;
            samples.reserve(chain.samples.size());
            for (const auto& th : chain.samples) samples.push_back({th.rho, th.sigma, th.alpha});
            py::dict out;
            out["samples"] = samples;
            out["accept_rate"] = chain.accept_rate;
            out["mean"] = summary.mean;
            out["sd"] = summary.sd;
            out["mode"] = summary.mode;
            py::dict iu;
            iu["rho"] = chain.init_used.rho;
            iu["sigma"] = chain.init_used.sigma;
            iu["alpha"] = chain.init_used.alpha;
            out["init_used"] = iu;
            return out;
        },
        py::arg("y"), py::arg("model") = "poisson", py::arg("obs_noise") = 1.0,
        py::arg("m_rho") = 0.0, py::arg("s_rho") = 0.15, py::arg("m_alpha") = 0.0,
        py::arg("s_alpha") = 10.0, py::arg("a") = 0.01, py::arg("b") = 0.01,
        py::arg("K") = 10000, py::arg("burn_in") = 1000, py::arg("thin") = 10,
        py::arg("step_sd") = 0.3, py::arg("N") = 100, py::arg("init") = "inla",
        py::arg("init_rho") = 0.0, py::arg("init_sigma") = 1.0, py::arg("init_alpha") = 0.0,
        py::arg("inla_proposal") = false, py::arg("seed") = 1,
        "Random-walk chain over (rho, sigma, alpha) driven by filter estimates.");

    m.def(
        "resample",
        [](const std::string& kind, const std::vector<double>& weights, std::size_t N,
           std::uint64_t seed) {
            Rng rng(seed);
            return resample(resampler_kind(kind), weights, N, rng);
        },
        py::arg("kind"), py::arg("weights"), py::arg("N"), py::arg("seed") = 1,
        "Ancestor indices for normalized weights (systematic/stratified/multinomial).");
}
