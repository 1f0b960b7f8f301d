#include "inlapf/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "inlapf/checks.hpp"
#include "inlapf/inla.hpp"
#include "inlapf/io.hpp"
#include "inlapf/kalman.hpp"
#include "inlapf/model.hpp"
#include "inlapf/pmmh.hpp"
#include "inlapf/proposal.hpp"
#include "inlapf/smc.hpp"
#include "inlapf/svgplot.hpp"

namespace inlapf::cli {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
    if (!name.empty() && fs::path(name).is_absolute()) return name;
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

/// Re-throw any library error with the experiment stage attached.
template <typename F>
auto with_context(const std::string& ctx, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(ctx + ": " + e.what());
    }
}

std::unique_ptr<SsmModel> make_model(const std::string& name, double obs_noise) {
    if (name == "poisson") return std::make_unique<PoissonSsm>();
    if (name == "linear_gaussian") return std::make_unique<LinearGaussianSsm>(obs_noise);
    throw UsageError("unknown model '" + name + "' (expected poisson or linear_gaussian)");
}

ResamplerKind resampler_from_name(const std::string& name) {
    if (name == "systematic") return ResamplerKind::Systematic;
    if (name == "stratified") return ResamplerKind::Stratified;
    if (name == "multinomial") return ResamplerKind::Multinomial;
    throw UsageError("unknown resampler '" + name +
                     "' (expected systematic, stratified, or multinomial)");
}

/// Optional-config lookup helpers: flag value wins, then the config file,
/// then the fallback.
struct ConfigView {
    KvConfig cfg;
    bool loaded = false;

    static ConfigView open(const std::string& path) {
        ConfigView v;
        if (!path.empty()) {
            v.cfg = KvConfig::parse_file(path);
            v.loaded = true;
        }
        return v;
    }
    double pick(const std::optional<double>& flag, const std::string& sec, const std::string& key,
                double fallback) const {
        if (flag) {
            if (loaded) (void)cfg.get_double(sec, key, fallback); // consume; flag overrides
            return *flag;
        }
        return loaded ? cfg.get_double(sec, key, fallback) : fallback;
    }
    long pick(const std::optional<long>& flag, const std::string& sec, const std::string& key,
              long fallback) const {
        if (flag) {
            if (loaded) (void)cfg.get_long(sec, key, fallback);
            return *flag;
        }
        return loaded ? cfg.get_long(sec, key, fallback) : fallback;
    }
    std::string pick(const std::optional<std::string>& flag, const std::string& sec,
                     const std::string& key, const std::string& fallback) const {
        if (flag) {
            if (loaded) (void)cfg.get_string(sec, key, fallback);
            return *flag;
        }
        return loaded ? cfg.get_string(sec, key, fallback) : fallback;
    }
    void finish() const {
        if (loaded) cfg.require_all_consumed();
    }
};

PriorSpec resolve_prior(const PriorOptions& opts, const ConfigView& cfg) {
    PriorSpec prior;
    prior.m_rho = cfg.pick(opts.m_rho, "prior", "m_rho", prior.m_rho);
    prior.s_rho = cfg.pick(opts.s_rho, "prior", "s_rho", prior.s_rho);
    prior.m_alpha = cfg.pick(opts.m_alpha, "prior", "m_alpha", prior.m_alpha);
    prior.s_alpha = cfg.pick(opts.s_alpha, "prior", "s_alpha", prior.s_alpha);
    prior.a = cfg.pick(opts.a, "prior", "a", prior.a);
    prior.b = cfg.pick(opts.b, "prior", "b", prior.b);
    prior.validate();
    return prior;
}

Dataset load_dataset(const std::string& path, DatasetMeta& meta) {
    if (path.empty()) throw UsageError("a dataset path is required (--dataset)");
    return read_dataset(path, &meta);
}

struct MethodRun {
    std::string method; // bootstrap | inla
    long N = 0;
    std::vector<FilterOutput> runs;
};

double loglik_variance(const std::vector<FilterOutput>& runs) {
    double m = 0.0;
    for (const auto& r : runs) m += r.loglik;
    m /= static_cast<double>(runs.size());
    double v = 0.0;
    for (const auto& r : runs) v += (r.loglik - m) * (r.loglik - m);
    return v / std::max<double>(1.0, static_cast<double>(runs.size()) - 1.0);
}

double loglik_mean(const std::vector<FilterOutput>& runs) {
    double m = 0.0;
    for (const auto& r : runs) m += r.loglik;
    return m / static_cast<double>(runs.size());
}

std::string fmt_num(double v) {
    return format_double(v);
}

// --- plot renderers: pure functions of the already-written CSV tables ------

void render_loglik_box(const std::string& csv_path, const std::string& svg_path, long T) {
    const TextTable t = read_table(csv_path);
    const std::size_t cm = t.col("method"), cn = t.col("N"), ct = t.col("T"), cl = t.col("loglik");
    struct Key {
        std::string method;
        long N;
    };
    std::vector<Key> keys;
    std::vector<std::vector<double>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (static_cast<long>(t.num(r, ct)) != T) continue;
        const Key k{t.rows[r][cm], static_cast<long>(t.num(r, cn))};
        std::size_t g = 0;
        for (; g < keys.size(); ++g)
            if (keys[g].method == k.method && keys[g].N == k.N) break;
        if (g == keys.size()) {
            keys.push_back(k);
            groups.emplace_back();
        }
        groups[g].push_back(t.num(r, cl));
    }
    std::vector<svg::BoxStats> boxes;
    for (std::size_t g = 0; g < keys.size(); ++g) {
        svg::BoxStats b = svg::box_stats(keys[g].method + " N=" + std::to_string(keys[g].N),
                                         groups[g]);
        b.color = keys[g].method == "inla" ? "#d62728" : "#1f77b4";
        boxes.push_back(b);
    }
    svg::write_svg(svg_path, svg::box_plot("log-likelihood estimates, T=" + std::to_string(T),
                                           "log-likelihood", boxes));
}

void render_curves(const std::string& csv_path, const std::string& svg_path, long T,
                   const std::string& value_col, const std::string& title,
                   const std::string& ylabel) {
    const TextTable t = read_table(csv_path);
    const std::size_t cm = t.col("method"), cn = t.col("N"), cT = t.col("T"), ct = t.col("t"),
                      cv = t.col(value_col);
    struct Key {
        std::string method;
        long N;
    };
    std::vector<Key> keys;
    std::vector<svg::Series> series;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (static_cast<long>(t.num(r, cT)) != T) continue;
        const Key k{t.rows[r][cm], static_cast<long>(t.num(r, cn))};
        std::size_t g = 0;
        for (; g < keys.size(); ++g)
            if (keys[g].method == k.method && keys[g].N == k.N) break;
        if (g == keys.size()) {
            keys.push_back(k);
            svg::Series s;
            s.label = k.method + " N=" + std::to_string(k.N);
            s.color = k.method == "inla" ? "#d62728" : "#1f77b4";
            s.dashed = k.N < 1000;
            series.push_back(s);
        }
        series[g].x.push_back(t.num(r, ct));
        series[g].y.push_back(t.num(r, cv));
    }
    svg::write_svg(svg_path, svg::line_plot(title + ", T=" + std::to_string(T), "t", ylabel, series));
}

void render_marginal(const std::string& csv_path, const std::string& svg_path,
                     const std::string& name) {
    const CsvTable t = read_csv(csv_path);
    const std::size_t cv = t.col("value"), cd = t.col("density");
    svg::Series s;
    s.label = name;
    for (const auto& row : t.rows) {
        s.x.push_back(row[cv]);
        s.y.push_back(row[cd]);
    }
    svg::write_svg(svg_path, svg::line_plot("posterior marginal of " + name, name, "density", {s}));
}

void render_hist(const std::string& csv_path, const std::string& svg_path, const std::string& name,
                 double mark) {
    const CsvTable t = read_csv(csv_path);
    const std::size_t clo = t.col("lo"), chi = t.col("hi"), cm = t.col("mass");
    std::vector<double> edges, mass;
    for (const auto& row : t.rows) {
        if (edges.empty()) edges.push_back(row[clo]);
        edges.push_back(row[chi]);
        mass.push_back(row[cm]);
    }
    svg::write_svg(svg_path, svg::histogram("posterior samples of " + name, name, edges, mass, mark));
}

} // namespace

// ---------------------------------------------------------------------------

int cmd_simulate(const SimulateOptions& opts, const GlobalOptions& global) {
    const ConfigView cfg = ConfigView::open(opts.config_path);

    std::string model_name = "poisson";
    long T = 100;
    HyperParams theta(0.7, 0.5, 1.0);
    if (opts.preset == "fig4") {
        theta = HyperParams(0.85, 0.5, 0.5);
    } else if (!opts.preset.empty() && opts.preset != "fig1") {
        throw UsageError("unknown preset '" + opts.preset + "' (expected fig1 or fig4)");
    }
    model_name = cfg.pick(opts.model, "model", "name", model_name);
    T = cfg.pick(opts.T, "model", "T", T);
    theta.rho = cfg.pick(opts.rho, "model", "rho", theta.rho);
    theta.sigma = cfg.pick(opts.sigma, "model", "sigma", theta.sigma);
    theta.alpha = cfg.pick(opts.alpha, "model", "alpha", theta.alpha);
    const double obs_noise = cfg.pick(opts.obs_noise, "model", "obs_noise", 1.0);
    cfg.finish();

    if (T < 1) throw UsageError("T must be >= 1");
    theta.validate();
    const auto model = make_model(model_name, obs_noise);

    const Dataset data = simulate(*model, static_cast<std::size_t>(T), theta, global.seed);

    ensure_dir(global.out_dir);
    const std::string csv_path = join(global.out_dir, opts.out);
    DatasetMeta meta;
    meta.model = model_name;
    meta.theta = theta;
    meta.seed = global.seed;
    meta.obs_noise = obs_noise;
    write_dataset(csv_path, data, meta);

    double mean_y = 0.0, max_y = data.y[0];
    for (double y : data.y) {
        mean_y += y;
        max_y = std::max(max_y, y);
    }
    mean_y /= static_cast<double>(data.T);
    std::cout << "wrote " << csv_path << " and " << dataset_meta_path(csv_path) << "\n"
              << "model=" << model_name << " T=" << T << " rho=" << fmt_num(theta.rho)
              << " sigma=" << fmt_num(theta.sigma) << " alpha=" << fmt_num(theta.alpha)
              << " seed=" << global.seed << "\n"
              << "y: mean=" << fmt_num(mean_y) << " max=" << fmt_num(max_y) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_inla_fit(const InlaFitOptions& opts, const GlobalOptions& global) {
    const ConfigView cfg = ConfigView::open(opts.config_path);
    const PriorSpec prior = resolve_prior(opts.prior, cfg);
    InlaConfig config;
    config.dz = cfg.pick(opts.dz, "inla", "dz", config.dz);
    config.dz_drop = cfg.pick(opts.dz_drop, "inla", "dz_drop", config.dz_drop);
    cfg.finish();

    DatasetMeta meta;
    const Dataset data = load_dataset(opts.dataset, meta);
    const auto model = make_model(meta.model, meta.obs_noise);

    const InlaFit fit =
        with_context("inla-fit(" + opts.dataset + ")", [&] { return run_inla(*model, data, prior, config); });

    ensure_dir(global.out_dir);
    const std::array<const Marginal1D*, 3> marginals{&fit.rho_marginal, &fit.sigma_marginal,
                                                     &fit.alpha_marginal};
    const std::array<std::string, 3> names{"rho", "sigma", "alpha"};
    for (std::size_t j = 0; j < 3; ++j) {
        CsvTable t;
        t.columns = {"value", "density"};
        for (std::size_t i = 0; i < marginals[j]->grid.size(); ++i)
            t.rows.push_back({marginals[j]->grid[i], marginals[j]->density(i)});
        const std::string csv_path = join(global.out_dir, "theta_" + names[j] + "_marginal.csv");
        write_csv(csv_path, t);
        render_marginal(csv_path, join(global.out_dir, "theta_" + names[j] + "_marginal.svg"),
                        names[j]);
    }

    CsvTable latent;
    latent.columns = {"t", "mean", "sd"};
    for (std::size_t t = 0; t < data.T; ++t)
        latent.rows.push_back(
            {static_cast<double>(t + 1), fit.latent_mean[t], fit.latent_sd[t]});
    write_csv(join(global.out_dir, "latent.csv"), latent);

    std::ostringstream report;
    report << "fit report\n"
           << "dataset: " << opts.dataset << " (model " << meta.model << ", T " << data.T << ")\n"
           << "posterior mode: rho=" << fmt_num(fit.grid.mode.rho)
           << " sigma=" << fmt_num(fit.grid.mode.sigma) << " alpha=" << fmt_num(fit.grid.mode.alpha)
           << "\n"
           << "log posterior at mode (internal scale, unnormalized): "
           << fmt_num(fit.grid.log_post_mode) << "\n"
           << "grid points: " << fit.grid.points.size() << "\n"
           << "curvature positive definite: " << (fit.grid.hessian_pd ? "yes" : "no") << "\n"
           << "grid truncated at cap: " << (fit.grid.truncated ? "yes" : "no") << "\n"
           << "marginal modes: rho=" << fmt_num(fit.rho_marginal.argmax())
           << " sigma=" << fmt_num(fit.sigma_marginal.argmax())
           << " alpha=" << fmt_num(fit.alpha_marginal.argmax()) << "\n";
    const std::string report_path = join(global.out_dir, "inla_report.txt");
    std::ofstream rf(report_path);
    if (!rf) throw IoError("cannot open for writing: " + report_path);
    rf << report.str();
    std::cout << report.str() << "wrote marginals, latent.csv, and " << report_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_pf_run(const PfRunOptions& opts, const GlobalOptions& global) {
    const ConfigView cfg = ConfigView::open(opts.config_path);
    const std::string proposal_name = cfg.pick(opts.proposal, "pf", "proposal", std::string("bootstrap"));
    const long N = cfg.pick(opts.N, "pf", "N", 100L);
    const long R = cfg.pick(opts.replicates, "pf", "replicates", 50L);
    const long reference_n = cfg.pick(opts.reference_n, "pf", "reference_n", 10000L);
    const std::string resampler = cfg.pick(opts.resampler, "pf", "resampler", std::string("systematic"));

    DatasetMeta meta;
    const Dataset data = load_dataset(opts.dataset, meta);
    HyperParams theta = meta.theta;
    theta.rho = cfg.pick(opts.rho, "model", "rho", theta.rho);
    theta.sigma = cfg.pick(opts.sigma, "model", "sigma", theta.sigma);
    theta.alpha = cfg.pick(opts.alpha, "model", "alpha", theta.alpha);
    cfg.finish();
    theta.validate();
    if (N < 2) throw UsageError("N must be >= 2");
    if (R < 1) throw UsageError("replicates must be >= 1");

    const auto model = make_model(meta.model, meta.obs_noise);
    FilterOptions fopts;
    fopts.resampler = resampler_from_name(resampler);

    std::unique_ptr<PfProposal> proposal;
    if (proposal_name == "bootstrap") {
        proposal = std::make_unique<BootstrapProposal>();
    } else if (proposal_name == "inla") {
        const GaussianChain chain =
            with_context("pf-run: proposal build", [&] { return gaussian_approx(*model, data, theta); });
        proposal = std::make_unique<ChainProposal>(build_proposal(chain));
    } else {
        throw UsageError("unknown proposal '" + proposal_name + "' (expected bootstrap or inla)");
    }

    const std::vector<FilterOutput> runs = with_context("pf-run: filtering", [&] {
        return replicate_filters(*model, data, theta, *proposal, static_cast<std::size_t>(N),
                                 static_cast<std::size_t>(R), derive_seed(global.seed, 1), fopts,
                                 global.threads);
    });
    const ReplicateSummary summary = summarize_replicates(runs);

    std::vector<double> reference;
    if (reference_n > 0) {
        const BootstrapProposal boot;
        const FilterOutput ref = with_context("pf-run: reference filter", [&] {
            return run_filter(*model, data, theta, boot, static_cast<std::size_t>(reference_n),
                              derive_seed(global.seed, 2), fopts);
        });
        reference = ref.filt_mean;
    } else {
        reference = summary.mean_filt;
    }

    ensure_dir(global.out_dir);
    CsvTable loglik;
    loglik.columns = {"replicate", "loglik"};
    for (std::size_t r = 0; r < runs.size(); ++r)
        loglik.rows.push_back({static_cast<double>(r), runs[r].loglik});
    write_csv(join(global.out_dir, "loglik.csv"), loglik);

    CsvTable ess;
    ess.columns = {"t", "mean_ess"};
    for (std::size_t t = 0; t < summary.mean_ess.size(); ++t)
        ess.rows.push_back({static_cast<double>(t + 1), summary.mean_ess[t]});
    write_csv(join(global.out_dir, "ess.csv"), ess);

    CsvTable filt;
    filt.columns = {"t", "mean", "reference", "abs_error"};
    for (std::size_t t = 0; t < summary.mean_filt.size(); ++t)
        filt.rows.push_back({static_cast<double>(t + 1), summary.mean_filt[t], reference[t],
                             std::fabs(summary.mean_filt[t] - reference[t])});
    write_csv(join(global.out_dir, "filtering.csv"), filt);

    std::cout << "proposal=" << proposal_name << " N=" << N << " replicates=" << R << "\n"
              << "mean loglik=" << fmt_num(summary.mean_loglik)
              << " var=" << fmt_num(summary.var_loglik) << "\n"
              << "wrote loglik.csv, ess.csv, filtering.csv in " << global.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_pf_compare(const PfCompareOptions& opts, const GlobalOptions& global) {
    const ConfigView cfg = ConfigView::open(opts.config_path);
    if (opts.preset != "fig1" && opts.dataset.empty())
        throw UsageError("pf-compare: unknown preset '" + opts.preset + "' (expected fig1)");

    long R = cfg.pick(opts.replicates, "pf", "replicates", 50L);
    long reference_n = cfg.pick(opts.reference_n, "pf", "reference_n", 100000L);
    cfg.finish();
    if (global.quick) {
        R = std::min(R, 12L);
        reference_n = std::min(reference_n, 20000L);
    }
    std::vector<long> N_list = opts.N_list.empty() ? std::vector<long>{100, 1000} : opts.N_list;
    std::sort(N_list.begin(), N_list.end());

    ensure_dir(global.out_dir);

    // Assemble the per-T datasets: preset simulations or the provided file.
    struct Study {
        long T;
        Dataset data;
        HyperParams theta;
        std::unique_ptr<SsmModel> model;
    };
    std::vector<Study> studies;
    if (!opts.dataset.empty()) {
        DatasetMeta meta;
        Dataset data = load_dataset(opts.dataset, meta);
        studies.push_back({static_cast<long>(data.T), std::move(data), meta.theta,
                           make_model(meta.model, meta.obs_noise)});
    } else {
        const HyperParams theta(0.7, 0.5, 1.0);
        std::vector<long> T_list{100, 500};
        if (global.quick) T_list = {100};
        for (long T : T_list) {
            auto model = std::make_unique<PoissonSsm>();
            Dataset data = simulate(*model, static_cast<std::size_t>(T), theta,
                                    derive_seed(global.seed, 1000 + static_cast<std::uint64_t>(T)));
            DatasetMeta meta;
            meta.model = "poisson";
            meta.theta = theta;
            meta.seed = data.seed;
            write_dataset(join(global.out_dir, "dataset_T" + std::to_string(T) + ".csv"), data, meta);
            studies.push_back({T, std::move(data), theta, std::move(model)});
        }
    }

    TextTable loglik_rows;
    loglik_rows.columns = {"method", "N", "T", "replicate", "loglik"};
    TextTable variance_rows;
    variance_rows.columns = {"method", "N", "T", "mean_loglik", "var_loglik"};
    TextTable ess_rows;
    ess_rows.columns = {"method", "N", "T", "t", "mean_ess"};
    TextTable filt_rows;
    filt_rows.columns = {"method", "N", "T", "t", "mean", "reference", "abs_error"};

    for (std::size_t si = 0; si < studies.size(); ++si) {
        const Study& st = studies[si];
        const std::string ctx = "pf-compare[T=" + std::to_string(st.T) + "]";
        const GaussianChain chain =
            with_context(ctx + " proposal build", [&] { return gaussian_approx(*st.model, st.data, st.theta); });
        const ChainProposal inla(build_proposal(chain));
        const BootstrapProposal boot;

        const FilterOutput ref = with_context(ctx + " reference run", [&] {
            return run_filter(*st.model, st.data, st.theta, boot,
                              static_cast<std::size_t>(reference_n),
                              derive_seed(global.seed, 3000 + si));
        });

        std::vector<MethodRun> method_runs;
        std::uint64_t stream = 2000 + 100 * si;
        for (long N : N_list)
            for (const std::string& method : {std::string("bootstrap"), std::string("inla")}) {
                const PfProposal& proposal =
                    method == "inla" ? static_cast<const PfProposal&>(inla)
                                     : static_cast<const PfProposal&>(boot);
                auto runs = with_context(ctx + " " + method + " N=" + std::to_string(N), [&] {
                    return replicate_filters(*st.model, st.data, st.theta, proposal,
                                             static_cast<std::size_t>(N),
                                             static_cast<std::size_t>(R),
                                             derive_seed(global.seed, stream++), {}, global.threads);
                });
                method_runs.push_back({method, N, std::move(runs)});
            }

        for (const auto& mr : method_runs) {
            const std::string Ns = std::to_string(mr.N), Ts = std::to_string(st.T);
            for (std::size_t r = 0; r < mr.runs.size(); ++r)
                loglik_rows.rows.push_back(
                    {mr.method, Ns, Ts, std::to_string(r), fmt_num(mr.runs[r].loglik)});
            variance_rows.rows.push_back({mr.method, Ns, Ts, fmt_num(loglik_mean(mr.runs)),
                                          fmt_num(loglik_variance(mr.runs))});
            const ReplicateSummary summary = summarize_replicates(mr.runs);
            for (std::size_t t = 0; t < summary.mean_ess.size(); ++t) {
                ess_rows.rows.push_back(
                    {mr.method, Ns, Ts, std::to_string(t + 1), fmt_num(summary.mean_ess[t])});
                filt_rows.rows.push_back(
                    {mr.method, Ns, Ts, std::to_string(t + 1), fmt_num(summary.mean_filt[t]),
                     fmt_num(ref.filt_mean[t]),
                     fmt_num(std::fabs(summary.mean_filt[t] - ref.filt_mean[t]))});
            }
        }
    }

    const std::string loglik_path = join(global.out_dir, "loglik_replicates.csv");
    const std::string variance_path = join(global.out_dir, "variance.csv");
    const std::string ess_path = join(global.out_dir, "ess_vs_t.csv");
    const std::string filt_path = join(global.out_dir, "filtering_error.csv");
    write_table(loglik_path, loglik_rows);
    write_table(variance_path, variance_rows);
    write_table(ess_path, ess_rows);
    write_table(filt_path, filt_rows);

    for (const auto& st : studies) {
        const std::string suffix = "_T" + std::to_string(st.T) + ".svg";
        render_loglik_box(loglik_path, join(global.out_dir, "loglik_box" + suffix), st.T);
        render_curves(ess_path, join(global.out_dir, "ess" + suffix), st.T, "mean_ess",
                      "mean effective sample size", "mean ESS");
        render_curves(filt_path, join(global.out_dir, "filtering" + suffix), st.T, "abs_error",
                      "filtering-mean absolute error vs reference", "abs error");
    }

    std::cout << "method,N,T,mean_loglik,var_loglik\n";
    for (const auto& row : variance_rows.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
        std::cout << "\n";
    }
    // Headline comparison at the smallest/largest N of the first study.
    if (N_list.size() >= 2) {
        auto var_of = [&](const std::string& method, long N, long T) {
            for (const auto& row : variance_rows.rows)
                if (row[0] == method && row[1] == std::to_string(N) && row[2] == std::to_string(T))
                    return std::strtod(row[4].c_str(), nullptr);
            return std::nan("");
        };
        const long T0 = studies.front().T;
        const double v_inla = var_of("inla", N_list.front(), T0);
        const double v_boot_hi = var_of("bootstrap", N_list.back(), T0);
        std::cout << "variance ratio inla@N=" << N_list.front() << " / bootstrap@N=" << N_list.back()
                  << " (T=" << T0 << "): " << fmt_num(v_inla / v_boot_hi) << "\n";
    }
    std::cout << "wrote tables and plots in " << global.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_pmmh(const PmmhOptions& opts, const GlobalOptions& global) {
    const ConfigView cfg = ConfigView::open(opts.config_path);
    const PriorSpec prior = resolve_prior(opts.prior, cfg);

    PmmhConfig config;
    config.K = static_cast<std::size_t>(cfg.pick(opts.K, "pmmh", "K", static_cast<long>(config.K)));
    config.burn_in = static_cast<std::size_t>(
        cfg.pick(opts.burn_in, "pmmh", "burn_in", static_cast<long>(config.burn_in)));
    config.thin =
        static_cast<std::size_t>(cfg.pick(opts.thin, "pmmh", "thin", static_cast<long>(config.thin)));
    config.step_sd = cfg.pick(opts.step_sd, "pmmh", "step_sd", config.step_sd);
    config.N = static_cast<std::size_t>(cfg.pick(opts.N, "pmmh", "N", static_cast<long>(config.N)));
    const std::string init = cfg.pick(opts.init, "pmmh", "init", std::string("inla"));
    const std::string resampler =
        cfg.pick(opts.resampler, "pmmh", "resampler", std::string("systematic"));
    config.resampler = resampler_from_name(resampler);
    config.inla_proposal =
        opts.inla_proposal || cfg.pick(std::optional<long>{}, "pmmh", "inla_proposal", 0L) != 0;
    cfg.finish();
    if (global.quick) {
        config.K = std::min<std::size_t>(config.K, 1500);
        config.burn_in = std::min<std::size_t>(config.burn_in, 300);
        config.thin = std::min<std::size_t>(config.thin, 5);
    }

    if (init == "inla") {
        config.init = InitKind::InlaModes;
    } else if (init == "prior") {
        config.init = InitKind::PriorDraw;
    } else if (init == "explicit") {
        if (!opts.init_rho || !opts.init_sigma || !opts.init_alpha)
            throw UsageError("explicit init needs --init-rho, --init-sigma, --init-alpha");
        config.init = InitKind::Explicit;
        config.explicit_init = HyperParams(*opts.init_rho, *opts.init_sigma, *opts.init_alpha);
    } else {
        throw UsageError("unknown init '" + init + "' (expected inla, prior, or explicit)");
    }
    config.validate();

    DatasetMeta meta;
    const Dataset data = load_dataset(opts.dataset, meta);
    const auto model = make_model(meta.model, meta.obs_noise);

    const PmmhChain chain = with_context("pmmh(" + opts.dataset + ")", [&] {
        return pmmh_run(*model, data, prior, config, derive_seed(global.seed, 11));
    });
    const PmmhSummary summary = chain_summary(chain);

    ensure_dir(global.out_dir);
    CsvTable trace;
    trace.columns = {"iteration", "rho", "sigma", "alpha", "loglik", "accepted"};
    for (std::size_t k = 0; k < chain.trace_theta.size(); ++k)
        trace.rows.push_back({static_cast<double>(k), chain.trace_theta[k].rho,
                              chain.trace_theta[k].sigma, chain.trace_theta[k].alpha,
                              chain.trace_loglik[k], static_cast<double>(chain.trace_accepted[k])});
    write_csv(join(global.out_dir, "chain.csv"), trace);

    TextTable stats;
    stats.columns = {"parameter", "mean", "sd", "mode"};
    for (std::size_t j = 0; j < 3; ++j)
        stats.rows.push_back(
            {summary.names[j], fmt_num(summary.mean[j]), fmt_num(summary.sd[j]), fmt_num(summary.mode[j])});
    write_table(join(global.out_dir, "summary.csv"), stats);

    for (std::size_t j = 0; j < 3; ++j) {
        const ParamHistogram& h = summary.histograms[j];
        CsvTable t;
        t.columns = {"lo", "hi", "mass"};
        for (std::size_t b = 0; b < h.mass.size(); ++b)
            t.rows.push_back({h.edges[b], h.edges[b + 1], h.mass[b]});
        const std::string csv_path = join(global.out_dir, "hist_" + h.name + ".csv");
        write_csv(csv_path, t);
        render_hist(csv_path, join(global.out_dir, "hist_" + h.name + ".svg"), h.name,
                    summary.mean[j]);
    }

    std::cout << "iterations=" << config.K << " burn_in=" << config.burn_in
              << " thin=" << config.thin << " N=" << config.N << " accept_rate="
              << fmt_num(chain.accept_rate) << "\n"
              << "init: rho=" << fmt_num(chain.init_used.rho)
              << " sigma=" << fmt_num(chain.init_used.sigma)
              << " alpha=" << fmt_num(chain.init_used.alpha) << "\n";
    for (std::size_t j = 0; j < 3; ++j)
        std::cout << summary.names[j] << ": mean=" << fmt_num(summary.mean[j])
                  << " sd=" << fmt_num(summary.sd[j]) << " mode=" << fmt_num(summary.mode[j]) << "\n";
    std::cout << "wrote chain.csv, summary.csv, histograms in " << global.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_full_study(const FullStudyOptions& opts, const GlobalOptions& global) {
    ensure_dir(global.out_dir);

    // Stage 1: the filter comparison study (simulates its own datasets).
    {
        GlobalOptions sub = global;
        sub.out_dir = join(global.out_dir, "pf_compare");
        PfCompareOptions pc;
        pc.reference_n = opts.reference_n;
        std::cout << "== stage 1: particle-filter comparison ==\n";
        cmd_pf_compare(pc, sub);
    }

    // Stage 2: simulate the MCMC study dataset, fit it, and run the sampler.
    const std::string mcmc_dir = join(global.out_dir, "pmmh_study");
    {
        GlobalOptions sub = global;
        sub.out_dir = mcmc_dir;
        SimulateOptions sim;
        sim.preset = "fig4";
        std::cout << "== stage 2a: simulate study dataset ==\n";
        cmd_simulate(sim, sub);

        InlaFitOptions fit;
        fit.dataset = join(mcmc_dir, "dataset.csv");
        std::cout << "== stage 2b: posterior fit ==\n";
        cmd_inla_fit(fit, sub);

        PmmhOptions pm;
        pm.dataset = join(mcmc_dir, "dataset.csv");
        std::cout << "== stage 2c: pseudo-marginal MCMC ==\n";
        cmd_pmmh(pm, sub);
    }

    // Stage 3: the release-gate checks, reported to file and stdout.
    std::cout << "== stage 3: release-gate checks ==\n";
    checks::CheckOptions copts;
    copts.quick = global.quick;
    const std::vector<checks::CheckResult> results = checks::run_acceptance_checks(copts);

    std::size_t failures = 0;
    std::ostringstream report;
    report << "release-gate report" << (global.quick ? " (quick mode: reduced replicates)" : "")
           << "\n\n";
    for (const auto& r : results) {
        report << checks::format_result(r) << "\n";
        if (!r.pass) ++failures;
    }
    report << "\n"
           << (results.size() - failures) << "/" << results.size() << " checks passed\n"
           << "\nartifacts:\n"
           << "  pf_compare/   comparison tables (loglik_replicates, variance, ess_vs_t,\n"
           << "                filtering_error) and SVG plots per T\n"
           << "  pmmh_study/   dataset, posterior-fit marginals, chain.csv, summary.csv,\n"
           << "                histograms\n";
    const std::string report_path = join(global.out_dir, "report.txt");
    std::ofstream rf(report_path);
    if (!rf) throw IoError("cannot open for writing: " + report_path);
    rf << report.str();
    std::cout << report.str() << "wrote " << report_path << "\n";
    return failures == 0 ? 0 : 3;
}

} // namespace inlapf::cli
