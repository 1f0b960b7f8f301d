#include "inlapf/inla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <deque>
#include <string>

#include "inlapf/numeric.hpp"

namespace inlapf {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// ---------------------------------------------------------------------------
// Natural cubic spline through (x_i, y_i); linear for fewer than 3 points.
// Used to put gridded log-densities onto smooth abscissae.
class CubicSpline {
public:
    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
        const std::size_t n = x_.size();
        if (n < 3) return;
        // Solve the SPD tridiagonal system for interior second derivatives.
        std::vector<double> diag(n - 2), off(n - 3), rhs(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            diag[i - 1] = (hl + hr) / 3.0;
            if (i + 2 < n) off[i - 1] = hr / 6.0;
            rhs[i - 1] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
        }
        TridiagSym A(n - 2, std::move(diag), std::move(off));
        const std::vector<double> sol = solve(cholesky(A), rhs);
        for (std::size_t i = 0; i + 2 < n; ++i) m_[i + 1] = sol[i];
    }

    double operator()(double t) const {
        const std::size_t n = x_.size();
        if (n == 1) return y_[0];
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
        if (j == 0) j = 1;
        if (j >= n) j = n - 1;
        const double h = x_[j] - x_[j - 1];
        const double A = (x_[j] - t) / h;
        const double B = 1.0 - A;
        return A * y_[j - 1] + B * y_[j] +
               ((A * A * A - A) * m_[j - 1] + (B * B * B - B) * m_[j]) * h * h / 6.0;
    }

private:
    std::vector<double> x_, y_, m_;
};

double joint_log_target(const SsmModel& model, const Dataset& data, const HyperParams& theta,
                        const TridiagSym& Q, const std::vector<double>& x) {
    double s = -0.5 * quad_form(Q, x);
    for (std::size_t t = 0; t < data.T; ++t)
        s += model.log_observation(data.y[t], x[t], theta);
    return s;
}

// Derivative-free simplex maximizer (classic reflect/expand/contract/shrink).
InternalParams simplex_maximize(const std::function<double(const InternalParams&)>& f,
                                const InternalParams& start, const InlaConfig& config) {
    constexpr std::size_t n = 3;
    std::array<InternalParams, n + 1> v;
    std::array<double, n + 1> fv;
    v[0] = start;
    for (std::size_t i = 0; i < n; ++i) {
        v[i + 1] = start;
        v[i + 1][i] += 1.0;
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(v[i]);

    auto order = [&]() {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = i + 1; j <= n; ++j)
                if (fv[j] > fv[i]) {
                    std::swap(fv[i], fv[j]);
                    std::swap(v[i], v[j]);
                }
    };

    for (std::size_t iter = 0; iter < config.simplex_max_iter; ++iter) {
        order();
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::fabs(v[n][i] - v[0][i]));
        if (fv[0] - fv[n] < config.simplex_ftol || spread < config.simplex_xtol) return v[0];

        InternalParams centroid{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += v[i][d] / n;

        auto blend = [&](double coef) {
            InternalParams p;
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (v[n][d] - centroid[d]);
            return p;
        };

        const InternalParams xr = blend(-1.0); // reflection
        const double fr = f(xr);
        if (fr > fv[0]) {
            const InternalParams xe = blend(-2.0); // expansion
            const double fe = f(xe);
            if (fe > fr) {
                v[n] = xe;
                fv[n] = fe;
            } else {
                v[n] = xr;
                fv[n] = fr;
            }
        } else if (fr > fv[n - 1]) {
            v[n] = xr;
            fv[n] = fr;
        } else {
            const InternalParams xc = blend(0.5); // contraction
            const double fc = f(xc);
            if (fc > fv[n]) {
                v[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) { // shrink toward best
                    for (std::size_t d = 0; d < n; ++d)
                        v[i][d] = v[0][d] + 0.5 * (v[i][d] - v[0][d]);
                    fv[i] = f(v[i]);
                }
            }
        }
    }
    throw OptimFailed("simplex_maximize: no convergence within iteration budget");
}

Eigen::Vector3d fd_gradient(const std::function<double(const InternalParams&)>& f,
                            const InternalParams& x, double h) {
    Eigen::Vector3d g;
    for (int i = 0; i < 3; ++i) {
        InternalParams xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

Eigen::Matrix3d fd_hessian(const std::function<double(const InternalParams&)>& f,
                           const InternalParams& x, double h) {
    Eigen::Matrix3d H;
    const double f0 = f(x);
    for (int i = 0; i < 3; ++i) {
        InternalParams xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            InternalParams pp = x, pm = x, mp = x, mm = x;
            pp[i] += h; pp[j] += h;
            pm[i] += h; pm[j] -= h;
            mp[i] -= h; mp[j] += h;
            mm[i] -= h; mm[j] -= h;
            H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    return H;
}

// Build the (ascending, duplicate-merged) support and masses of the grid
// weights projected on internal axis j.
void project_axis(const ThetaGrid& grid, std::size_t j, std::vector<double>& u,
                  std::vector<double>& mass) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(grid.points.size());
    for (const auto& p : grid.points) pts.emplace_back(p.z[j], p.weight);
    std::sort(pts.begin(), pts.end());
    const double span = pts.back().first - pts.front().first;
    const double tol = 1e-7 * std::max(span, 1e-6);
    u.clear();
    mass.clear();
    for (const auto& [uv, w] : pts) {
        if (!u.empty() && uv - u.back() <= tol) {
            mass.back() += w;
        } else {
            u.push_back(uv);
            mass.push_back(w);
        }
    }
}

Marginal1D spike_marginal(double u0) {
    const double w = std::max(1e-8, 1e-6 * std::max(1.0, std::fabs(u0)));
    Marginal1D m;
    m.grid = {u0 - w, u0, u0 + w};
    m.log_density = {-30.0, 0.0, -30.0};
    m.log_norm = normalize_log_density(m.grid, m.log_density);
    return m;
}

void mixture_moments(const ThetaGrid& grid, const std::vector<GaussianChain>& chains,
                     std::size_t i, double& mean, double& sd) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
        const double w = grid.points[k].weight;
        const double mu = chains[k].mean[i];
        const double v = chains[k].pinv.var[i];
        m1 += w * mu;
        m2 += w * (v + mu * mu);
    }
    mean = m1;
    sd = std::sqrt(std::max(m2 - m1 * m1, 1e-300));
}

std::vector<double> marginal_abscissa(double mean, double sd, const InlaConfig& config) {
    const std::size_t n = std::max<std::size_t>(config.abscissa_points, 3);
    std::vector<double> a(n);
    for (std::size_t j = 0; j < n; ++j)
        a[j] = mean + config.abscissa_span * sd * (2.0 * static_cast<double>(j) / (n - 1) - 1.0);
    return a;
}

} // namespace

// ---------------------------------------------------------------------------
// Marginal1D

double Marginal1D::density(std::size_t i) const { return std::exp(log_density[i]); }

double Marginal1D::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (log_density[i] > log_density[best]) best = i;
    return grid[best];
}

double Marginal1D::mean() const {
    std::vector<double> xd(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) xd[i] = grid[i] * std::exp(log_density[i]);
    return trapezoid(grid, xd);
}

double Marginal1D::sd() const {
    const double m = mean();
    std::vector<double> xd(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        xd[i] = (grid[i] - m) * (grid[i] - m) * std::exp(log_density[i]);
    return std::sqrt(std::max(trapezoid(grid, xd), 0.0));
}

double Marginal1D::interp_density(double x) const {
    if (grid.empty() || x < grid.front() || x > grid.back()) return 0.0;
    const std::size_t j = static_cast<std::size_t>(
        std::upper_bound(grid.begin(), grid.end(), x) - grid.begin());
    if (j == 0) return std::exp(log_density[0]);
    if (j >= grid.size()) return std::exp(log_density.back());
    const double f = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
    return (1.0 - f) * std::exp(log_density[j - 1]) + f * std::exp(log_density[j]);
}

double normalize_log_density(const std::vector<double>& grid, std::vector<double>& log_density) {
    if (grid.size() != log_density.size() || grid.size() < 2)
        throw DimensionMismatch("normalize_log_density: need matching grids of size >= 2");
    double m = kNegInf;
    for (double v : log_density) m = std::max(m, v);
    if (!std::isfinite(m)) throw AllWeightsZero("normalize_log_density: density is identically 0");
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        integral += 0.5 * (std::exp(log_density[i] - m) + std::exp(log_density[i + 1] - m)) *
                    (grid[i + 1] - grid[i]);
    const double log_c = m + std::log(integral);
    for (auto& v : log_density) v -= log_c;
    return log_c;
}

// ---------------------------------------------------------------------------
// Gaussian approximation of pi(x | theta, y)

GaussianChain gaussian_approx(const SsmModel& model, const Dataset& data,
                              const HyperParams& theta, const InlaConfig& config) {
    theta.validate();
    if (data.y.size() != data.T || data.T < 1)
        throw DimensionMismatch("gaussian_approx: dataset length mismatch");
    const std::size_t T = data.T;
    const TridiagSym Q = ar1_prior_precision(T, theta);

    std::vector<double> x(T, 0.0);
    double fx = joint_log_target(model, data, theta, Q, x);
    std::size_t iters = 0;
    bool converged = false;

    for (std::size_t iter = 0; iter < config.newton_max_iter; ++iter) {
        std::vector<double> g = matvec(Q, x);
        double gnorm = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            g[t] = -g[t] + model.obs_score(data.y[t], x[t], theta);
            gnorm = std::max(gnorm, std::fabs(g[t]));
        }
        if (gnorm <= config.newton_tol) {
            converged = true;
            break;
        }

        TridiagSym H = Q;
        for (std::size_t t = 0; t < T; ++t)
            H.diag[t] += model.obs_neg_curvature(data.y[t], x[t], theta);
        const std::vector<double> delta = solve(cholesky(H), g);

        // Ascent line search with rounding slack: near the optimum the true
        // gain of a Newton step drops below the resolution of the objective
        // evaluation, and demanding a strict increase would reject every
        // productive step while the gradient is still above tolerance.
        const double slack =
            64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(fx));
        double step = 1.0;
        bool accepted = false;
        for (std::size_t h = 0; h <= config.newton_max_halvings; ++h) {
            std::vector<double> xn(T);
            for (std::size_t t = 0; t < T; ++t) xn[t] = x[t] + step * delta[t];
            const double fn = joint_log_target(model, data, theta, Q, xn);
            if (fn >= fx - slack) {
                x = std::move(xn);
                fx = std::max(fx, fn);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw NoConvergence("gaussian_approx: ascent line search failed at iteration " +
                                std::to_string(iter));
        ++iters;
    }
    if (!converged)
        throw NoConvergence("gaussian_approx: gradient norm above tolerance after " +
                            std::to_string(config.newton_max_iter) + " iterations");

    GaussianChain chain;
    chain.prec = Q;
    for (std::size_t t = 0; t < T; ++t)
        chain.prec.diag[t] += model.obs_neg_curvature(data.y[t], x[t], theta);
    chain.chol = cholesky(chain.prec);
    chain.pinv = partial_inverse(chain.chol);
    chain.mean = std::move(x);
    chain.newton_iters = iters;
    return chain;
}

// ---------------------------------------------------------------------------
// Hyperparameter posterior (unnormalized, internal scale)

double log_theta_posterior(const SsmModel& model, const Dataset& data, const InternalParams& z,
                           const PriorSpec& prior, const InlaConfig& config,
                           GaussianChain* chain_out) {
    const HyperParams theta = from_internal(z);
    GaussianChain chain = gaussian_approx(model, data, theta, config);
    const std::size_t T = data.T;

    const TridiagSym Qp = ar1_prior_precision(T, theta);
    const CholBidiag Lp = cholesky(Qp);
    const std::vector<double> zero(T, 0.0);

    double lp = log_prior_internal(z, prior);
    lp += gmrf_logpdf(Qp, Lp, zero, chain.mean);
    for (std::size_t t = 0; t < T; ++t)
        lp += model.log_observation(data.y[t], chain.mean[t], theta);
    // minus the Gaussian approximation's own density at its mode
    lp -= -0.5 * static_cast<double>(T) * kLog2Pi + 0.5 * chain.chol.logdet;

    if (chain_out) *chain_out = std::move(chain);
    return lp;
}

double log_theta_posterior(const SsmModel& model, const Dataset& data, const HyperParams& theta,
                           const PriorSpec& prior, const InlaConfig& config) {
    return log_theta_posterior(model, data, to_internal(theta), prior, config, nullptr);
}

// ---------------------------------------------------------------------------
// Hyperparameter exploration

ThetaGrid explore_theta_fn(const std::function<double(const InternalParams&)>& log_post,
                           const InternalParams& start, const InlaConfig& config) {
    // Guard the objective: non-finite or throwing evaluations count as -inf,
    // so pathological fringe points simply fall outside the kept region.
    auto safe = [&](const InternalParams& z) -> double {
        try {
            const double v = log_post(z);
            return std::isfinite(v) ? v : kNegInf;
        } catch (const Error&) {
            return kNegInf;
        }
    };

    InternalParams mode = simplex_maximize(safe, start, config);
    double fmode = safe(mode);
    if (fmode == kNegInf) throw OptimFailed("explore_theta: objective is -inf at the optimum");

    // Newton polish with finite-difference derivatives.
    const double h = config.hess_step;
    for (int polish = 0; polish < 5; ++polish) {
        const Eigen::Vector3d g = fd_gradient(safe, mode, h);
        if (g.lpNorm<Eigen::Infinity>() < 1e-9) break;
        const Eigen::Matrix3d H = fd_hessian(safe, mode, h);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(-H);
        if (es.eigenvalues().minCoeff() <= 0.0) break; // leave simplex answer as-is
        Eigen::Vector3d step = es.eigenvectors() *
                               (es.eigenvectors().transpose() * g).cwiseQuotient(
                                   es.eigenvalues()).matrix();
        bool improved = false;
        for (int halve = 0; halve < 10 && !improved; ++halve) {
            InternalParams cand = mode;
            for (int d = 0; d < 3; ++d) cand[d] += step(d);
            const double fc = safe(cand);
            if (fc >= fmode) {
                mode = cand;
                fmode = fc;
                improved = true;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }

    ThetaGrid grid;
    grid.mode_z = mode;
    grid.mode = from_internal(mode);
    grid.log_post_mode = fmode;
    grid.neg_hess = -fd_hessian(safe, mode, h);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(grid.neg_hess);
    if (es.eigenvalues().minCoeff() > 0.0) {
        grid.hessian_pd = true;
        grid.z_basis = es.eigenvectors() *
                       es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal();
    } else {
        grid.hessian_pd = false;
        grid.z_basis = Eigen::Matrix3d::Identity();
    }

    // Breadth-first walk over the standardized lattice, keeping points whose
    // log-posterior drop from the mode stays within dz_drop.
    std::map<std::array<int, 3>, bool> visited;
    std::deque<std::array<int, 3>> queue;
    queue.push_back({0, 0, 0});
    visited[{0, 0, 0}] = true;
    const double threshold = fmode - config.dz_drop;

    while (!queue.empty()) {
        const std::array<int, 3> k = queue.front();
        queue.pop_front();

        InternalParams z = mode;
        const Eigen::Vector3d offset =
            grid.z_basis * Eigen::Vector3d(k[0], k[1], k[2]) * config.dz;
        for (int d = 0; d < 3; ++d) z[d] += offset(d);
        const double lp = (k == std::array<int, 3>{0, 0, 0}) ? fmode : safe(z);
        if (lp < threshold) continue;

        ThetaPoint pt;
        pt.z = z;
        pt.theta = from_internal(z);
        pt.k = k;
        pt.log_post = lp;
        grid.points.push_back(std::move(pt));
        if (grid.points.size() >= config.grid_max_points) {
            grid.truncated = true;
            break;
        }

        for (int d = 0; d < 3; ++d)
            for (int dir : {-1, +1}) {
                std::array<int, 3> nk = k;
                nk[d] += dir;
                if (!visited[nk]) {
                    visited[nk] = true;
                    queue.push_back(nk);
                }
            }
    }

    std::sort(grid.points.begin(), grid.points.end(),
              [](const ThetaPoint& a, const ThetaPoint& b) { return a.k < b.k; });

    double wsum = 0.0;
    for (auto& p : grid.points) {
        p.weight = std::exp(p.log_post - grid.log_post_mode);
        wsum += p.weight;
    }
    for (auto& p : grid.points) p.weight /= wsum;
    return grid;
}

ThetaGrid explore_theta(const SsmModel& model, const Dataset& data, const PriorSpec& prior,
                        const InlaConfig& config) {
    prior.validate();
    // Start at the prior means mapped to internal coordinates
    // (E[rho-tilde] = m_rho, E[sigma^-2] = a/b, E[alpha] = m_alpha).
    const InternalParams start{prior.m_rho, std::log(prior.a / prior.b), prior.m_alpha};
    auto objective = [&](const InternalParams& z) {
        return log_theta_posterior(model, data, z, prior, config, nullptr);
    };
    return explore_theta_fn(objective, start, config);
}

// ---------------------------------------------------------------------------
// Hyperparameter marginals

Marginal1D hyper_marginal_internal(const ThetaGrid& grid, std::size_t j,
                                   const InlaConfig& config) {
    if (grid.points.empty()) throw EmptyChain("hyper_marginal: empty grid");
    if (j > 2) throw IndexOutOfRange("hyper_marginal: axis index " + std::to_string(j));

    std::vector<double> u, mass;
    project_axis(grid, j, u, mass);
    if (u.size() == 1) return spike_marginal(u[0]);

    // Convert bin masses into log-density values at the bin centers.
    std::vector<double> logd(u.size());
    for (std::size_t q = 0; q < u.size(); ++q) {
        double width;
        if (q == 0)
            width = u[1] - u[0];
        else if (q + 1 == u.size())
            width = u[q] - u[q - 1];
        else
            width = 0.5 * (u[q + 1] - u[q - 1]);
        logd[q] = std::log(std::max(mass[q], 1e-300)) - std::log(width);
    }

    CubicSpline spline(u, logd);
    const std::size_t n = std::max<std::size_t>(config.marginal_points, 8);
    Marginal1D m;
    m.grid.resize(n);
    m.log_density.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.grid[i] = u.front() + (u.back() - u.front()) * static_cast<double>(i) / (n - 1);
        m.log_density[i] = spline(m.grid[i]);
    }
    m.log_norm = normalize_log_density(m.grid, m.log_density);
    return m;
}

Marginal1D hyper_marginal(const ThetaGrid& grid, std::size_t j, const InlaConfig& config) {
    Marginal1D mi = hyper_marginal_internal(grid, j, config);
    Marginal1D out;
    const std::size_t n = mi.grid.size();
    out.grid.resize(n);
    out.log_density.resize(n);
    if (j == 0) {
        // rho = tanh(u/2); density picks up |du/drho| = 2/(1 - rho^2)
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::tanh(0.5 * mi.grid[i]);
            out.grid[i] = r;
            out.log_density[i] = mi.log_density[i] + std::log(2.0 / (1.0 - r * r));
        }
    } else if (j == 1) {
        // sigma = exp(-u/2) is decreasing in u: reverse to keep the grid
        // ascending; |du/dsigma| = 2/sigma
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = n - 1 - i;
            const double s = std::exp(-0.5 * mi.grid[src]);
            out.grid[i] = s;
            out.log_density[i] = mi.log_density[src] + std::log(2.0 / s);
        }
    } else {
        out = mi;
    }
    out.log_norm = normalize_log_density(out.grid, out.log_density);
    return out;
}

// ---------------------------------------------------------------------------
// Latent marginals

std::vector<GaussianChain> chains_for_grid(const SsmModel& model, const Dataset& data,
                                           const ThetaGrid& grid, const InlaConfig& config) {
    std::vector<GaussianChain> chains;
    chains.reserve(grid.points.size());
    for (const auto& p : grid.points)
        chains.push_back(gaussian_approx(model, data, p.theta, config));
    return chains;
}

Marginal1D latent_marginal_gaussian(const ThetaGrid& grid, const std::vector<GaussianChain>& chains,
                                    std::size_t i, const InlaConfig& config) {
    if (chains.size() != grid.points.size())
        throw DimensionMismatch("latent_marginal_gaussian: chains/grid size mismatch");
    if (chains.empty()) throw EmptyChain("latent_marginal_gaussian: empty grid");
    if (i >= chains[0].mean.size())
        throw IndexOutOfRange("latent_marginal_gaussian: time index " + std::to_string(i));

    double mean, sd;
    mixture_moments(grid, chains, i, mean, sd);
    Marginal1D m;
    m.grid = marginal_abscissa(mean, sd, config);
    m.log_density.resize(m.grid.size());
    std::vector<double> terms(chains.size());
    for (std::size_t a = 0; a < m.grid.size(); ++a) {
        for (std::size_t k = 0; k < chains.size(); ++k)
            terms[k] = std::log(grid.points[k].weight) +
                       normal_logpdf(m.grid[a], chains[k].mean[i],
                                     std::sqrt(chains[k].pinv.var[i]));
        m.log_density[a] = log_sum_exp(terms);
    }
    m.log_norm = normalize_log_density(m.grid, m.log_density);
    return m;
}

namespace {

// Newton-optimize x_{-i} for fixed x_i (the chain splits into two independent
// tridiagonal segments) and return the nested-approximation value
//   log pi(x, y | theta) - log piG(x_{-i} | x_i) |_{mode},
// up to per-theta constants that cancel when the marginal is normalized.
double conditional_laplace_value(const SsmModel& model, const Dataset& data,
                                 const HyperParams& theta, const TridiagSym& Q, std::size_t i,
                                 std::vector<double>& x, const InlaConfig& config) {
    const std::size_t T = data.T;
    const std::size_t nl = i;          // left segment size: indices [0, i)
    const std::size_t nr = T - i - 1;  // right segment size: indices (i, T)

    double fx = joint_log_target(model, data, theta, Q, x);

    if (nl + nr > 0) {
        bool converged = false;
        for (std::size_t iter = 0; iter < config.newton_max_iter; ++iter) {
            std::vector<double> g = matvec(Q, x);
            double gnorm = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                g[t] = -g[t] + model.obs_score(data.y[t], x[t], theta);
                if (t != i) gnorm = std::max(gnorm, std::fabs(g[t]));
            }
            if (gnorm <= config.newton_tol) {
                converged = true;
                break;
            }

            std::vector<double> delta(T, 0.0);
            auto segment_step = [&](std::size_t lo, std::size_t len) {
                if (len == 0) return;
                std::vector<double> d(len), o(len - 1), rhs(len);
                for (std::size_t t = 0; t < len; ++t) {
                    d[t] = Q.diag[lo + t] +
                           model.obs_neg_curvature(data.y[lo + t], x[lo + t], theta);
                    rhs[t] = g[lo + t];
                    if (t + 1 < len) o[t] = Q.offdiag[lo + t];
                }
                TridiagSym Hs(len, std::move(d), std::move(o));
                const std::vector<double> sol = solve(cholesky(Hs), rhs);
                for (std::size_t t = 0; t < len; ++t) delta[lo + t] = sol[t];
            };
            segment_step(0, nl);
            segment_step(i + 1, nr);

            double step = 1.0;
            bool accepted = false;
            for (std::size_t h = 0; h <= config.newton_max_halvings; ++h) {
                std::vector<double> xn = x;
                for (std::size_t t = 0; t < T; ++t)
                    if (t != i) xn[t] = x[t] + step * delta[t];
                const double fn = joint_log_target(model, data, theta, Q, xn);
                if (fn >= fx) {
                    x = std::move(xn);
                    fx = fn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) throw NoConvergence("conditional ascent line search failed");
        }
        if (!converged) throw NoConvergence("conditional Newton did not converge");
    }

    // log-determinant of the conditional precision (two independent segments)
    double logdet_cond = 0.0;
    auto segment_logdet = [&](std::size_t lo, std::size_t len) {
        if (len == 0) return;
        std::vector<double> d(len), o(len - 1);
        for (std::size_t t = 0; t < len; ++t) {
            d[t] = Q.diag[lo + t] + model.obs_neg_curvature(data.y[lo + t], x[lo + t], theta);
            if (t + 1 < len) o[t] = Q.offdiag[lo + t];
        }
        logdet_cond += cholesky(TridiagSym(len, std::move(d), std::move(o))).logdet;
    };
    segment_logdet(0, nl);
    segment_logdet(i + 1, nr);

    const double log_denom_at_mode =
        -0.5 * static_cast<double>(nl + nr) * kLog2Pi + 0.5 * logdet_cond;
    return fx - log_denom_at_mode;
}

} // namespace

Marginal1D latent_marginal_laplace(const SsmModel& model, const Dataset& data,
                                   const ThetaGrid& grid, const std::vector<GaussianChain>& chains,
                                   std::size_t i, const InlaConfig& config) {
    if (data.T > config.laplace_T_cap)
        throw DimensionTooLarge("latent_marginal_laplace: T = " + std::to_string(data.T) +
                                " exceeds the cap " + std::to_string(config.laplace_T_cap));
    if (chains.size() != grid.points.size() || chains.empty())
        throw DimensionMismatch("latent_marginal_laplace: chains/grid size mismatch");
    if (i >= data.T) throw IndexOutOfRange("latent_marginal_laplace: time index");

    double mean, sd;
    mixture_moments(grid, chains, i, mean, sd);
    const std::vector<double> abscissa = marginal_abscissa(mean, sd, config);
    const std::size_t A = abscissa.size();

    // Per-theta normalized log-densities on the shared abscissa.
    std::vector<std::vector<double>> logd(grid.points.size(), std::vector<double>(A, kNegInf));
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
        const HyperParams& theta = grid.points[k].theta;
        const TridiagSym Q = ar1_prior_precision(data.T, theta);
        std::vector<double> x = chains[k].mean; // warm start, updated across abscissae
        std::vector<char> valid(A, 0);
        for (std::size_t a = 0; a < A; ++a) {
            x[i] = abscissa[a];
            try {
                logd[k][a] = conditional_laplace_value(model, data, theta, Q, i, x, config);
                valid[a] = 1;
            } catch (const NoConvergence&) {
                x = chains[k].mean; // reset the warm start after a failure
            }
        }
        // Interpolate over failed abscissae (linearly in log density).
        for (std::size_t a = 0; a < A; ++a) {
            if (valid[a]) continue;
            std::size_t lo = a, hi = a;
            while (lo > 0 && !valid[lo]) --lo;
            while (hi + 1 < A && !valid[hi]) ++hi;
            if (valid[lo] && valid[hi] && lo != hi) {
                const double f = (abscissa[a] - abscissa[lo]) / (abscissa[hi] - abscissa[lo]);
                logd[k][a] = (1.0 - f) * logd[k][lo] + f * logd[k][hi];
            } else if (valid[lo]) {
                logd[k][a] = logd[k][lo];
            } else if (valid[hi]) {
                logd[k][a] = logd[k][hi];
            } else {
                throw NoConvergence("latent_marginal_laplace: no valid abscissa for a grid point");
            }
        }
        normalize_log_density(abscissa, logd[k]);
    }

    Marginal1D m;
    m.grid = abscissa;
    m.log_density.resize(A);
    std::vector<double> terms(grid.points.size());
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t k = 0; k < grid.points.size(); ++k)
            terms[k] = std::log(grid.points[k].weight) + logd[k][a];
        m.log_density[a] = log_sum_exp(terms);
    }
    m.log_norm = normalize_log_density(m.grid, m.log_density);
    return m;
}

// ---------------------------------------------------------------------------

InlaFit run_inla(const SsmModel& model, const Dataset& data, const PriorSpec& prior,
                 const InlaConfig& config) {
    InlaFit fit;
    fit.grid = explore_theta(model, data, prior, config);
    const std::vector<GaussianChain> chains = chains_for_grid(model, data, fit.grid, config);
    fit.rho_marginal = hyper_marginal(fit.grid, 0, config);
    fit.sigma_marginal = hyper_marginal(fit.grid, 1, config);
    fit.alpha_marginal = hyper_marginal(fit.grid, 2, config);
    fit.latent_mean.resize(data.T);
    fit.latent_sd.resize(data.T);
    for (std::size_t t = 0; t < data.T; ++t)
        mixture_moments(fit.grid, chains, t, fit.latent_mean[t], fit.latent_sd[t]);
    return fit;
}

} // namespace inlapf
