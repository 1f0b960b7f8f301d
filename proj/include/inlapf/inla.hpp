#ifndef INLAPF_INLA_HPP
#define INLAPF_INLA_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "inlapf/model.hpp"
#include "inlapf/tridiag.hpp"

namespace inlapf {

/// Tuning constants for the approximation engine.  Defaults are the
/// documented ones; tests that need finer grids or wider exploration
/// override individual fields.
struct InlaConfig {
    // Newton iteration for the latent-field mode
    double newton_tol = 1e-8;       // gradient infinity-norm target
    std::size_t newton_max_iter = 100;
    std::size_t newton_max_halvings = 30;

    // Hyperparameter exploration
    double hess_step = 1e-3;        // finite-difference step on the internal scale
    double dz = 1.0;                // lattice spacing in standardized z-coordinates
    double dz_drop = 2.5;           // keep points with log-posterior drop <= dz_drop
    std::size_t grid_max_points = 5000;

    // Simplex optimizer for the theta mode
    std::size_t simplex_max_iter = 2000;
    double simplex_ftol = 1e-12;
    double simplex_xtol = 1e-8;

    // Marginal construction
    std::size_t abscissa_points = 31;  // latent-marginal abscissa size
    double abscissa_span = 5.0;        // +/- this many sd around the mixture mean
    std::size_t marginal_points = 201; // smooth grid for hyperparameter marginals
    std::size_t laplace_T_cap = 200;   // guard for the nested (expensive) form
};

/// Gaussian approximation N(mean, prec^{-1}) of pi(x | theta, y), with the
/// factor and the marginal (co)variances cached.
struct GaussianChain {
    std::vector<double> mean;
    TridiagSym prec;
    CholBidiag chol;
    PartialInverse pinv;
    std::size_t newton_iters = 0;
};

/// One explored hyperparameter point.
struct ThetaPoint {
    HyperParams theta;
    InternalParams z;           // internal coordinates (rho-tilde, log sigma^-2, alpha)
    std::array<int, 3> k;       // lattice index in standardized coordinates
    double log_post = 0.0;      // unnormalized log posterior (internal scale)
    double weight = 0.0;        // normalized integration weight (sums to 1)
};

/// Exploration result: lattice of points around the posterior mode plus the
/// standardizing geometry used to lay the lattice out.
struct ThetaGrid {
    std::vector<ThetaPoint> points;
    HyperParams mode;
    InternalParams mode_z{};
    double log_post_mode = 0.0;
    Eigen::Matrix3d neg_hess;   // negative Hessian of the log posterior at the mode
    Eigen::Matrix3d z_basis;    // columns map unit z-steps to internal offsets
    bool hessian_pd = true;     // false -> identity scaling fallback was used
    bool truncated = false;     // true -> point cap hit before exhausting the region
};

/// One-dimensional density on a grid; log_density is normalized so the
/// trapezoid integral of its exponential equals 1.
struct Marginal1D {
    std::vector<double> grid;
    std::vector<double> log_density;
    double log_norm = 0.0; // log of the constant removed during normalization

    double density(std::size_t i) const;
    double argmax() const;
    double mean() const;
    double sd() const;
    /// Linear interpolation of the density (0 outside the grid).
    double interp_density(double x) const;
};

/// Normalize a gridded log-density in place (trapezoid rule); returns the
/// log normalizing constant that was subtracted.
double normalize_log_density(const std::vector<double>& grid, std::vector<double>& log_density);

/// Newton-match the mode and curvature of x -> -x'Qx/2 + sum_t log g(y_t|x_t)
/// starting from x = 0, with step-halving to force ascent.
GaussianChain gaussian_approx(const SsmModel& model, const Dataset& data,
                              const HyperParams& theta, const InlaConfig& config = {});

/// Unnormalized log posterior of the hyperparameters (internal scale):
/// log pi(z) + log N(m; 0, Q^{-1}) + sum log g(y|m) - log piG(m), evaluated
/// at the Gaussian approximation's mode m.  Optionally hands back the chain.
double log_theta_posterior(const SsmModel& model, const Dataset& data, const InternalParams& z,
                           const PriorSpec& prior, const InlaConfig& config = {},
                           GaussianChain* chain_out = nullptr);
double log_theta_posterior(const SsmModel& model, const Dataset& data, const HyperParams& theta,
                           const PriorSpec& prior, const InlaConfig& config = {});

/// Core exploration routine over an arbitrary objective on the internal
/// scale: simplex ascent + Newton polish, finite-difference Hessian,
/// standardized lattice kept while the log-drop stays within dz_drop.
ThetaGrid explore_theta_fn(const std::function<double(const InternalParams&)>& log_post,
                           const InternalParams& start, const InlaConfig& config = {});

/// Exploration of the actual model posterior, started from the prior means.
ThetaGrid explore_theta(const SsmModel& model, const Dataset& data, const PriorSpec& prior,
                        const InlaConfig& config = {});

/// Marginal of internal coordinate j from the grid weights: bin, smooth,
/// normalize.  No change of variables.
Marginal1D hyper_marginal_internal(const ThetaGrid& grid, std::size_t j,
                                   const InlaConfig& config = {});

/// Marginal of the j-th hyperparameter on the natural scale
/// (j = 0: rho, 1: sigma, 2: alpha), with the change-of-variables Jacobian.
Marginal1D hyper_marginal(const ThetaGrid& grid, std::size_t j, const InlaConfig& config = {});

/// Gaussian approximations at every grid point (ordered like grid.points).
std::vector<GaussianChain> chains_for_grid(const SsmModel& model, const Dataset& data,
                                           const ThetaGrid& grid, const InlaConfig& config = {});

/// Latent marginal at time index i (0-based) as the weighted mixture of the
/// per-point Gaussian approximations.
Marginal1D latent_marginal_gaussian(const ThetaGrid& grid, const std::vector<GaussianChain>& chains,
                                    std::size_t i, const InlaConfig& config = {});

/// Latent marginal at time index i via the nested approximation: for each
/// abscissa, re-optimize the remaining states conditional on x_i and take
/// the ratio of the joint density to the conditional Gaussian's value at its
/// mode; then mix over the hyperparameter grid.
Marginal1D latent_marginal_laplace(const SsmModel& model, const Dataset& data,
                                   const ThetaGrid& grid, const std::vector<GaussianChain>& chains,
                                   std::size_t i, const InlaConfig& config = {});

/// Full fit bundle produced by the `inla-fit` front end.
struct InlaFit {
    ThetaGrid grid;
    Marginal1D rho_marginal;
    Marginal1D sigma_marginal;
    Marginal1D alpha_marginal;
    std::vector<double> latent_mean; // mixture mean per time step
    std::vector<double> latent_sd;   // mixture sd per time step
};

InlaFit run_inla(const SsmModel& model, const Dataset& data, const PriorSpec& prior,
                 const InlaConfig& config = {});

} // namespace inlapf

#endif
