#ifndef INLAPF_QUADRATURE_HPP
#define INLAPF_QUADRATURE_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "inlapf/inla.hpp"
#include "inlapf/model.hpp"

namespace inlapf {

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on the
/// Legendre recurrence), exact for polynomials of degree 2n-1.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n);

    /// Same rule mapped to [a, b].
    GaussLegendre scaled(double a, double b) const;
};

/// Brute-force reference for tiny chains: tensor/transfer-operator
/// integration of mu(x1) g(y1|x1) prod_t f(x_t|x_{t-1}) g(y_t|x_t) over a
/// per-coordinate Gauss–Legendre grid.  Only meant for T <= 4.
class ChainQuadrature {
public:
    ChainQuadrature(const SsmModel& model, const Dataset& data, const HyperParams& theta,
                    std::size_t nodes_per_dim = 64, double span_sd = 10.0);

    /// log integral of the joint over all latent coordinates: log p(y|theta).
    double log_marginal_lik() const { return log_marginal_; }

    /// Log of the unnormalized marginal density of x_i at point a, i.e.
    /// log p(y, x_i = a | theta); normalizing exp of it over a grid of
    /// a-values reproduces p(x_i = a | y, theta).
    double log_joint_marginal(std::size_t i, double a) const;

private:
    const SsmModel& model_;
    const Dataset& data_;
    HyperParams theta_;
    std::vector<std::vector<double>> x_, w_;  // per-coordinate nodes/weights
    std::vector<std::vector<double>> fwd_;    // forward transfer values at nodes
    std::vector<std::vector<double>> bwd_;    // backward transfer values at nodes
    double log_marginal_ = 0.0;
    // Cumulative log rescaling applied to fwd_/bwd_ values (numerical range control).
    std::vector<double> fwd_scale_, bwd_scale_;
};

/// Tensor-product Gauss–Legendre posterior summary over the internal
/// hyperparameter coordinates for an arbitrary exact log-likelihood:
/// posterior ~ exp(loglik(z) + log prior(z)).  The box is centered on the
/// posterior mode (found with the exploration routine) and spans
/// +/- span_sd marginal standard deviations per axis.
struct PosteriorQuadrature {
    std::array<double, 3> mean_internal{};  // E[z]
    std::array<double, 3> mean_natural{};   // E[rho], E[sigma], E[alpha]
    std::array<double, 3> sd_natural{};
    double log_evidence = 0.0;              // up to the box truncation
};

PosteriorQuadrature posterior_quadrature(
    const std::function<double(const InternalParams&)>& loglik,
    const PriorSpec& prior, std::size_t nodes_per_axis = 24, double span_sd = 8.0,
    const InlaConfig& explore_config = {});

} // namespace inlapf

#endif
