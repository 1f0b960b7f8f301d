#ifndef INLAPF_KALMAN_HPP
#define INLAPF_KALMAN_HPP

#include <vector>

#include "inlapf/model.hpp"

namespace inlapf {

/// Output of the exact filter for the linear-Gaussian model
/// y_t = x_t + α + ε_t, ε_t ~ N(0, obs_noise²) over the AR(1) latent chain.
struct KalmanResult {
    double loglik = 0.0;
    std::vector<double> filt_mean; // E[x_t | y_{1:t}]
    std::vector<double> filt_var;  // Var[x_t | y_{1:t}]
};

KalmanResult kalman_filter(const std::vector<double>& y, const HyperParams& theta,
                           double obs_noise);

/// Exact log p_θ(y_{1:T}) for the linear-Gaussian model.
double kalman_loglik(const Dataset& data, const HyperParams& theta, double obs_noise);

} // namespace inlapf

#endif
