#include "inlapf/kalman.hpp"

#include <cmath>

namespace inlapf {

KalmanResult kalman_filter(const std::vector<double>& y, const HyperParams& theta,
                           double obs_noise) {
    theta.validate();
    if (!(obs_noise > 0.0)) throw InvalidParams("kalman_filter: obs_noise must be > 0");
    if (y.empty()) throw DimensionMismatch("kalman_filter: empty observation vector");

    const double rho = theta.rho;
    const double s2 = theta.sigma * theta.sigma;
    const double r2 = obs_noise * obs_noise;

    KalmanResult out;
    out.filt_mean.resize(y.size());
    out.filt_var.resize(y.size());

    double m = 0.0;
    double P = s2 / (1.0 - rho * rho); // stationary prior for x_1
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (t > 0) {
            m = rho * m;
            P = rho * rho * P + s2;
        }
        const double innov = y[t] - (m + theta.alpha);
        const double S = P + r2;
        out.loglik += normal_logpdf(innov, 0.0, std::sqrt(S));
        const double K = P / S;
        m += K * innov;
        P *= 1.0 - K;
        out.filt_mean[t] = m;
        out.filt_var[t] = P;
    }
    return out;
}

double kalman_loglik(const Dataset& data, const HyperParams& theta, double obs_noise) {
    return kalman_filter(data.y, theta, obs_noise).loglik;
}

} // namespace inlapf
