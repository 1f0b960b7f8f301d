#ifndef INLAPF_NUMERIC_HPP
#define INLAPF_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace inlapf {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum_i exp(v_i)) guarded against overflow; -inf for empty/all -inf.
inline double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Trapezoid integral of y over a (non-uniform, ascending) grid x.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

} // namespace inlapf

#endif
