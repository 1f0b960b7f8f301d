#include "inlapf/tridiag.hpp"

#include <cmath>
#include <string>

namespace inlapf {

namespace {
constexpr double kPivotTol = 1e-300;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr std::size_t kDenseGuard = 512;

void check_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DimensionMismatch(std::string(what) + ": length " + std::to_string(got) +
                                ", expected " + std::to_string(want));
}
} // namespace

TridiagSym::TridiagSym(std::size_t n_, std::vector<double> diag_, std::vector<double> offdiag_)
    : n(n_), diag(std::move(diag_)), offdiag(std::move(offdiag_)) {
    if (n < 1) throw DimensionMismatch("TridiagSym: n must be >= 1");
    check_length(diag.size(), n, "TridiagSym diag");
    check_length(offdiag.size(), n - 1, "TridiagSym offdiag");
}

TridiagSym TridiagSym::identity(std::size_t n) {
    return TridiagSym(n, std::vector<double>(n, 1.0), std::vector<double>(n - 1, 0.0));
}

CholBidiag cholesky(const TridiagSym& Q) {
    const std::size_t n = Q.n;
    CholBidiag L;
    L.d.resize(n);
    L.e.resize(n - 1);
    double logdet = 0.0;
    double pivot = Q.diag[0];
    for (std::size_t i = 0;; ++i) {
        if (!(pivot > kPivotTol))
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(i) + " = " +
                                      std::to_string(pivot) + " is not positive");
        L.d[i] = std::sqrt(pivot);
        logdet += std::log(pivot);
        if (i + 1 == n) break;
        L.e[i] = Q.offdiag[i] / L.d[i];
        pivot = Q.diag[i + 1] - L.e[i] * L.e[i];
    }
    L.logdet = logdet;
    return L;
}

std::vector<double> solve(const CholBidiag& L, const std::vector<double>& b) {
    const std::size_t n = L.n();
    check_length(b.size(), n, "solve rhs");
    std::vector<double> x(n);
    x[0] = b[0] / L.d[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (b[i] - L.e[i - 1] * x[i - 1]) / L.d[i];
    x[n - 1] /= L.d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - L.e[i] * x[i + 1]) / L.d[i];
    return x;
}

std::vector<double> solve_upper(const CholBidiag& L, const std::vector<double>& z) {
    const std::size_t n = L.n();
    check_length(z.size(), n, "solve_upper rhs");
    std::vector<double> x(n);
    x[n - 1] = z[n - 1] / L.d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (z[i] - L.e[i] * x[i + 1]) / L.d[i];
    return x;
}

std::vector<double> sample_gaussian(const CholBidiag& L, const std::vector<double>& mean, Rng& rng) {
    const std::size_t n = L.n();
    check_length(mean.size(), n, "sample_gaussian mean");
    std::vector<double> z(n);
    for (auto& zi : z) zi = rng.normal();
    std::vector<double> x = solve_upper(L, z);
    for (std::size_t i = 0; i < n; ++i) x[i] += mean[i];
    return x;
}

PartialInverse partial_inverse(const CholBidiag& L) {
    const std::size_t n = L.n();
    PartialInverse out;
    out.var.resize(n);
    out.cov1.resize(n - 1);
    out.var[n - 1] = 1.0 / (L.d[n - 1] * L.d[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double r = L.e[i] / L.d[i];
        out.cov1[i] = -r * out.var[i + 1];
        out.var[i] = 1.0 / (L.d[i] * L.d[i]) - r * out.cov1[i];
    }
    return out;
}

std::vector<double> matvec(const TridiagSym& Q, const std::vector<double>& x) {
    const std::size_t n = Q.n;
    check_length(x.size(), n, "matvec operand");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = Q.diag[i] * x[i];
        if (i > 0) v += Q.offdiag[i - 1] * x[i - 1];
        if (i + 1 < n) v += Q.offdiag[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

double quad_form(const TridiagSym& Q, const std::vector<double>& x) {
    const std::size_t n = Q.n;
    check_length(x.size(), n, "quad_form operand");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += Q.diag[i] * x[i] * x[i];
        if (i + 1 < n) s += 2.0 * Q.offdiag[i] * x[i] * x[i + 1];
    }
    return s;
}

double gmrf_logpdf(const TridiagSym& Q, const CholBidiag& L,
                   const std::vector<double>& mean, const std::vector<double>& x) {
    const std::size_t n = Q.n;
    check_length(mean.size(), n, "gmrf_logpdf mean");
    check_length(x.size(), n, "gmrf_logpdf point");
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - mean[i];
    return -0.5 * static_cast<double>(n) * kLog2Pi + 0.5 * L.logdet - 0.5 * quad_form(Q, c);
}

Eigen::MatrixXd to_dense(const TridiagSym& Q) {
    if (Q.n > kDenseGuard)
        throw DimensionTooLarge("to_dense: n = " + std::to_string(Q.n) + " exceeds " +
                                std::to_string(kDenseGuard));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(Q.n),
                                              static_cast<Eigen::Index>(Q.n));
    for (std::size_t i = 0; i < Q.n; ++i) {
        M(i, i) = Q.diag[i];
        if (i + 1 < Q.n) {
            M(i, i + 1) = Q.offdiag[i];
            M(i + 1, i) = Q.offdiag[i];
        }
    }
    return M;
}

DenseSummary dense_oracle(const TridiagSym& Q) {
    const Eigen::MatrixXd M = to_dense(Q);
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("dense_oracle: dense Cholesky failed");
    DenseSummary out;
    out.inverse = llt.solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
    out.logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return out;
}

} // namespace inlapf
