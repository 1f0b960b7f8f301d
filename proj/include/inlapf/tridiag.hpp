#ifndef INLAPF_TRIDIAG_HPP
#define INLAPF_TRIDIAG_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "inlapf/errors.hpp"
#include "inlapf/rng.hpp"

namespace inlapf {

/// Symmetric tridiagonal matrix of order n: diag has length n, offdiag
/// (the single sub/super-diagonal) has length n−1.
struct TridiagSym {
    std::size_t n = 0;
    std::vector<double> diag;
    std::vector<double> offdiag;

    TridiagSym() = default;
    TridiagSym(std::size_t n_, std::vector<double> diag_, std::vector<double> offdiag_);

    static TridiagSym identity(std::size_t n);
};

/// Lower-bidiagonal Cholesky factor L of a TridiagSym Q = L·Lᵀ:
/// L(i,i) = d[i], L(i+1,i) = e[i].  logdet = log|Q| = 2·Σ log d[i].
struct CholBidiag {
    std::vector<double> d;
    std::vector<double> e;
    double logdet = 0.0;

    std::size_t n() const { return d.size(); }
};

/// Diagonal and first superdiagonal of Q⁻¹: var[t] = (Q⁻¹)(t,t),
/// cov1[t] = (Q⁻¹)(t,t+1).
struct PartialInverse {
    std::vector<double> var;
    std::vector<double> cov1;
};

/// Factor Q = L·Lᵀ.  Throws NotPositiveDefinite (naming the failing pivot)
/// when a pivot is ≤ 1e-300.
CholBidiag cholesky(const TridiagSym& Q);

/// Solve Q·x = b given the factor of Q.
std::vector<double> solve(const CholBidiag& L, const std::vector<double>& b);

/// Solve the half-system Lᵀ·x = z (used for sampling: x ~ N(0, Q⁻¹)).
std::vector<double> solve_upper(const CholBidiag& L, const std::vector<double>& z);

/// Draw mean + Lᵀ⁻¹·z with z standard normal, i.e. a sample from N(mean, Q⁻¹).
std::vector<double> sample_gaussian(const CholBidiag& L, const std::vector<double>& mean, Rng& rng);

/// Backward Takahashi recursion: marginal variances and lag-one covariances
/// of N(·, Q⁻¹) in O(n).
PartialInverse partial_inverse(const CholBidiag& L);

/// y = Q·x.
std::vector<double> matvec(const TridiagSym& Q, const std::vector<double>& x);

/// xᵀ·Q·x.
double quad_form(const TridiagSym& Q, const std::vector<double>& x);

/// log N(x; mean, Q⁻¹) using a precomputed factor of Q.
double gmrf_logpdf(const TridiagSym& Q, const CholBidiag& L,
                   const std::vector<double>& mean, const std::vector<double>& x);

/// Dense n×n mirror of Q (guarded: n ≤ 512).
Eigen::MatrixXd to_dense(const TridiagSym& Q);

struct DenseSummary {
    Eigen::MatrixXd inverse;
    double logdet = 0.0;
};

/// Full inverse and log-determinant via dense routines; test/diagnostic use
/// only, hence the n ≤ 512 guard (DimensionTooLarge beyond it).
DenseSummary dense_oracle(const TridiagSym& Q);

} // namespace inlapf

#endif
