#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "hbaca/matrix.hpp"

namespace hbaca {

/// Run exactly `rank` pivoting steps (fewer only if the trailing block is exactly zero).
struct FixedRank {
  Index rank;
};

/// Stop at the first step i with |T(i,i)| <= eps * |T(0,0)|.
struct RelativeTolerance {
  double eps;
};

using QrcpStop = std::variant<FixedRank, RelativeTolerance>;

/// A(:, pivots[0:rank]) = Q * T(:, 0:rank), with T upper trapezoidal in pivot order.
template <Scalar T>
struct QrcpResult {
  DenseMatrix<T> q;  // m x rank
  DenseMatrix<T> t;  // rank x n
  IndexList pivots;  // full column permutation, length n
  Index rank = 0;
};

/// A ~ U * diag(sigma) * Vt with orthonormal U columns and Vt rows.
template <Scalar T>
struct TruncatedSvd {
  DenseMatrix<T> u;   // m x r
  RealVector sigma;   // r, nonincreasing
  DenseMatrix<T> vt;  // r x n

  Index rank() const { return sigma.size(); }
  Index rows() const { return u.rows(); }
  Index cols() const { return vt.cols(); }
};

/// A ~ U * V. `sigma` is set only when (U, sigma, V) is in SVD form.
template <Scalar T>
struct LowRankFactors {
  DenseMatrix<T> u;  // m x r
  DenseMatrix<T> v;  // r x n
  std::optional<RealVector> sigma;

  Index rank() const { return u.cols(); }
  Index rows() const { return u.rows(); }
  Index cols() const { return v.cols(); }
};

/// Relative tolerance used to treat two pivot candidates as tied.
inline constexpr double kPivotTieTolerance = 1e-14;

/// Downdated column norms are recomputed once the squared ratio to the last
/// exactly-computed norm drops below this value.
inline constexpr double kNormRecomputeThreshold = 1e-7;

/// Position of the largest value in `values` restricted to `allowed[i] == true`.
/// Values within kPivotTieTolerance (relative) of the maximum count as ties and
/// the lowest position wins. Returns -1 when nothing is allowed.
Index argmax_with_ties(const RealVector& values, const std::vector<bool>& allowed);

/// Householder QR with greedy column pivoting on running column norms.
template <Scalar T>
QrcpResult<T> qrcp(const DenseMatrix<T>& a, const QrcpStop& stop);

/// Number of leading singular values with sigma_k >= eps * sigma_0 (0 if sigma_0 == 0).
Index epsilon_rank(const RealVector& sigma, double eps);

template <Scalar T>
TruncatedSvd<T> truncated_svd(const DenseMatrix<T>& a, double eps);

/// Upper-triangular T with T^H T = A, or nullopt when a nonpositive pivot appears.
/// Throws InvalidArgument for non-square or non-Hermitian input.
template <Scalar T>
std::optional<DenseMatrix<T>> cholesky(const DenseMatrix<T>& a);

/// Thin Householder QR: A = Q R with Q m x min(m,n).
template <Scalar T>
std::pair<DenseMatrix<T>, DenseMatrix<T>> thin_qr(const DenseMatrix<T>& a);

/// ||U V||_F from the Cholesky factors of the two Gram matrices.
template <Scalar T>
double lr_norm(const DenseMatrix<T>& u, const DenseMatrix<T>& v);

/// ||[U, Ub] [V; Vb]||_F given mu = ||U V||_F and nu = ||Ub Vb||_F.
template <Scalar T>
double lr_norm_update(const DenseMatrix<T>& u, const DenseMatrix<T>& v, double mu,
                      const DenseMatrix<T>& ub, const DenseMatrix<T>& vb, double nu);

struct NormPair {
  double nu;  // norm of the trailing block
  double mu;  // norm of the whole product
};

/// Same quantities as lr_norm + lr_norm_update where U, V already hold the
/// appended block in columns/rows [prev_rank, end). Gram products are taken
/// against the concatenated factors in one pass.
template <Scalar T>
NormPair lr_norm_appended(ConstMatrixRef<T> u, ConstMatrixRef<T> v, Index prev_rank,
                          double mu_prev);

/// QR of both factors followed by a truncated SVD of the small core.
template <Scalar T>
TruncatedSvd<T> lr_recompress(const DenseMatrix<T>& u, const DenseMatrix<T>& v, double eps);

template <Scalar T>
DenseMatrix<T> to_dense(const TruncatedSvd<T>& s) {
  return s.u * s.sigma.template cast<T>().asDiagonal() * s.vt;
}

template <Scalar T>
DenseMatrix<T> to_dense(const LowRankFactors<T>& f) {
  if (f.sigma) return f.u * f.sigma->template cast<T>().asDiagonal() * f.v;
  return f.u * f.v;
}

template <Scalar T>
LowRankFactors<T> as_factors(const TruncatedSvd<T>& s) {
  return {s.u, s.vt, s.sigma};
}

}  // namespace hbaca
