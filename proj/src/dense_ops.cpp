#include "hbaca/dense_ops.hpp"

#include <cmath>
#include <numeric>

namespace hbaca {

namespace {

constexpr Index kColumnChunk = 32;

}  // namespace

template <Scalar T>
DenseMatrix<T> densify(const EntryOracle<T>& oracle, int workers) {
  if (workers <= 1) return densify_serial(oracle);
  const Index m = oracle.rows();
  const Index n = oracle.cols();
  DenseMatrix<T> a(m, n);
  IndexList rows(m);
  std::iota(rows.begin(), rows.end(), Index{0});
  const Index chunks = (n + kColumnChunk - 1) / kColumnChunk;

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (Index c = 0; c < chunks; ++c) {
    const Index lo = c * kColumnChunk;
    const Index hi = std::min(n, lo + kColumnChunk);
    IndexList cols(hi - lo);
    std::iota(cols.begin(), cols.end(), lo);
    DenseMatrix<T> block;
    oracle.fill(rows, cols, block);
    a.middleCols(lo, hi - lo) = block;
  }
  return a;
}

double ErrorNorms::relative() const {
  if (reference == 0.0) return residual == 0.0 ? 0.0 : INFINITY;
  return residual / reference;
}

namespace {

template <Scalar T>
DenseMatrix<T> left_factor(const LowRankFactors<T>& f) {
  if (f.sigma) return f.u * f.sigma->template cast<T>().asDiagonal();
  return f.u;
}

template <Scalar T>
void check_shapes(const DenseMatrix<T>& a, const LowRankFactors<T>& f) {
  if (f.u.rows() != a.rows() || f.v.cols() != a.cols() || f.u.cols() != f.v.rows())
    throw InvalidArgument("frobenius_error: factor shapes do not match the matrix");
}

}  // namespace

template <Scalar T>
ErrorNorms frobenius_error(const DenseMatrix<T>& a, const LowRankFactors<T>& approx, int workers) {
  if (workers <= 1) return frobenius_error_serial(a, approx);
  check_shapes(a, approx);
  const DenseMatrix<T> us = left_factor(approx);
  const Index n = a.cols();
  RealVector res(n), ref(n);

#pragma omp parallel for schedule(static) num_threads(workers)
  for (Index j = 0; j < n; ++j) {
    DenseVector<T> col = a.col(j);
    ref[j] = col.squaredNorm();
    col.noalias() -= us * approx.v.col(j);
    res[j] = col.squaredNorm();
  }
  double res_sum = 0.0, ref_sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    res_sum += res[j];
    ref_sum += ref[j];
  }
  return {std::sqrt(res_sum), std::sqrt(ref_sum)};
}

template <Scalar T>
ErrorNorms frobenius_error_serial(const DenseMatrix<T>& a, const LowRankFactors<T>& approx) {
  check_shapes(a, approx);
  const DenseMatrix<T> us = left_factor(approx);
  double res_sum = 0.0, ref_sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    DenseVector<T> col = a.col(j);
    ref_sum += col.squaredNorm();
    col.noalias() -= us * approx.v.col(j);
    res_sum += col.squaredNorm();
  }
  return {std::sqrt(res_sum), std::sqrt(ref_sum)};
}

#define HBACA_INSTANTIATE(T)                                                                    \
  template DenseMatrix<T> densify<T>(const EntryOracle<T>&, int);                               \
  template ErrorNorms frobenius_error<T>(const DenseMatrix<T>&, const LowRankFactors<T>&, int); \
  template ErrorNorms frobenius_error_serial<T>(const DenseMatrix<T>&, const LowRankFactors<T>&);

HBACA_INSTANTIATE(Real)
HBACA_INSTANTIATE(Complex)

#undef HBACA_INSTANTIATE

}  // namespace hbaca
