#pragma once

#include "hbaca/factor_core.hpp"
#include "hbaca/kernels.hpp"

namespace hbaca {

/// Full evaluation of an oracle, column blocks spread over `workers` OpenMP
/// threads. Entries are written exactly once so the result is identical to
/// densify_serial.
template <Scalar T>
DenseMatrix<T> densify(const EntryOracle<T>& oracle, int workers);

struct ErrorNorms {
  double residual = 0.0;  // ||A - approx||_F
  double reference = 0.0; // ||A||_F

  /// residual / reference; 0 when both vanish.
  double relative() const;
};

/// ||A - U diag(sigma) V||_F and ||A||_F. Per-column partial sums are reduced in
/// column order, so the parallel result matches the serial one bit for bit.
template <Scalar T>
ErrorNorms frobenius_error(const DenseMatrix<T>& a, const LowRankFactors<T>& approx, int workers);

template <Scalar T>
ErrorNorms frobenius_error_serial(const DenseMatrix<T>& a, const LowRankFactors<T>& approx);

}  // namespace hbaca
