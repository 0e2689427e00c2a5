#pragma once

#include <cstdint>
#include <optional>

#include "hbaca/factor_core.hpp"
#include "hbaca/history.hpp"
#include "hbaca/kernels.hpp"

namespace hbaca {

struct BacaConfig {
  Index block_size = 16;  // d
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::optional<Index> max_rank;
  Index max_degenerate_retries = 3;
  /// Overrides the random first column block.
  std::optional<IndexList> initial_columns;
};

/// Rows and columns picked for one iteration plus the residual blocks they index.
template <Scalar T>
struct PivotSelection {
  IndexList rows;       // I_k, QRCP order
  IndexList next_cols;  // J_{k+1}, QRCP order
  DenseMatrix<T> c;     // E(:, J_k)
  DenseMatrix<T> r;     // E(I_k, :)
  DenseMatrix<T> w;     // E(I_k, J_k)
};

/// Residual-column/row QRCP block selection. `u`, `v` are the factors
/// accumulated so far; rows/columns flagged in `used_*` are excluded.
template <Scalar T>
PivotSelection<T> select_pivot_blocks(const EntryOracle<T>& oracle, ConstMatrixRef<T> u,
                                      ConstMatrixRef<T> v, const IndexList& cols,
                                      const std::vector<bool>& used_rows,
                                      const std::vector<bool>& used_cols, Index block_size);

template <Scalar T>
struct LridResult {
  DenseMatrix<T> u;  // m x d_k, selected columns of C
  DenseMatrix<T> v;  // d_k x n
  Index rank = 0;    // d_k
  IndexList order;   // column pivots of W (full permutation)
};

/// C W^+ R realized as U V through a tolerance-truncated QRCP of W.
template <Scalar T>
LridResult<T> lrid(const DenseMatrix<T>& c, const DenseMatrix<T>& w, const DenseMatrix<T>& r,
                   double eps);

template <Scalar T>
struct BacaResult {
  TruncatedSvd<T> svd;        // after recompression
  LowRankFactors<T> raw;      // accumulated factors before recompression
  ConvergenceHistory history;
  Index degenerate_retries = 0;
};

/// Blocked ACA followed by SVD recompression of the accumulated factors.
template <Scalar T>
BacaResult<T> baca_compress(const EntryOracle<T>& oracle, const BacaConfig& cfg);

}  // namespace hbaca
