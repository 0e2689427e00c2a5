#pragma once

#include <cstdint>
#include <optional>

#include "hbaca/factor_core.hpp"
#include "hbaca/history.hpp"
#include "hbaca/kernels.hpp"

namespace hbaca {

struct AcaConfig {
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::optional<Index> max_rank;
  /// A pivot with |u(i_k)| <= factor * (largest pivot so far) ends the run as degenerate.
  double zero_pivot_factor = 1e-14;
  /// Overrides the random first column.
  std::optional<Index> initial_column;
};

template <Scalar T>
struct AcaResult {
  LowRankFactors<T> factors;
  ConvergenceHistory history;
};

/// Partially pivoted adaptive cross approximation with the incremental
/// Frobenius-norm stopping test nu < eps * mu.
template <Scalar T>
AcaResult<T> aca_compress(const EntryOracle<T>& oracle, const AcaConfig& cfg);

}  // namespace hbaca
