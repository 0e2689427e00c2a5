#pragma once

#include <cstdint>
#include <vector>

#include "hbaca/baca.hpp"
#include "hbaca/factor_core.hpp"
#include "hbaca/kernels.hpp"

namespace hbaca {

/// Half-open index range [lo, hi).
struct Range {
  Index lo = 0;
  Index hi = 0;
  Index size() const { return hi - lo; }
  bool operator==(const Range&) const = default;
};

/// Binary tree over [0, extent) with `levels` midpoint splits. Level numbering
/// follows the merge: level 0 holds the 2^L leaves, level L the root.
class IndexTree {
 public:
  IndexTree(Index extent, Index levels);

  Index levels() const { return levels_; }
  Index extent() const { return extent_; }
  /// Number of nodes at a level: 2^(L - level).
  Index width(Index level) const { return Index{1} << (levels_ - level); }
  const Range& node(Index level, Index i) const { return nodes_[level][i]; }
  const std::vector<Range>& leaves() const { return nodes_[0]; }

 private:
  Index extent_;
  Index levels_;
  std::vector<std::vector<Range>> nodes_;
};

IndexTree build_index_tree(Index extent, Index levels);

/// Truncated SVD of the block A(rows, cols).
template <Scalar T>
struct BlockSvd {
  Range rows;
  Range cols;
  TruncatedSvd<T> svd;
};

/// [left, right] -> one SVD; inputs share their row range and are column-adjacent.
template <Scalar T>
BlockSvd<T> merge_pair_horizontal(const BlockSvd<T>& left, const BlockSvd<T>& right, double eps);

/// [top; bottom] -> one SVD; inputs share their column range and are row-adjacent.
template <Scalar T>
BlockSvd<T> merge_pair_vertical(const BlockSvd<T>& top, const BlockSvd<T>& bottom, double eps);

struct LeafReport {
  Range rows;
  Range cols;
  Index rank = 0;      // after recompression
  Index raw_rank = 0;  // accumulated BACA rank
  Index iterations = 0;
  bool degenerate = false;
};

struct HbacaDiagnostics {
  Index levels = 0;
  std::vector<LeafReport> leaves;        // row-major over (row leaf, column leaf)
  std::vector<Index> level_ranks;        // s_l, l = 0..L, after each vertical merge
  std::vector<Index> half_level_ranks;   // after the horizontal merge at step l - 1/2, l = 1..L
  bool degenerate = false;
  double time_leaf_s = 0.0;
  double time_merge_s = 0.0;
};

template <Scalar T>
struct HbacaResult {
  TruncatedSvd<T> svd;
  HbacaDiagnostics diagnostics;
  /// Leaf (0, 0) history; the whole run's history when n_b = 1.
  ConvergenceHistory first_leaf_history;
};

/// Seed for leaf `block_id`; leaf 0 keeps the master seed.
constexpr std::uint64_t leaf_seed(std::uint64_t master, std::uint64_t block_id) {
  return master + block_id * 0x9E3779B97F4A7C15ULL;
}

/// log4(n_b) for n_b a power of four; throws otherwise.
Index merge_levels(Index num_blocks);

/// Leaf BACA on an n_b = 4^L block grid followed by L rounds of horizontal then
/// vertical pair merges. Leaves and merges within a half-step run on `workers`
/// OpenMP threads; workers = 1 runs the same schedule serially.
template <Scalar T>
HbacaResult<T> hbaca_compress(const OraclePtr<T>& oracle, Index num_blocks, const BacaConfig& cfg,
                              int workers);

enum class RankModel { constant, doubling };

struct CostModelParams {
  double n = 0;
  double r = 0;
  Index num_blocks = 1;  // n_b, power of 4
  Index processes = 1;   // p
  RankModel rank_model = RankModel::constant;
};

struct CostEstimate {
  double leaf_flops = 0;
  double merge_flops = 0;
  double messages = 0;
  double volume = 0;
};

/// Asymptotic operation and communication counts (no machine constants).
CostEstimate cost_model(const CostModelParams& params);

}  // namespace hbaca
