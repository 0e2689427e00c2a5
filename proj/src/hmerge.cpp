#include "hbaca/hmerge.hpp"

#include <chrono>
#include <cmath>
#include <exception>

namespace hbaca {

IndexTree::IndexTree(Index extent, Index levels) : extent_(extent), levels_(levels) {
  if (levels < 0) throw InvalidArgument("index tree: negative level count");
  if (levels >= 62 || extent < (Index{1} << levels))
    throw InvalidArgument("index tree: extent " + std::to_string(extent) + " is too small for " +
                          std::to_string(levels) + " levels");
  nodes_.resize(levels + 1);
  nodes_[levels] = {Range{0, extent}};
  for (Index l = levels; l > 0; --l) {
    auto& below = nodes_[l - 1];
    below.reserve(2 * nodes_[l].size());
    for (const Range& parent : nodes_[l]) {
      const Index mid = parent.lo + (parent.size() + 1) / 2;
      below.push_back({parent.lo, mid});
      below.push_back({mid, parent.hi});
    }
  }
}

IndexTree build_index_tree(Index extent, Index levels) { return IndexTree(extent, levels); }

template <Scalar T>
BlockSvd<T> merge_pair_horizontal(const BlockSvd<T>& left, const BlockSvd<T>& right, double eps) {
  if (left.rows != right.rows || left.cols.hi != right.cols.lo)
    throw InvalidArgument("merge_pair_horizontal: blocks are not horizontal neighbours");
  const Index m = left.rows.size();
  const Index n1 = left.cols.size();
  const Index n2 = right.cols.size();
  const Index r1 = left.svd.rank();
  const Index r2 = right.svd.rank();

  BlockSvd<T> out{left.rows, {left.cols.lo, right.cols.hi}, {}};
  // U_bar = [U1 S1, U2 S2], V_bar = diag(V1, V2)
  DenseMatrix<T> u_bar(m, r1 + r2);
  u_bar.leftCols(r1) = left.svd.u * left.svd.sigma.template cast<T>().asDiagonal();
  u_bar.rightCols(r2) = right.svd.u * right.svd.sigma.template cast<T>().asDiagonal();
  auto inner = truncated_svd<T>(u_bar, eps);

  out.svd.u = std::move(inner.u);
  out.svd.sigma = std::move(inner.sigma);
  const Index r = out.svd.sigma.size();
  out.svd.vt.resize(r, n1 + n2);
  out.svd.vt.leftCols(n1).noalias() = inner.vt.leftCols(r1) * left.svd.vt;
  out.svd.vt.rightCols(n2).noalias() = inner.vt.rightCols(r2) * right.svd.vt;
  return out;
}

template <Scalar T>
BlockSvd<T> merge_pair_vertical(const BlockSvd<T>& top, const BlockSvd<T>& bottom, double eps) {
  if (top.cols != bottom.cols || top.rows.hi != bottom.rows.lo)
    throw InvalidArgument("merge_pair_vertical: blocks are not vertical neighbours");
  const Index m1 = top.rows.size();
  const Index m2 = bottom.rows.size();
  const Index n = top.cols.size();
  const Index r1 = top.svd.rank();
  const Index r2 = bottom.svd.rank();

  BlockSvd<T> out{{top.rows.lo, bottom.rows.hi}, top.cols, {}};
  // U_bar = diag(U1, U2), V_bar = [S1 V1; S2 V2]
  DenseMatrix<T> v_bar(r1 + r2, n);
  v_bar.topRows(r1) = top.svd.sigma.template cast<T>().asDiagonal() * top.svd.vt;
  v_bar.bottomRows(r2) = bottom.svd.sigma.template cast<T>().asDiagonal() * bottom.svd.vt;
  auto inner = truncated_svd<T>(v_bar, eps);

  out.svd.vt = std::move(inner.vt);
  out.svd.sigma = std::move(inner.sigma);
  const Index r = out.svd.sigma.size();
  out.svd.u.resize(m1 + m2, r);
  out.svd.u.topRows(m1).noalias() = top.svd.u * inner.u.topRows(r1);
  out.svd.u.bottomRows(m2).noalias() = bottom.svd.u * inner.u.bottomRows(r2);
  return out;
}

Index merge_levels(Index num_blocks) {
  Index levels = 0;
  Index q = 1;
  while (q < num_blocks && levels < 31) {
    q *= 4;
    ++levels;
  }
  if (num_blocks < 1 || q != num_blocks)
    throw InvalidArgument("number of leaf blocks must be a power of 4, got " +
                          std::to_string(num_blocks));
  return levels;
}

namespace {

/// Runs task(0..count-1). workers <= 1 is the plain serial loop; otherwise an
/// OpenMP dynamic loop with exceptions carried out of the parallel region.
template <class F>
void run_tasks(Index count, int workers, F&& task) {
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (Index i = 0; i < count; ++i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <Scalar T>
Index max_rank(const std::vector<BlockSvd<T>>& blocks) {
  Index s = 0;
  for (const auto& b : blocks) s = std::max(s, b.svd.rank());
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

template <Scalar T>
HbacaResult<T> hbaca_compress(const OraclePtr<T>& oracle, Index num_blocks, const BacaConfig& cfg,
                              int workers) {
  if (!oracle) throw InvalidArgument("hbaca_compress: null oracle");
  if (workers < 1) throw InvalidArgument("hbaca_compress: workers must be >= 1");
  const Index levels = merge_levels(num_blocks);
  const IndexTree row_tree(oracle->rows(), levels);
  const IndexTree col_tree(oracle->cols(), levels);
  const Index side = Index{1} << levels;

  HbacaResult<T> out;
  auto& diag = out.diagnostics;
  diag.levels = levels;
  diag.leaves.resize(num_blocks);

  // Step 0: independent leaf compressions.
  std::vector<BlockSvd<T>> grid(num_blocks);
  const auto leaf_start = std::chrono::steady_clock::now();
  run_tasks(num_blocks, workers, [&](Index id) {
    const Range rows = row_tree.leaves()[id / side];
    const Range cols = col_tree.leaves()[id % side];
    BlockOracle<T> block(oracle, rows.lo, rows.size(), cols.lo, cols.size());
    BacaConfig leaf_cfg = cfg;
    leaf_cfg.seed = leaf_seed(cfg.seed, static_cast<std::uint64_t>(id));
    if (num_blocks > 1) leaf_cfg.initial_columns.reset();
    auto res = baca_compress<T>(block, leaf_cfg);
    diag.leaves[id] = {rows,
                       cols,
                       res.svd.rank(),
                       res.raw.rank(),
                       res.history.iterations(),
                       res.history.degenerate()};
    if (id == 0) out.first_leaf_history = std::move(res.history);
    grid[id] = BlockSvd<T>{rows, cols, std::move(res.svd)};
  });
  diag.time_leaf_s = seconds_since(leaf_start);
  for (const auto& leaf : diag.leaves) diag.degenerate = diag.degenerate || leaf.degenerate;
  diag.level_ranks.push_back(max_rank(grid));

  // Steps l - 1/2 and l: merge column pairs, then row pairs.
  const auto merge_start = std::chrono::steady_clock::now();
  for (Index l = 1; l <= levels; ++l) {
    const Index row_count = row_tree.width(l - 1);
    const Index col_count = col_tree.width(l);
    std::vector<BlockSvd<T>> half(row_count * col_count);
    run_tasks(row_count * col_count, workers, [&](Index id) {
      const Index tau = id / col_count;
      const Index nu = id % col_count;
      const Index child_cols = 2 * col_count;
      half[id] = merge_pair_horizontal<T>(grid[tau * child_cols + 2 * nu],
                                          grid[tau * child_cols + 2 * nu + 1], cfg.eps);
    });
    diag.half_level_ranks.push_back(max_rank(half));

    const Index parent_rows = row_tree.width(l);
    std::vector<BlockSvd<T>> next(parent_rows * col_count);
    run_tasks(parent_rows * col_count, workers, [&](Index id) {
      const Index tau = id / col_count;
      const Index nu = id % col_count;
      next[id] = merge_pair_vertical<T>(half[(2 * tau) * col_count + nu],
                                        half[(2 * tau + 1) * col_count + nu], cfg.eps);
    });
    grid = std::move(next);
    diag.level_ranks.push_back(max_rank(grid));
  }
  diag.time_merge_s = seconds_since(merge_start);

  out.svd = std::move(grid.front().svd);
  return out;
}

CostEstimate cost_model(const CostModelParams& p) {
  if (!(p.n > 0) || !(p.r > 0) || p.processes < 1)
    throw InvalidArgument("cost_model: n, r and p must be positive");
  const Index levels = merge_levels(p.num_blocks);
  const double sqrt_nb = std::sqrt(static_cast<double>(p.num_blocks));
  const auto rank_at = [&](Index l) {
    return p.rank_model == RankModel::constant ? p.r : std::ldexp(p.r, static_cast<int>(l - levels));
  };

  CostEstimate c;
  const double s0 = rank_at(0);
  c.leaf_flops = (p.n / sqrt_nb) * s0 * s0 * static_cast<double>(p.num_blocks);
  const double sqrt_p = std::sqrt(static_cast<double>(p.processes));
  for (Index l = 1; l <= levels; ++l) {
    const double sl = rank_at(l);
    const double nl = std::ldexp(p.n, static_cast<int>(l)) / sqrt_nb;
    c.merge_flops += std::ldexp(1.0, static_cast<int>(2 * (levels - l))) * nl * sl * sl;
    c.messages += static_cast<double>(l) * sl;
    c.volume += static_cast<double>(l) * p.n * sl / sqrt_p;
  }
  return c;
}

#define HBACA_INSTANTIATE(T)                                                                     \
  template BlockSvd<T> merge_pair_horizontal<T>(const BlockSvd<T>&, const BlockSvd<T>&, double); \
  template BlockSvd<T> merge_pair_vertical<T>(const BlockSvd<T>&, const BlockSvd<T>&, double);   \
  template HbacaResult<T> hbaca_compress<T>(const OraclePtr<T>&, Index, const BacaConfig&, int);

HBACA_INSTANTIATE(Real)
HBACA_INSTANTIATE(Complex)

#undef HBACA_INSTANTIATE

}  // namespace hbaca
