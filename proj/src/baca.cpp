#include "hbaca/baca.hpp"

#include <algorithm>
#include <numeric>

#include "hbaca/random.hpp"

namespace hbaca {

namespace {

/// k distinct entries of `candidates`, partial Fisher-Yates.
IndexList sample_without_replacement(CounterRng& rng, IndexList candidates, Index k) {
  const auto size = static_cast<Index>(candidates.size());
  k = std::min(k, size);
  for (Index t = 0; t < k; ++t) {
    const auto pick = t + static_cast<Index>(rng.below(static_cast<std::uint64_t>(size - t)));
    std::swap(candidates[t], candidates[pick]);
  }
  candidates.resize(k);
  return candidates;
}

IndexList free_indices(const std::vector<bool>& used, const IndexList& also_excluded = {}) {
  std::vector<bool> blocked = used;
  for (Index j : also_excluded) blocked[j] = true;
  IndexList out;
  for (std::size_t i = 0; i < blocked.size(); ++i)
    if (!blocked[i]) out.push_back(static_cast<Index>(i));
  return out;
}

IndexList iota_list(Index n) {
  IndexList out(n);
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

}  // namespace

template <Scalar T>
PivotSelection<T> select_pivot_blocks(const EntryOracle<T>& oracle, ConstMatrixRef<T> u,
                                      ConstMatrixRef<T> v, const IndexList& cols,
                                      const std::vector<bool>& used_rows,
                                      const std::vector<bool>& used_cols, Index block_size) {
  const Index m = oracle.rows();
  const Index n = oracle.cols();
  const Index rank = u.cols();
  if (v.rows() != rank || u.rows() != m || v.cols() != n)
    throw InvalidArgument("select_pivot_blocks: factor shapes do not match the oracle");
  for (Index j : cols)
    if (used_cols[j]) throw InvalidArgument("select_pivot_blocks: column block reuses a pivot");

  PivotSelection<T> sel;
  const IndexList all_rows = iota_list(m);
  oracle.fill(all_rows, cols, sel.c);
  if (rank > 0) {
    DenseMatrix<T> v_cols(rank, static_cast<Index>(cols.size()));
    for (Index b = 0; b < v_cols.cols(); ++b) v_cols.col(b) = v.col(cols[b]);
    sel.c.noalias() -= u * v_cols;
  }

  // Rows: QRCP on the transpose of the residual columns, unused rows only.
  const IndexList row_candidates = free_indices(used_rows);
  const Index row_steps = std::min({block_size, static_cast<Index>(cols.size()),
                                    static_cast<Index>(row_candidates.size())});
  if (row_steps > 0) {
    DenseMatrix<T> ct(sel.c.cols(), static_cast<Index>(row_candidates.size()));
    for (Index t = 0; t < ct.cols(); ++t) ct.col(t) = sel.c.row(row_candidates[t]).transpose();
    const auto qr = qrcp<T>(ct, FixedRank{row_steps});
    for (Index t = 0; t < qr.rank; ++t) sel.rows.push_back(row_candidates[qr.pivots[t]]);
  }
  const auto nrows = static_cast<Index>(sel.rows.size());

  const IndexList all_cols = iota_list(n);
  oracle.fill(sel.rows, all_cols, sel.r);
  if (rank > 0 && nrows > 0) {
    DenseMatrix<T> u_rows(nrows, rank);
    for (Index a = 0; a < nrows; ++a) u_rows.row(a) = u.row(sel.rows[a]);
    sel.r.noalias() -= u_rows * v;
  }

  // Next columns: QRCP on the residual rows, excluding used columns and J_k.
  const IndexList col_candidates = free_indices(used_cols, cols);
  const Index col_steps =
      std::min({block_size, nrows, static_cast<Index>(col_candidates.size())});
  if (col_steps > 0) {
    DenseMatrix<T> sub(nrows, static_cast<Index>(col_candidates.size()));
    for (Index t = 0; t < sub.cols(); ++t) sub.col(t) = sel.r.col(col_candidates[t]);
    const auto qr = qrcp<T>(sub, FixedRank{col_steps});
    for (Index t = 0; t < qr.rank; ++t) sel.next_cols.push_back(col_candidates[qr.pivots[t]]);
  }

  sel.w.resize(nrows, sel.c.cols());
  for (Index a = 0; a < nrows; ++a) sel.w.row(a) = sel.c.row(sel.rows[a]);
  return sel;
}

template <Scalar T>
LridResult<T> lrid(const DenseMatrix<T>& c, const DenseMatrix<T>& w, const DenseMatrix<T>& r,
                   double eps) {
  if (c.cols() != w.cols() || w.rows() != r.rows())
    throw InvalidArgument("lrid: C, W, R shapes are inconsistent");
  LridResult<T> out;
  const auto qr = qrcp<T>(w, RelativeTolerance{eps});
  out.rank = qr.rank;
  out.order = qr.pivots;
  out.u.resize(c.rows(), qr.rank);
  for (Index t = 0; t < qr.rank; ++t) out.u.col(t) = c.col(qr.pivots[t]);
  if (qr.rank == 0) {
    out.v.resize(0, r.cols());
    return out;
  }
  out.v = qr.t.leftCols(qr.rank).template triangularView<Eigen::Upper>().solve(
      qr.q.adjoint() * r);
  return out;
}

template <Scalar T>
BacaResult<T> baca_compress(const EntryOracle<T>& oracle, const BacaConfig& cfg) {
  const Index m = oracle.rows();
  const Index n = oracle.cols();
  if (m == 0 || n == 0) throw InvalidArgument("baca_compress: empty oracle");
  if (cfg.block_size < 1) throw InvalidArgument("baca_compress: block size must be >= 1");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw InvalidArgument("baca_compress: eps must be in (0,1)");
  const Index full = std::min(m, n);
  const Index max_rank = std::min(cfg.max_rank.value_or(full), full);
  const Index d = std::min(cfg.block_size, full);

  CounterRng rng(cfg.seed);
  IndexList cols;
  if (cfg.initial_columns) {
    cols = *cfg.initial_columns;
    std::vector<bool> seen(n, false);
    for (Index j : cols) {
      if (j < 0 || j >= n || seen[j]) throw InvalidArgument("baca_compress: bad initial columns");
      seen[j] = true;
    }
  } else {
    cols = sample_without_replacement(rng, iota_list(n), d);
  }

  BacaResult<T> out;
  auto& history = out.history;
  history.termination = Termination::exhausted;
  std::vector<bool> used_rows(m, false), used_cols(n, false);
  DenseMatrix<T> u_store(m, std::min<Index>(std::max<Index>(2 * d, 16), full));
  DenseMatrix<T> v_store(u_store.cols(), n);
  Index r = 0;
  double mu = 0.0;
  Index retries = 0;

  while (true) {
    if (r >= max_rank) {
      history.termination = max_rank < full ? Termination::max_rank : Termination::exhausted;
      break;
    }

    Index dk = 0;
    PivotSelection<T> sel;
    LridResult<T> id;
    if (!cols.empty()) {
      sel = select_pivot_blocks<T>(oracle, u_store.leftCols(r), v_store.topRows(r), cols,
                                   used_rows, used_cols, d);
      if (!sel.rows.empty()) {
        id = lrid<T>(sel.c, sel.w, sel.r, cfg.eps);
        dk = std::min(id.rank, max_rank - r);
      }
    }

    if (dk == 0) {
      // No usable update from this block: draw a fresh one from unused columns.
      ++out.degenerate_retries;
      if (++retries > cfg.max_degenerate_retries) {
        history.termination = Termination::degenerate;
        break;
      }
      IndexList candidates = free_indices(used_cols, cols);
      if (candidates.empty()) candidates = free_indices(used_cols);
      if (candidates.empty() || free_indices(used_rows).empty()) {
        history.termination = Termination::exhausted;
        break;
      }
      cols = sample_without_replacement(rng, std::move(candidates), d);
      continue;
    }
    retries = 0;

    if (r + dk > u_store.cols()) {
      const Index cap = std::min(full, std::max(2 * u_store.cols(), r + dk));
      u_store.conservativeResize(Eigen::NoChange, cap);
      v_store.conservativeResize(cap, Eigen::NoChange);
    }
    u_store.middleCols(r, dk) = id.u.leftCols(dk);
    v_store.middleRows(r, dk) = id.v.topRows(dk);

    IterationRecord rec;
    rec.rows.assign(sel.rows.begin(), sel.rows.begin() + dk);
    for (Index t = 0; t < dk; ++t) rec.cols.push_back(cols[id.order[t]]);
    for (Index i : rec.rows) used_rows[i] = true;
    for (Index j : rec.cols) used_cols[j] = true;

    const NormPair norms =
        lr_norm_appended<T>(u_store.leftCols(r + dk), v_store.topRows(r + dk), r, mu);
    mu = norms.mu;
    r += dk;
    rec.k = history.iterations() + 1;
    rec.rank = r;
    rec.nu = norms.nu;
    rec.mu = mu;
    history.records.push_back(std::move(rec));

    if (norms.nu < cfg.eps * mu) {
      history.termination = Termination::converged;
      break;
    }
    // Every remaining column was already in this block: the cross has nothing left to offer.
    if (free_indices(used_cols, cols).empty()) {
      history.termination = Termination::exhausted;
      break;
    }
    cols = std::move(sel.next_cols);
  }

  out.raw.u = u_store.leftCols(r);
  out.raw.v = v_store.topRows(r);
  out.svd = lr_recompress<T>(out.raw.u, out.raw.v, cfg.eps);
  return out;
}

#define HBACA_INSTANTIATE(T)                                                                  \
  template PivotSelection<T> select_pivot_blocks<T>(                                          \
      const EntryOracle<T>&, ConstMatrixRef<T>, ConstMatrixRef<T>, const IndexList&,          \
      const std::vector<bool>&, const std::vector<bool>&, Index);                             \
  template LridResult<T> lrid<T>(const DenseMatrix<T>&, const DenseMatrix<T>&,                \
                                 const DenseMatrix<T>&, double);                              \
  template BacaResult<T> baca_compress<T>(const EntryOracle<T>&, const BacaConfig&);

HBACA_INSTANTIATE(Real)
HBACA_INSTANTIATE(Complex)

#undef HBACA_INSTANTIATE

}  // namespace hbaca
