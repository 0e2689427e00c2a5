#include "hbaca/aca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hbaca/random.hpp"

namespace hbaca {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::exhausted: return "exhausted";
    case Termination::degenerate: return "degenerate";
    case Termination::max_rank: return "max_rank";
  }
  return "unknown";
}

template <Scalar T>
AcaResult<T> aca_compress(const EntryOracle<T>& oracle, const AcaConfig& cfg) {
  const Index m = oracle.rows();
  const Index n = oracle.cols();
  if (m == 0 || n == 0) throw InvalidArgument("aca_compress: empty oracle");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw InvalidArgument("aca_compress: eps must be in (0,1)");
  const Index max_rank = std::min(cfg.max_rank.value_or(std::min(m, n)), std::min(m, n));
  if (max_rank < 0) throw InvalidArgument("aca_compress: negative max rank");

  CounterRng rng(cfg.seed);
  Index j = cfg.initial_column ? *cfg.initial_column : static_cast<Index>(rng.below(n));
  if (j < 0 || j >= n) throw InvalidArgument("aca_compress: initial column out of range");

  AcaResult<T> out;
  auto& history = out.history;
  DenseMatrix<T> u_store(m, std::min<Index>(max_rank, 16));
  DenseMatrix<T> v_store(u_store.cols(), n);
  Index r = 0;

  IndexList all_rows(m), all_cols(n);
  std::iota(all_rows.begin(), all_rows.end(), Index{0});
  std::iota(all_cols.begin(), all_cols.end(), Index{0});
  std::vector<bool> row_free(m, true), col_free(n, true);
  DenseMatrix<T> col_buf, row_buf;
  RealVector mags;

  double mu2 = 0.0;
  double largest_pivot = 0.0;
  history.termination = Termination::exhausted;

  for (Index k = 1; k <= std::min(m, n); ++k) {
    if (r >= max_rank) {
      history.termination = Termination::max_rank;
      break;
    }
    const Index jk = j;
    oracle.fill(all_rows, std::span<const Index>(&jk, 1), col_buf);
    DenseVector<T> u = col_buf.col(0);
    if (r > 0) u.noalias() -= u_store.leftCols(r) * v_store.col(jk).head(r);

    mags = u.cwiseAbs();
    const Index ik = argmax_with_ties(mags, row_free);
    if (ik < 0) break;
    const T pivot = u(ik);
    if (std::abs(pivot) <= cfg.zero_pivot_factor * largest_pivot || pivot == T(0)) {
      history.termination = Termination::degenerate;
      break;
    }
    largest_pivot = std::max(largest_pivot, std::abs(pivot));
    u /= pivot;

    oracle.fill(std::span<const Index>(&ik, 1), all_cols, row_buf);
    DenseVector<T> v = row_buf.row(0).transpose();
    if (r > 0) v.noalias() -= v_store.topRows(r).transpose() * u_store.row(ik).head(r).transpose();

    row_free[ik] = false;
    col_free[jk] = false;
    mags = v.cwiseAbs();
    const Index next = argmax_with_ties(mags, col_free);

    const double nu = std::sqrt(u.squaredNorm() * v.squaredNorm());
    double cross = 0.0;
    if (r > 0) {
      // sum_l (U(:,l)^H u) * conj(V(l,:) conj(v))
      DenseVector<T> a = u_store.leftCols(r).adjoint() * u;
      DenseVector<T> b = v_store.topRows(r) * v.conjugate();
      cross = (a.array() * b.array().conjugate()).real().sum();
    }
    mu2 = std::max(0.0, mu2 + nu * nu + 2.0 * cross);
    const double mu = std::sqrt(mu2);

    if (r == u_store.cols()) {
      const Index cap = std::min(max_rank, std::max<Index>(2 * r, 1));
      u_store.conservativeResize(Eigen::NoChange, cap);
      v_store.conservativeResize(cap, Eigen::NoChange);
    }
    u_store.col(r) = u;
    v_store.row(r) = v.transpose();
    ++r;
    history.records.push_back({k, r, nu, mu, {ik}, {jk}});

    if (nu < cfg.eps * mu) {
      history.termination = Termination::converged;
      break;
    }
    if (next < 0) {
      history.termination = Termination::exhausted;
      break;
    }
    j = next;
  }
  if (history.termination == Termination::exhausted && r >= max_rank && max_rank < std::min(m, n))
    history.termination = Termination::max_rank;

  out.factors.u = u_store.leftCols(r);
  out.factors.v = v_store.topRows(r);
  return out;
}

template AcaResult<Real> aca_compress<Real>(const EntryOracle<Real>&, const AcaConfig&);
template AcaResult<Complex> aca_compress<Complex>(const EntryOracle<Complex>&, const AcaConfig&);

}  // namespace hbaca
