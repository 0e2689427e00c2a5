#include "hbaca/factor_core.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Householder>
#include <Eigen/SVD>

namespace hbaca {

Index argmax_with_ties(const RealVector& values, const std::vector<bool>& allowed) {
  double best = -1.0;
  for (Index i = 0; i < values.size(); ++i)
    if (allowed[i] && values[i] > best) best = values[i];
  if (best < 0.0) return -1;
  const double cutoff = best * (1.0 - kPivotTieTolerance);
  for (Index i = 0; i < values.size(); ++i)
    if (allowed[i] && values[i] >= cutoff) return i;
  return -1;
}

namespace {

Index pick_pivot(const RealVector& norms, const IndexList& perm, Index from) {
  double best = 0.0;
  for (Index j = from; j < norms.size(); ++j) best = std::max(best, norms[j]);
  const double cutoff = best * (1.0 - kPivotTieTolerance);
  Index pick = -1;
  for (Index j = from; j < norms.size(); ++j) {
    if (norms[j] >= cutoff && (pick < 0 || perm[j] < perm[pick])) pick = j;
  }
  return pick;
}

}  // namespace

template <Scalar T>
QrcpResult<T> qrcp(const DenseMatrix<T>& a, const QrcpStop& stop) {
  require_finite(a, "qrcp");
  const Index m = a.rows();
  const Index n = a.cols();
  const Index max_steps = std::min(m, n);

  Index steps = max_steps;
  double eps = -1.0;
  if (const auto* fixed = std::get_if<FixedRank>(&stop)) {
    if (fixed->rank < 0 || fixed->rank > max_steps)
      throw InvalidArgument("qrcp: fixed rank exceeds min(m, n)");
    steps = fixed->rank;
  } else {
    eps = std::get<RelativeTolerance>(stop).eps;
  }

  QrcpResult<T> out;
  out.pivots.resize(n);
  for (Index j = 0; j < n; ++j) out.pivots[j] = j;

  DenseMatrix<T> w = a;
  DenseVector<T> taus(max_steps);
  RealVector norms(n), exact_norms(n);
  for (Index j = 0; j < n; ++j) norms[j] = exact_norms[j] = std::sqrt(w.col(j).squaredNorm());
  DenseVector<T> workspace(n);

  double first_diag = 0.0;
  Index rank = 0;
  for (Index i = 0; i < steps; ++i) {
    const Index p = pick_pivot(norms, out.pivots, i);
    const double diag = std::sqrt(w.col(p).tail(m - i).squaredNorm());
    if (diag == 0.0) break;
    if (i == 0) first_diag = diag;
    if (eps >= 0.0 && diag <= eps * first_diag) break;

    if (p != i) {
      w.col(i).swap(w.col(p));
      std::swap(norms[i], norms[p]);
      std::swap(exact_norms[i], exact_norms[p]);
      std::swap(out.pivots[i], out.pivots[p]);
    }

    typename DenseMatrix<T>::Scalar tau;
    double beta;
    auto col = w.col(i).tail(m - i);
    DenseVector<T> essential(std::max<Index>(m - i - 1, 0));
    col.makeHouseholder(essential, tau, beta);
    w(i, i) = T(beta);
    w.col(i).tail(m - i - 1) = essential;
    taus[i] = tau;
    if (i + 1 < n)
      w.block(i, i + 1, m - i, n - i - 1)
          .applyHouseholderOnTheLeft(essential, tau, workspace.data());

    for (Index j = i + 1; j < n; ++j) {
      if (norms[j] == 0.0) continue;
      double ratio = std::abs(w(i, j)) / norms[j];
      ratio = std::max(0.0, (1.0 - ratio) * (1.0 + ratio));
      const double scaled = norms[j] / exact_norms[j];
      if (ratio * scaled * scaled <= kNormRecomputeThreshold) {
        norms[j] = i + 1 < m ? std::sqrt(w.col(j).tail(m - i - 1).squaredNorm()) : 0.0;
        exact_norms[j] = norms[j];
      } else {
        norms[j] *= std::sqrt(ratio);
      }
    }
    ++rank;
  }

  out.rank = rank;
  out.t = w.topRows(rank).template triangularView<Eigen::Upper>();
  if (rank > 0) {
    // A = H_0^H H_1^H ... R, hence the conjugated coefficients.
    auto reflectors = Eigen::householderSequence(w.leftCols(rank), taus.head(rank).conjugate());
    out.q = reflectors * DenseMatrix<T>::Identity(m, rank);
  } else {
    out.q.resize(m, 0);
  }
  return out;
}

Index epsilon_rank(const RealVector& sigma, double eps) {
  if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
  const double floor = eps * sigma[0];
  Index r = 0;
  while (r < sigma.size() && !(sigma[r] < floor)) ++r;
  return r;
}

template <Scalar T>
TruncatedSvd<T> truncated_svd(const DenseMatrix<T>& a, double eps) {
  require_finite(a, "truncated_svd");
  TruncatedSvd<T> out;
  if (a.rows() == 0 || a.cols() == 0) {
    out.u.resize(a.rows(), 0);
    out.vt.resize(0, a.cols());
    return out;
  }
  Eigen::BDCSVD<DenseMatrix<T>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const Index r = epsilon_rank(s, eps);
  out.u = svd.matrixU().leftCols(r);
  out.sigma = s.head(r);
  out.vt = svd.matrixV().leftCols(r).adjoint();
  return out;
}

template <Scalar T>
std::optional<DenseMatrix<T>> cholesky(const DenseMatrix<T>& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("cholesky: matrix is not square");
  require_finite(a, "cholesky");
  const Index n = a.rows();
  if (n == 0) return DenseMatrix<T>(0, 0);
  const double scale = a.cwiseAbs().maxCoeff();
  const double skew = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * std::max(scale, 1e-300))
    throw InvalidArgument("cholesky: matrix is not Hermitian");

  DenseMatrix<T> t = DenseMatrix<T>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double d = std::real(a(j, j)) - t.col(j).head(j).squaredNorm();
    if (!(d > 0.0)) return std::nullopt;
    const double tjj = std::sqrt(d);
    t(j, j) = T(tjj);
    for (Index i = j + 1; i < n; ++i) {
      T acc = a(j, i);
      acc -= t.col(j).head(j).dot(t.col(i).head(j));  // dot conjugates the left side
      t(j, i) = acc / tjj;
    }
  }
  return t;
}

template <Scalar T>
std::pair<DenseMatrix<T>, DenseMatrix<T>> thin_qr(const DenseMatrix<T>& a) {
  const Index m = a.rows();
  const Index k = std::min(m, a.cols());
  if (k == 0) return {DenseMatrix<T>(m, 0), DenseMatrix<T>(0, a.cols())};
  Eigen::HouseholderQR<DenseMatrix<T>> qr(a);
  DenseMatrix<T> q = qr.householderQ() * DenseMatrix<T>::Identity(m, k);
  DenseMatrix<T> r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  return {std::move(q), std::move(r)};
}

namespace {

// ||T1 T2^H||_F with T1^H T1 = gu and T2^H T2 = gv; QR of the raw factors when
// either Gram matrix is numerically singular.
template <Scalar T>
double gram_norm(const DenseMatrix<T>& gu, const DenseMatrix<T>& gv, const auto& u,
                 const auto& v) {
  auto tu = cholesky<T>(gu);
  auto tv = tu ? cholesky<T>(gv) : std::nullopt;
  if (tu && tv) return (*tu * tv->adjoint()).norm();
  const auto ru = thin_qr<T>(DenseMatrix<T>(u)).second;
  const auto rv = thin_qr<T>(DenseMatrix<T>(v.adjoint())).second;
  return (ru * rv.adjoint()).norm();
}

template <Scalar T>
double cross_term(const auto& uu, const auto& vv) {
  // Re sum (U^H Ub) .* conj(V Vb^H)
  return (uu.array() * vv.array().conjugate()).real().sum();
}

}  // namespace

template <Scalar T>
double lr_norm(const DenseMatrix<T>& u, const DenseMatrix<T>& v) {
  if (u.cols() != v.rows()) throw InvalidArgument("lr_norm: inner dimensions differ");
  if (u.cols() == 0 || u.rows() == 0 || v.cols() == 0) return 0.0;
  DenseMatrix<T> gu = u.adjoint() * u;
  DenseMatrix<T> gv = v * v.adjoint();
  return gram_norm<T>(gu, gv, u, v);
}

template <Scalar T>
double lr_norm_update(const DenseMatrix<T>& u, const DenseMatrix<T>& v, double mu,
                      const DenseMatrix<T>& ub, const DenseMatrix<T>& vb, double nu) {
  if (u.cols() != v.rows() || ub.cols() != vb.rows() || u.rows() != ub.rows() ||
      v.cols() != vb.cols())
    throw InvalidArgument("lr_norm_update: incompatible factor shapes");
  double s = mu * mu + nu * nu;
  if (u.cols() > 0 && ub.cols() > 0) {
    DenseMatrix<T> uu = u.adjoint() * ub;
    DenseMatrix<T> vv = v * vb.adjoint();
    s += 2.0 * cross_term<T>(uu, vv);
  }
  return std::sqrt(std::max(s, 0.0));
}

template <Scalar T>
NormPair lr_norm_appended(ConstMatrixRef<T> u, ConstMatrixRef<T> v, Index prev_rank,
                          double mu_prev) {
  const Index total = u.cols();
  const Index added = total - prev_rank;
  if (v.rows() != total || prev_rank < 0 || added < 0)
    throw InvalidArgument("lr_norm_appended: incompatible factor shapes");
  if (added == 0) return {0.0, mu_prev};

  // [U, Uk]^H Uk and [V; Vk] Vk^H in one product each.
  DenseMatrix<T> gu = u.adjoint() * u.rightCols(added);
  DenseMatrix<T> gv = v * v.bottomRows(added).adjoint();
  const double nu = gram_norm<T>(DenseMatrix<T>(gu.bottomRows(added)),
                                 DenseMatrix<T>(gv.bottomRows(added)), u.rightCols(added),
                                 v.bottomRows(added));
  double s = mu_prev * mu_prev + nu * nu;
  if (prev_rank > 0) s += 2.0 * cross_term<T>(gu.topRows(prev_rank), gv.topRows(prev_rank));
  return {nu, std::sqrt(std::max(s, 0.0))};
}

template <Scalar T>
TruncatedSvd<T> lr_recompress(const DenseMatrix<T>& u, const DenseMatrix<T>& v, double eps) {
  if (u.cols() != v.rows()) throw InvalidArgument("lr_recompress: inner dimensions differ");
  TruncatedSvd<T> out;
  if (u.cols() == 0 || u.rows() == 0 || v.cols() == 0) {
    out.u.resize(u.rows(), 0);
    out.vt.resize(0, v.cols());
    return out;
  }
  auto [qu, tu] = thin_qr<T>(u);
  auto [qv, tv] = thin_qr<T>(DenseMatrix<T>(v.adjoint()));
  DenseMatrix<T> core = tu * tv.adjoint();
  auto inner = truncated_svd<T>(core, eps);
  out.u = qu * inner.u;
  out.sigma = std::move(inner.sigma);
  out.vt = inner.vt * qv.adjoint();
  return out;
}

#define HBACA_INSTANTIATE(T)                                                                 \
  template QrcpResult<T> qrcp<T>(const DenseMatrix<T>&, const QrcpStop&);                    \
  template TruncatedSvd<T> truncated_svd<T>(const DenseMatrix<T>&, double);                  \
  template std::optional<DenseMatrix<T>> cholesky<T>(const DenseMatrix<T>&);                 \
  template std::pair<DenseMatrix<T>, DenseMatrix<T>> thin_qr<T>(const DenseMatrix<T>&);      \
  template double lr_norm<T>(const DenseMatrix<T>&, const DenseMatrix<T>&);                  \
  template double lr_norm_update<T>(const DenseMatrix<T>&, const DenseMatrix<T>&, double,    \
                                    const DenseMatrix<T>&, const DenseMatrix<T>&, double);   \
  template NormPair lr_norm_appended<T>(ConstMatrixRef<T>, ConstMatrixRef<T>, Index,          \
                                        double);                                             \
  template TruncatedSvd<T> lr_recompress<T>(const DenseMatrix<T>&, const DenseMatrix<T>&, double);

HBACA_INSTANTIATE(Real)
HBACA_INSTANTIATE(Complex)

#undef HBACA_INSTANTIATE

}  // namespace hbaca
