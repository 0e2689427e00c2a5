#include <doctest.h>

#include <set>

#include "hbaca/aca.hpp"
#include "hbaca/baca.hpp"
#include "test_util.hpp"

using namespace hbaca;
using testutil::gaussian_matrix;
using testutil::rel_diff;

namespace {

template <Scalar T>
void check_svd_invariants(const TruncatedSvd<T>& s) {
  const Index r = s.rank();
  CHECK((s.u.adjoint() * s.u - DenseMatrix<T>::Identity(r, r)).norm() < 1e-12);
  CHECK((s.vt * s.vt.adjoint() - DenseMatrix<T>::Identity(r, r)).norm() < 1e-12);
  for (Index i = 1; i < r; ++i) CHECK(s.sigma[i] <= s.sigma[i - 1]);
}

void check_history(const BacaResult<Real>& res, Index d) {
  std::set<Index> rows, cols;
  Index prev_rank = 0;
  for (const auto& rec : res.history.records) {
    const auto dk = rec.rank - prev_rank;
    CHECK(dk >= 1);
    CHECK(dk <= d);
    CHECK(static_cast<Index>(rec.rows.size()) == dk);
    CHECK(static_cast<Index>(rec.cols.size()) == dk);
    for (Index i : rec.rows) CHECK(rows.insert(i).second);
    for (Index j : rec.cols) CHECK(cols.insert(j).second);
    const DenseMatrix<Real> uk = res.raw.u.leftCols(rec.rank);
    const DenseMatrix<Real> vk = res.raw.v.topRows(rec.rank);
    CHECK(std::abs(rec.mu - lr_norm(uk, vk)) <= 1e-10 * rec.mu);
    prev_rank = rec.rank;
  }
  CHECK(prev_rank == res.raw.rank());
}

}  // namespace

TEST_CASE("select_pivot_blocks with d = 1 is an argmax") {
  const DenseMatrix<Real> a = gaussian_matrix(12, 10, 1);
  const DenseOracle<Real> o(a);
  std::vector<bool> used_rows(12, false), used_cols(10, false);
  used_rows[3] = true;
  const auto sel = select_pivot_blocks<Real>(o, DenseMatrix<Real>(12, 0), DenseMatrix<Real>(0, 10),
                                             IndexList{4}, used_rows, used_cols, 1);
  Index best_row = -1;
  for (Index i = 0; i < 12; ++i)
    if (i != 3 && (best_row < 0 || std::abs(a(i, 4)) > std::abs(a(best_row, 4)))) best_row = i;
  REQUIRE(sel.rows.size() == 1);
  CHECK(sel.rows[0] == best_row);
  Index best_col = -1;
  for (Index j = 0; j < 10; ++j)
    if (j != 4 && (best_col < 0 || std::abs(a(best_row, j)) > std::abs(a(best_row, best_col))))
      best_col = j;
  REQUIRE(sel.next_cols.size() == 1);
  CHECK(sel.next_cols[0] == best_col);
  CHECK(sel.w(0, 0) == a(best_row, 4));
}

TEST_CASE("select_pivot_blocks on a zero oracle yields an empty block") {
  const DenseOracle<Real> o(DenseMatrix<Real>::Zero(6, 6));
  const std::vector<bool> none(6, false);
  const auto sel = select_pivot_blocks<Real>(o, DenseMatrix<Real>(6, 0), DenseMatrix<Real>(0, 6),
                                             IndexList{0, 1}, none, none, 2);
  CHECK(sel.c.isZero(0.0));
  CHECK(sel.rows.empty());
  CHECK(sel.w.size() == 0);
}

TEST_CASE("first block of a rank-4 matrix has a nonsingular intersection") {
  const DenseMatrix<Real> a = testutil::low_rank(16, 16, 4, 3);
  const DenseOracle<Real> o(a);
  const std::vector<bool> none(16, false);
  const auto sel = select_pivot_blocks<Real>(o, DenseMatrix<Real>(16, 0), DenseMatrix<Real>(0, 16),
                                             IndexList{0, 5, 9, 12}, none, none, 4);
  REQUIRE(sel.w.rows() == 4);
  const auto sv = testutil::gram_singular_values(sel.w);
  CHECK(sv[3] > 1e-6 * sv[0]);
  const auto id = lrid(sel.c, sel.w, sel.r, 1e-10);
  CHECK(id.rank == 4);
  CHECK(rel_diff(DenseMatrix<Real>(id.u * id.v), a) < 1e-10);
}

TEST_CASE("lrid examples") {
  SUBCASE("identity intersection") {
    const DenseMatrix<Real> c = gaussian_matrix(8, 3, 1), r = gaussian_matrix(3, 7, 2);
    const auto id = lrid<Real>(c, DenseMatrix<Real>::Identity(3, 3), r, 1e-12);
    CHECK(id.rank == 3);
    CHECK(id.order == IndexList{0, 1, 2});
    CHECK(id.u == c);
    CHECK((id.v - r).norm() < 1e-14);
  }
  SUBCASE("rank-1 intersection") {
    const DenseMatrix<Real> w = gaussian_matrix(3, 1, 3) * gaussian_matrix(1, 3, 4);
    const auto id = lrid<Real>(gaussian_matrix(8, 3, 5), w, gaussian_matrix(3, 7, 6), 1e-10);
    CHECK(id.rank == 1);
    CHECK(id.u.cols() == 1);
  }
  SUBCASE("full-rank against the explicit inverse") {
    const DenseMatrix<Real> c = gaussian_matrix(8, 3, 7), w = gaussian_matrix(3, 3, 8),
                           r = gaussian_matrix(3, 8, 9);
    const DenseMatrix<Real> expect = c * w.inverse() * r;
    const auto id = lrid(c, w, r, 1e-12);
    CHECK(id.rank == 3);
    CHECK((id.u * id.v - expect).norm() <= 1e-10 * expect.norm());
  }
  SUBCASE("complex full-rank") {
    const DenseMatrix<Complex> c = testutil::gaussian_complex(8, 3, 7),
                              w = testutil::gaussian_complex(3, 3, 8),
                              r = testutil::gaussian_complex(3, 8, 9);
    const DenseMatrix<Complex> expect = c * w.inverse() * r;
    const auto id = lrid(c, w, r, 1e-12);
    CHECK((id.u * id.v - expect).norm() <= 1e-10 * expect.norm());
  }
  SUBCASE("zero intersection") {
    const auto id = lrid<Real>(gaussian_matrix(5, 2, 1), DenseMatrix<Real>::Zero(2, 2),
                               gaussian_matrix(2, 5, 2), 1e-8);
    CHECK(id.rank == 0);
    CHECK(id.u.cols() == 0);
    CHECK(id.v.rows() == 0);
  }
}

TEST_CASE("baca with d = 1 follows the aca pivot sequence") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseMatrix<Real> a = testutil::low_rank(40, 40, 6, seed) + 1e-5 * gaussian_matrix(40, 40, seed + 9);
    const DenseOracle<Real> o(a);
    AcaConfig acfg;
    acfg.eps = 1e-4;
    acfg.seed = seed;
    BacaConfig bcfg;
    bcfg.block_size = 1;
    bcfg.eps = 1e-4;
    bcfg.seed = seed;
    const auto ar = aca_compress(o, acfg);
    const auto br = baca_compress(o, bcfg);
    REQUIRE(ar.history.iterations() == br.history.iterations());
    for (Index k = 0; k < ar.history.iterations(); ++k) {
      CHECK(ar.history.records[k].rows == br.history.records[k].rows);
      CHECK(ar.history.records[k].cols == br.history.records[k].cols);
    }
  }
}

TEST_CASE("baca with d = min(m, n) is one QRCP-based ID") {
  const DenseMatrix<Real> a = testutil::low_rank(16, 16, 4, 11);
  BacaConfig cfg;
  cfg.block_size = 16;
  cfg.eps = 1e-8;
  const auto res = baca_compress(DenseOracle<Real>(a), cfg);
  CHECK(res.history.iterations() == 1);
  CHECK(res.svd.rank() == 4);
  CHECK(rel_diff(to_dense(res.svd), a) <= 1e-6);
}

TEST_CASE("baca on duplicated column groups") {
  const DenseMatrix<Real> groups = gaussian_matrix(64, 8, 21);
  DenseMatrix<Real> a(64, 64);
  for (Index j = 0; j < 64; ++j) a.col(j) = groups.col(j % 8) * (1.0 + 0.01 * static_cast<double>(j));
  CHECK(testutil::jacobi_rank(a, 1e-8) == 8);
  BacaConfig cfg;
  cfg.block_size = 4;
  cfg.eps = 1e-8;
  cfg.seed = 2;
  const auto res = baca_compress(DenseOracle<Real>(a), cfg);
  CHECK(res.history.termination == Termination::converged);
  CHECK(res.svd.rank() == 8);
  CHECK(rel_diff(to_dense(res.svd), a) <= 1e-10);
  check_svd_invariants(res.svd);
  check_history(res, 4);
}

TEST_CASE("baca recompression trims an overestimated rank") {
  const DenseMatrix<Real> a = densify_serial(*product_of_random_oracle(64, 8, 4));
  BacaConfig cfg;
  cfg.block_size = 6;
  cfg.eps = 1e-8;
  const auto res = baca_compress(DenseOracle<Real>(a), cfg);
  CHECK(testutil::jacobi_rank(a, 1e-8) == 8);
  CHECK(res.raw.rank() >= 8);
  CHECK(res.svd.rank() == 8);
}

TEST_CASE("baca invariants on kernel matrices") {
  const auto cloud = two_clusters(120, 3, 1.5, 7);
  const auto oracle = offdiag_oracle<Real>(Gaussian{0.8}, cloud);
  const DenseMatrix<Real> a = densify_serial(*oracle);
  for (Index d : {1, 3, 8, 20}) {
    BacaConfig cfg;
    cfg.block_size = d;
    cfg.eps = 1e-6;
    cfg.seed = static_cast<std::uint64_t>(d);
    const auto res = baca_compress(*oracle, cfg);
    CAPTURE(d);
    check_history(res, d);
    check_svd_invariants(res.svd);
    CHECK(res.svd.rank() <= res.raw.rank());
    if (d > 1) CHECK(rel_diff(to_dense(res.svd), a) <= 100 * cfg.eps);
  }
}

TEST_CASE("baca on the complex Hankel kernel") {
  const double k = 40.0;
  const auto oracle = offdiag_oracle<Complex>(Hankel2D{k}, strip_cloud(15, k));
  const DenseMatrix<Complex> a = densify_serial(*oracle);
  BacaConfig cfg;
  cfg.block_size = 8;
  cfg.eps = 1e-6;
  const auto res = baca_compress(*oracle, cfg);
  check_svd_invariants(res.svd);
  CHECK(rel_diff(to_dense(res.svd), a) <= 100 * cfg.eps);
}

TEST_CASE("baca degenerate handling") {
  SUBCASE("zero oracle exhausts the retries") {
    BacaConfig cfg;
    cfg.block_size = 2;
    const auto res = baca_compress(DenseOracle<Real>(DenseMatrix<Real>::Zero(20, 20)), cfg);
    CHECK(res.history.degenerate());
    CHECK(res.degenerate_retries == cfg.max_degenerate_retries + 1);
    CHECK(res.svd.rank() == 0);
  }
  SUBCASE("zero columns in the first block are resampled") {
    DenseMatrix<Real> a = DenseMatrix<Real>::Zero(10, 10);
    a.col(7) = gaussian_matrix(10, 1, 3);
    BacaConfig cfg;
    cfg.block_size = 1;
    cfg.initial_columns = IndexList{0};
    cfg.eps = 1e-8;
    const auto res = baca_compress(DenseOracle<Real>(a), cfg);
    CHECK(res.degenerate_retries >= 1);
    if (!res.history.degenerate()) {
      CHECK(res.svd.rank() == 1);
      CHECK(rel_diff(to_dense(res.svd), a) <= 1e-12);
    }
  }
}

TEST_CASE("baca is repeatable for a fixed seed") {
  const auto oracle = product_of_random_oracle(80, 12, 5);
  BacaConfig cfg;
  cfg.block_size = 4;
  cfg.seed = 77;
  const auto r1 = baca_compress(*oracle, cfg);
  const auto r2 = baca_compress(*oracle, cfg);
  CHECK(r1.raw.u == r2.raw.u);
  CHECK(r1.svd.sigma == r2.svd.sigma);
  for (Index k = 0; k < r1.history.iterations(); ++k)
    CHECK(r1.history.records[k].cols == r2.history.records[k].cols);
}
