// Serial reference vs OpenMP paths: densification, Frobenius error, and the
// H-BACA leaf/merge phases. Usage: bench_parallel [n] [workers] [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include <omp.h>

#include "hbaca/dense_ops.hpp"
#include "hbaca/hmerge.hpp"

using namespace hbaca;

namespace {

double median_seconds(int repeats, const std::function<void()>& body) {
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    body();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, same ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  const Index n = argc > 1 ? std::atol(argv[1]) : 1024;
  const int workers = argc > 2 ? std::atoi(argv[2]) : 4;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;
  std::printf("n = %ld, workers = %d, hardware threads = %d, repeats = %d\n",
              static_cast<long>(n), workers, omp_get_num_procs(), repeats);
  std::printf("%-22s %10s %10s %9s\n", "kernel", "serial_s", "omp_s", "speedup");

  const auto cloud = two_clusters(n, 8, 1.0, 11);
  const auto gauss = offdiag_oracle<Real>(Gaussian{1.0}, cloud);

  DenseMatrix<Real> a_serial, a_par;
  const double d_s = median_seconds(repeats, [&] { a_serial = densify_serial(*gauss); });
  const double d_p = median_seconds(repeats, [&] { a_par = densify(*gauss, workers); });
  row("densify", d_s, d_p, a_serial == a_par);

  BacaConfig cfg;
  cfg.block_size = 16;
  cfg.eps = 1e-6;
  cfg.seed = 5;
  const auto approx = as_factors(baca_compress<Real>(*gauss, cfg).svd);
  ErrorNorms e_s, e_p;
  const double f_s = median_seconds(repeats, [&] { e_s = frobenius_error_serial(a_serial, approx); });
  const double f_p = median_seconds(repeats, [&] { e_p = frobenius_error(a_serial, approx, workers); });
  row("frobenius_error", f_s, f_p, e_s.residual == e_p.residual && e_s.reference == e_p.reference);

  const auto prod = std::static_pointer_cast<const EntryOracle<Real>>(
      product_of_random_oracle(n, 64, 3));
  cfg.block_size = 8;
  HbacaResult<Real> h_s, h_p;
  const double hs = median_seconds(repeats, [&] { h_s = hbaca_compress<Real>(prod, 16, cfg, 1); });
  const double hp = median_seconds(repeats, [&] { h_p = hbaca_compress<Real>(prod, 16, cfg, workers); });
  const bool same_rank = h_s.svd.rank() == h_p.svd.rank();
  row("hbaca total (n_b=16)", hs, hp, same_rank);
  row("  leaf phase", h_s.diagnostics.time_leaf_s, h_p.diagnostics.time_leaf_s, same_rank);
  row("  merge phase", h_s.diagnostics.time_merge_s, h_p.diagnostics.time_merge_s, same_rank);
  return 0;
}
