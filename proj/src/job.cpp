#include "hbaca/job.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "hbaca/aca.hpp"
#include "hbaca/baca.hpp"
#include "hbaca/dense_ops.hpp"
#include "hbaca/hmerge.hpp"
#include "hbaca/random.hpp"

namespace hbaca {

namespace {

const std::pair<KernelKind, const char*> kKernelNames[] = {
    {KernelKind::gaussian, "gaussian"},     {KernelKind::polynomial, "polynomial"},
    {KernelKind::hankel2d, "hankel2d"},     {KernelKind::prodrand, "prodrand"},
    {KernelKind::dense_file, "dense-file"},
};

const std::pair<Algorithm, const char*> kAlgorithmNames[] = {
    {Algorithm::aca, "aca"}, {Algorithm::baca, "baca"}, {Algorithm::hbaca, "hbaca"}};

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string to_string(KernelKind k) {
  for (auto [kind, name] : kKernelNames)
    if (kind == k) return name;
  return "unknown";
}

std::string to_string(Algorithm a) {
  for (auto [alg, name] : kAlgorithmNames)
    if (alg == a) return name;
  return "unknown";
}

KernelKind parse_kernel(const std::string& s) {
  for (auto [kind, name] : kKernelNames)
    if (s == name) return kind;
  throw UsageError("unknown kernel '" + s + "'");
}

Algorithm parse_algorithm(const std::string& s) {
  for (auto [alg, name] : kAlgorithmNames)
    if (s == name) return alg;
  throw UsageError("unknown algorithm '" + s + "'");
}

void validate(const JobConfig& c) {
  if (c.n < 0) throw UsageError("--n must be positive");
  switch (c.kernel) {
    case KernelKind::prodrand:
      if (c.n == 0) throw UsageError("--n must be positive");
      if (c.inner_rank < 1 || c.inner_rank > c.n)
        throw UsageError("prodrand needs 1 <= --inner-rank <= --n");
      break;
    case KernelKind::hankel2d:
      if (c.n == 0 && !c.wavenumber) throw UsageError("hankel2d needs --n or --wavenumber");
      if (c.wavenumber && !(*c.wavenumber > 0.0)) throw UsageError("--wavenumber must be positive");
      if (!(c.ppw > 0.0)) throw UsageError("--ppw must be positive");
      break;
    case KernelKind::dense_file:
      if (!c.points_file) throw UsageError("dense-file needs --points-file");
      break;
    default:
      if (c.n == 0 && !c.points_file) throw UsageError("--n must be positive");
      if (c.kernel == KernelKind::gaussian && !(c.h > 0.0))
        throw UsageError("gaussian kernel needs --h > 0");
      if (c.dim && *c.dim < 1) throw UsageError("--dim must be positive");
      break;
  }
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
  if (c.d < 1) throw UsageError("--d must be >= 1");
  if (c.workers < 1) throw UsageError("--workers must be >= 1");
  try {
    merge_levels(c.n_b);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("--nb: ") + e.what());
  }
  if (c.algorithm != Algorithm::hbaca && c.n_b != 1)
    throw UsageError("--nb applies to --algorithm hbaca only");
  if (c.verify && c.n > c.verify_cap)
    throw UsageError("--verify is limited to n <= " + std::to_string(c.verify_cap));
}

AnyOracle build_oracle(const JobConfig& c) {
  validate(c);
  const std::uint64_t data_seed = c.data_seed.value_or(c.seed);
  switch (c.kernel) {
    case KernelKind::prodrand:
      return OraclePtr<Real>(product_of_random_oracle(c.n, c.inner_rank, data_seed));
    case KernelKind::dense_file:
      return dense_oracle<Real>(read_dense_matrix(*c.points_file));
    case KernelKind::hankel2d: {
      const double k = c.wavenumber ? *c.wavenumber
                                    : 2.0 * std::numbers::pi * static_cast<double>(c.n) / c.ppw;
      const PointCloud cloud = strip_cloud(c.ppw, k);
      if (c.n != 0 && cloud.count() != 2 * c.n)
        throw UsageError("--n does not match the strip discretization (" +
                         std::to_string(cloud.count() / 2) + " points per strip)");
      return offdiag_oracle<Complex>(Hankel2D{k}, cloud);
    }
    default: {
      const Index dim = c.dim.value_or(c.kernel == KernelKind::gaussian ? 8 : 50);
      PointCloud cloud = c.points_file ? read_point_file(*c.points_file)
                                       : two_clusters(c.n, dim, c.separation, data_seed);
      if (c.points_file && c.n != 0 && cloud.count() != 2 * c.n)
        throw UsageError("--n must be half the number of points in --points-file");
      const PointKernel kernel = c.kernel == KernelKind::gaussian ? PointKernel(Gaussian{c.h})
                                                                  : PointKernel(Polynomial{c.h});
      return offdiag_oracle<Real>(kernel, cloud);
    }
  }
}

void write_history(const ConvergenceHistory& history, std::ostream& out) {
  out << "k,rank,nu,mu,residual_ratio\n";
  for (const auto& rec : history.records) {
    const double ratio = rec.mu > 0.0 ? rec.nu / rec.mu : 0.0;
    out << rec.k << ',' << rec.rank << ',' << format_double(rec.nu) << ','
        << format_double(rec.mu) << ',' << format_double(ratio) << '\n';
  }
}

void write_history(const ConvergenceHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  write_history(history, out);
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

template <Scalar T>
double verify_against_dense(const EntryOracle<T>& oracle, const LowRankFactors<T>& result,
                            Index cap, int workers) {
  const double cells = static_cast<double>(oracle.rows()) * static_cast<double>(oracle.cols());
  if (cells > static_cast<double>(cap) * static_cast<double>(cap))
    throw VerificationRefused("dense verification refused: " + std::to_string(oracle.rows()) +
                              " x " + std::to_string(oracle.cols()) + " exceeds the cap of " +
                              std::to_string(cap) + "^2 entries");
  const DenseMatrix<T> a = densify(oracle, workers);
  return frobenius_error(a, result, workers).relative();
}

template double verify_against_dense<Real>(const EntryOracle<Real>&, const LowRankFactors<Real>&,
                                           Index, int);
template double verify_against_dense<Complex>(const EntryOracle<Complex>&,
                                              const LowRankFactors<Complex>&, Index, int);

std::string summary_to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["algorithm"] = s.algorithm;
  j["kernel"] = s.kernel;
  j["n"] = s.n;
  j["d"] = s.d;
  j["n_b"] = s.n_b;
  j["epsilon"] = s.epsilon;
  j["seed"] = s.seed;
  j["workers"] = s.workers;
  j["rank"] = s.rank;
  if (s.rel_error) j["rel_error"] = *s.rel_error;
  j["time_leaf_s"] = s.time_leaf_s;
  j["time_merge_s"] = s.time_merge_s;
  j["time_total_s"] = s.time_total_s;
  j["iterations"] = s.iterations;
  j["level_ranks"] = s.level_ranks;
  j["degenerate"] = s.degenerate;
  return j.dump(2);
}

RunSummary summary_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunSummary s;
  j.at("algorithm").get_to(s.algorithm);
  j.at("kernel").get_to(s.kernel);
  j.at("n").get_to(s.n);
  j.at("d").get_to(s.d);
  j.at("n_b").get_to(s.n_b);
  j.at("epsilon").get_to(s.epsilon);
  j.at("seed").get_to(s.seed);
  j.at("workers").get_to(s.workers);
  j.at("rank").get_to(s.rank);
  if (j.contains("rel_error")) s.rel_error = j.at("rel_error").get<double>();
  j.at("time_leaf_s").get_to(s.time_leaf_s);
  j.at("time_merge_s").get_to(s.time_merge_s);
  j.at("time_total_s").get_to(s.time_total_s);
  j.at("iterations").get_to(s.iterations);
  j.at("level_ranks").get_to(s.level_ranks);
  j.at("degenerate").get_to(s.degenerate);
  return s;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <Scalar T>
JobResult run_with(const JobConfig& c, const OraclePtr<T>& oracle) {
  JobResult out;
  RunSummary& s = out.summary;
  s.algorithm = to_string(c.algorithm);
  s.kernel = to_string(c.kernel);
  s.n = oracle->rows();
  s.d = c.d;
  s.n_b = c.n_b;
  s.epsilon = c.eps;
  s.seed = c.seed;
  s.workers = c.workers;

  LowRankFactors<T> factors;
  const auto start = std::chrono::steady_clock::now();
  switch (c.algorithm) {
    case Algorithm::aca: {
      AcaConfig cfg;
      cfg.eps = c.eps;
      cfg.seed = c.seed;
      auto res = aca_compress<T>(*oracle, cfg);
      factors = std::move(res.factors);
      out.history = std::move(res.history);
      s.time_leaf_s = seconds_since(start);
      s.level_ranks = {factors.rank()};
      break;
    }
    case Algorithm::baca: {
      BacaConfig cfg;
      cfg.block_size = c.d;
      cfg.eps = c.eps;
      cfg.seed = c.seed;
      auto res = baca_compress<T>(*oracle, cfg);
      factors = as_factors(res.svd);
      out.history = std::move(res.history);
      s.time_leaf_s = seconds_since(start);
      s.level_ranks = {factors.rank()};
      break;
    }
    case Algorithm::hbaca: {
      BacaConfig cfg;
      cfg.block_size = c.d;
      cfg.eps = c.eps;
      cfg.seed = c.seed;
      auto res = hbaca_compress<T>(oracle, c.n_b, cfg, c.workers);
      factors = as_factors(res.svd);
      out.history = std::move(res.first_leaf_history);
      const auto& diag = res.diagnostics;
      s.time_leaf_s = diag.time_leaf_s;
      s.time_merge_s = diag.time_merge_s;
      s.level_ranks = diag.level_ranks;
      s.degenerate = diag.degenerate;
      for (const auto& leaf : diag.leaves) s.iterations += leaf.iterations;
      break;
    }
  }
  s.time_total_s = seconds_since(start);
  s.rank = factors.rank();
  if (c.algorithm != Algorithm::hbaca) {
    s.iterations = out.history.iterations();
    s.degenerate = out.history.degenerate();
  }

  if (c.verify) {
    try {
      s.rel_error = verify_against_dense<T>(*oracle, factors, c.verify_cap, c.workers);
    } catch (const VerificationRefused& e) {
      throw UsageError(e.what());
    }
  }
  if (c.history_out) write_history(out.history, *c.history_out);
  if (c.summary_out) {
    std::ofstream f(*c.summary_out);
    if (!f) throw std::runtime_error(c.summary_out->string() + ": cannot open for writing");
    f << summary_to_json(s) << '\n';
    if (!f) throw std::runtime_error(c.summary_out->string() + ": write failed");
  }
  return out;
}

}  // namespace

JobResult run_job(const JobConfig& config) {
  const AnyOracle oracle = build_oracle(config);
  return std::visit([&](const auto& o) { return run_with(config, o); }, oracle);
}

int exit_status(const JobConfig& config, const RunSummary& summary) {
  return config.strict && summary.degenerate ? 3 : 0;
}

std::vector<RunSummary> run_scaling(const JobConfig& base, const std::vector<Index>& nb_values,
                                   const std::vector<int>& worker_values) {
  std::vector<RunSummary> rows;
  for (Index nb : nb_values) {
    for (int w : worker_values) {
      JobConfig c = base;
      c.algorithm = Algorithm::hbaca;
      c.n_b = nb;
      c.workers = w;
      c.history_out.reset();
      c.summary_out.reset();
      rows.push_back(run_job(c).summary);
    }
  }
  return rows;
}

void write_scaling_csv(const std::vector<RunSummary>& rows, std::ostream& out) {
  out << "algorithm,kernel,n,d,n_b,workers,epsilon,rank,rel_error,time_leaf_s,time_merge_s,"
         "time_total_s,degenerate\n";
  for (const auto& s : rows) {
    out << s.algorithm << ',' << s.kernel << ',' << s.n << ',' << s.d << ',' << s.n_b << ','
        << s.workers << ',' << format_double(s.epsilon) << ',' << s.rank << ','
        << (s.rel_error ? format_double(*s.rel_error) : std::string()) << ','
        << format_double(s.time_leaf_s) << ',' << format_double(s.time_merge_s) << ','
        << format_double(s.time_total_s) << ',' << (s.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace hbaca
