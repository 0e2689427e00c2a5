#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hbaca/factor_core.hpp"
#include "hbaca/history.hpp"
#include "hbaca/kernels.hpp"

namespace hbaca {

enum class KernelKind { gaussian, polynomial, hankel2d, prodrand, dense_file };
enum class Algorithm { aca, baca, hbaca };

std::string to_string(KernelKind k);
std::string to_string(Algorithm a);
KernelKind parse_kernel(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

/// Bad job configuration; the CLI turns it into a usage error.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct JobConfig {
  KernelKind kernel = KernelKind::prodrand;
  Algorithm algorithm = Algorithm::baca;
  Index n = 0;           // matrix side (points per side for point kernels)
  Index inner_rank = 0;  // prodrand
  double h = 1.0;        // gaussian width / polynomial regularization
  std::optional<double> wavenumber;
  double ppw = 15.0;     // hankel2d points per wavelength
  std::optional<Index> dim;
  double separation = 0.0;  // shift of the column cluster for random clouds
  std::optional<std::filesystem::path> points_file;
  Index d = 16;
  Index n_b = 1;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;  // defaults to seed
  int workers = 1;
  bool verify = false;
  bool strict = false;
  Index verify_cap = 4096;
  std::optional<std::filesystem::path> history_out;
  std::optional<std::filesystem::path> summary_out;
};

/// Throws UsageError describing the first violated constraint.
void validate(const JobConfig& config);

struct RunSummary {
  std::string algorithm;
  std::string kernel;
  Index n = 0;
  Index d = 0;
  Index n_b = 1;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int workers = 1;
  Index rank = 0;
  std::optional<double> rel_error;
  double time_leaf_s = 0.0;
  double time_merge_s = 0.0;
  double time_total_s = 0.0;
  Index iterations = 0;
  std::vector<Index> level_ranks;
  bool degenerate = false;

  bool operator==(const RunSummary&) const = default;
};

std::string summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const std::string& text);

struct JobResult {
  RunSummary summary;
  ConvergenceHistory history;
};

/// Builds the oracle, runs the configured compressor, optionally verifies,
/// and writes the requested history/summary files.
JobResult run_job(const JobConfig& config);

/// Exit status for a finished job: 3 for a degenerate run under --strict, else 0.
int exit_status(const JobConfig& config, const RunSummary& summary);

using AnyOracle = std::variant<OraclePtr<Real>, OraclePtr<Complex>>;
AnyOracle build_oracle(const JobConfig& config);

/// CSV `k,rank,nu,mu,residual_ratio`, shortest round-trip decimal formatting.
void write_history(const ConvergenceHistory& history, const std::filesystem::path& path);
void write_history(const ConvergenceHistory& history, std::ostream& out);

/// Refuses when rows * cols exceeds cap^2.
class VerificationRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ||A - U S V||_F / ||A||_F against the densified oracle.
template <Scalar T>
double verify_against_dense(const EntryOracle<T>& oracle, const LowRankFactors<T>& result,
                            Index cap = 4096, int workers = 1);

/// Reruns `base` for every (n_b, workers) pair.
std::vector<RunSummary> run_scaling(const JobConfig& base, const std::vector<Index>& nb_values,
                                   const std::vector<int>& worker_values);
void write_scaling_csv(const std::vector<RunSummary>& rows, std::ostream& out);

}  // namespace hbaca
