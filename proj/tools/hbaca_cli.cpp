// Command-line driver: `hbaca run ...` for a single compression and
// `hbaca scaling ...` for an (n_b, workers) sweep written as CSV.

#include <charconv>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbaca/job.hpp"

namespace {

using hbaca::Index;
using hbaca::JobConfig;

struct RawOptions {
  std::string kernel = "prodrand";
  std::string algorithm = "baca";
  std::string history_out;
  std::string summary_out;
  std::string points_file;
};

void add_common(CLI::App& app, JobConfig& c, RawOptions& raw) {
  app.set_help_flag("--help", "print this help and exit");
  app.add_option("--kernel", raw.kernel, "gaussian|polynomial|hankel2d|prodrand|dense-file")
      ->capture_default_str();
  app.add_option("--n", c.n, "matrix side (points per cluster for point kernels)");
  app.add_option("--inner-rank", c.inner_rank, "inner rank of the prodrand kernel");
  app.add_option("--h", c.h, "gaussian width or polynomial regularization")->capture_default_str();
  app.add_option("--wavenumber", c.wavenumber, "hankel2d wavenumber (default from --n and --ppw)");
  app.add_option("--ppw", c.ppw, "hankel2d points per wavelength")->capture_default_str();
  app.add_option("--points-file", raw.points_file,
                 "point cloud (gaussian/polynomial) or matrix (dense-file)");
  app.add_option("--dim", c.dim, "dimension of generated clusters (gaussian 8, polynomial 50)");
  app.add_option("--separation", c.separation, "shift of the second cluster along axis 0")
      ->capture_default_str();
  app.add_option("--data-seed", c.data_seed, "seed for generated data (default --seed)");
  app.add_option("--d", c.d, "BACA block size")->capture_default_str();
  app.add_option("--eps", c.eps, "relative tolerance")->capture_default_str();
  app.add_option("--seed", c.seed, "seed for pivot sampling")->capture_default_str();
  app.add_flag("--verify", c.verify, "compare against the densified matrix");
  app.add_flag("--strict", c.strict, "exit with status 3 on degenerate termination");
}

void finish(JobConfig& c, const RawOptions& raw) {
  c.kernel = hbaca::parse_kernel(raw.kernel);
  c.algorithm = hbaca::parse_algorithm(raw.algorithm);
  if (!raw.points_file.empty()) c.points_file = raw.points_file;
  if (!raw.history_out.empty()) c.history_out = raw.history_out;
  if (!raw.summary_out.empty()) c.summary_out = raw.summary_out;
}

template <class Int>
std::vector<Int> parse_list(const std::string& text, const char* flag) {
  std::vector<Int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    Int v{};
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
      throw hbaca::UsageError(std::string(flag) + ": bad list '" + text + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank compression with ACA, blocked ACA and hierarchical blocked ACA"};
  app.require_subcommand(1);
  // `--h` is the kernel width, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");

  JobConfig run_cfg;
  RawOptions run_raw;
  auto* run = app.add_subcommand("run", "compress one matrix");
  add_common(*run, run_cfg, run_raw);
  run->add_option("--algorithm", run_raw.algorithm, "aca|baca|hbaca")->capture_default_str();
  run->add_option("--nb", run_cfg.n_b, "number of leaf blocks (power of 4, hbaca)")
      ->capture_default_str();
  run->add_option("--workers", run_cfg.workers, "OpenMP threads")->capture_default_str();
  run->add_option("--history-out", run_raw.history_out, "convergence history CSV");
  run->add_option("--summary-out", run_raw.summary_out, "summary JSON");

  JobConfig scale_cfg;
  RawOptions scale_raw;
  scale_raw.algorithm = "hbaca";
  std::string nb_list = "1,4,16";
  std::string worker_list = "1";
  std::string csv_out;
  auto* scaling = app.add_subcommand("scaling", "rerun hbaca over n_b and worker lists");
  add_common(*scaling, scale_cfg, scale_raw);
  scaling->add_option("--nb", nb_list, "comma list of leaf block counts")->capture_default_str();
  scaling->add_option("--workers", worker_list, "comma list of thread counts")
      ->capture_default_str();
  scaling->add_option("--csv-out", csv_out, "write the CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      finish(run_cfg, run_raw);
      const auto result = hbaca::run_job(run_cfg);
      std::cout << hbaca::summary_to_json(result.summary) << '\n';
      return hbaca::exit_status(run_cfg, result.summary);
    }
    finish(scale_cfg, scale_raw);
    const auto nbs = parse_list<Index>(nb_list, "--nb");
    const auto workers = parse_list<int>(worker_list, "--workers");
    const auto rows = hbaca::run_scaling(scale_cfg, nbs, workers);
    if (csv_out.empty()) {
      hbaca::write_scaling_csv(rows, std::cout);
    } else {
      std::ofstream f(csv_out);
      if (!f) throw std::runtime_error(csv_out + ": cannot open for writing");
      hbaca::write_scaling_csv(rows, f);
      if (!f) throw std::runtime_error(csv_out + ": write failed");
    }
    if (scale_cfg.strict)
      for (const auto& s : rows)
        if (s.degenerate) return 3;
    return 0;
  } catch (const hbaca::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
