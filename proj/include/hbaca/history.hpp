#pragma once

#include <vector>

#include "hbaca/matrix.hpp"

namespace hbaca {

enum class Termination {
  converged,   // nu < eps * mu
  exhausted,   // ran out of rows/columns (full rank reached)
  degenerate,  // zero pivot / empty block with retries used up
  max_rank,    // configured rank cap reached
};

const char* to_string(Termination t);

/// One accepted iteration: k is 1-based, rank is cumulative.
struct IterationRecord {
  Index k = 0;
  Index rank = 0;
  double nu = 0.0;
  double mu = 0.0;
  IndexList rows;  // pivot rows kept this iteration
  IndexList cols;  // pivot columns kept this iteration
};

struct ConvergenceHistory {
  std::vector<IterationRecord> records;
  Termination termination = Termination::exhausted;

  bool degenerate() const { return termination == Termination::degenerate; }
  Index iterations() const { return static_cast<Index>(records.size()); }
  Index final_rank() const { return records.empty() ? 0 : records.back().rank; }
};

}  // namespace hbaca
