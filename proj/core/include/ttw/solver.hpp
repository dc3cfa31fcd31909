#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ttw/ilp.hpp"

namespace ttw {

// Raised when an instance cannot be loaded, e.g. a bound too large to be
// represented exactly in the relaxation.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveStatus { kOptimal, kInfeasible, kTimeout };

const char* to_string(SolveStatus status);

struct SolverOptions {
  std::int64_t budget_ms = 0;  // 0: no limit
  int workers = 1;
};

struct SolverStats {
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double root_bound = 0;       // LP relaxation value at the root
  bool root_infeasible = false;
  double elapsed_ms = 0;
};

struct SolverSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  bool has_incumbent = false;  // set for optimal, possibly for timeout
  std::vector<std::int64_t> values;
  std::int64_t objective = 0;
  SolverStats stats;
};

// Exact branch-and-bound over an LP relaxation. Branches on the
// lowest-index fractional variable and explores the floor side first. Every
// accepted incumbent is re-verified in integer arithmetic. Without a time
// budget the result does not depend on the number of workers.
SolverSolution solve(const IlpInstance& ilp, const SolverOptions& options = {});

}  // namespace ttw
