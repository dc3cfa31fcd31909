#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace ttw::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// min c'x  s.t.  row_lower <= A x <= row_upper,  lower <= x <= upper.
// Structural bounds must be finite; row bounds may be infinite.
struct LpProblem {
  int num_cols = 0;
  int num_rows = 0;
  std::vector<std::vector<std::pair<int, double>>> columns;  // (row, coef)
  std::vector<double> cost;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit, kNumericalFailure };

// Dual simplex on [A -I] [x; y] = 0 with the row activities y as logical
// columns. Starting from the all-logical basis with every structural at the
// bound its cost sign prefers gives a dual feasible basis, so no phase one
// is needed. The object is a value type: copying it snapshots the basis,
// which is how branch-and-bound warm starts a child node.
class DualSimplex {
 public:
  DualSimplex(const LpProblem* problem, std::span<const double> lower,
              std::span<const double> upper);

  // Changes the bounds of a structural column, keeping the basis.
  void set_bounds(int col, double lower, double upper);
  double lower(int col) const { return lower_[col]; }
  double upper(int col) const { return upper_[col]; }

  LpStatus solve(long max_iterations);

  // Drops the basis and restarts from the all-logical one.
  void reset();

  double objective() const;
  double value(int col) const { return x_[col]; }
  long iterations() const { return iterations_; }

 private:
  int total() const { return n_ + m_; }
  double column_dot(int j, const double* row) const;
  void column_times_inverse(int j, std::vector<double>& out) const;
  bool refactor();
  void recompute_primal();
  void recompute_duals();
  void init_slack_basis();
  double primal_tolerance(double bound) const;

  const LpProblem* problem_;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<int> head_;       // basic column per row position
  std::vector<int> position_;   // row position of a basic column, -1 otherwise
  std::vector<char> at_upper_;  // nonbasic columns only
  std::vector<double> binv_;    // dense m x m, row-major
  long iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace ttw::detail
