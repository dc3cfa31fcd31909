#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ttw::detail {

// Conjunction of x_a - x_b <= c over integer variables. Feasibility is a
// negative-cycle test on the constraint graph; with integer bounds the
// shortest-path potentials are an integer solution.
class DifferenceSystem {
 public:
  int add_variable();
  int size() const { return num_vars_; }

  void add(int a, int b, std::int64_t c);  // x_a - x_b <= c
  std::size_t mark() const { return edges_.size(); }
  void rollback(std::size_t mark) { edges_.resize(mark); }

  // A solution with x_origin = 0, or nullopt if the system is infeasible.
  std::optional<std::vector<std::int64_t>> solve(int origin) const;
  bool feasible() const;

 private:
  struct Edge {
    int from;
    int to;
    std::int64_t weight;
  };
  std::optional<std::vector<std::int64_t>> potentials() const;

  int num_vars_ = 0;
  std::vector<Edge> edges_;
};

}  // namespace ttw::detail
