#include "difference_constraints.hpp"

namespace ttw::detail {

int DifferenceSystem::add_variable() { return num_vars_++; }

void DifferenceSystem::add(int a, int b, std::int64_t c) { edges_.push_back(Edge{b, a, c}); }

std::optional<std::vector<std::int64_t>> DifferenceSystem::potentials() const {
  // Bellman-Ford from a virtual source joined to every vertex by weight 0.
  std::vector<std::int64_t> dist(num_vars_, 0);
  for (int pass = 0; pass <= num_vars_; ++pass) {
    bool changed = false;
    for (const auto& e : edges_) {
      if (dist[e.from] + e.weight < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.weight;
        changed = true;
      }
    }
    if (!changed) return dist;
  }
  return std::nullopt;
}

bool DifferenceSystem::feasible() const { return potentials().has_value(); }

std::optional<std::vector<std::int64_t>> DifferenceSystem::solve(int origin) const {
  auto dist = potentials();
  if (!dist) return std::nullopt;
  const std::int64_t shift = (*dist)[origin];
  for (auto& d : *dist) d -= shift;
  return dist;
}

}  // namespace ttw::detail
