#include "ttw/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "simplex.hpp"

namespace ttw {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

namespace {

using detail::DualSimplex;
using detail::kInf;
using detail::LpProblem;
using detail::LpStatus;
using Clock = std::chrono::steady_clock;

constexpr std::int64_t kMaxMagnitude = std::int64_t{1} << 52;
constexpr double kIntegralityTolerance = 1e-6;
constexpr std::size_t kFrontierSize = 16;
constexpr std::int64_t kNoIncumbent = std::numeric_limits<std::int64_t>::max();

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Builds the relaxation. Rows whose coefficients share a factor are divided
// through and their right-hand side rounded inward, which is exact for
// integer variables and tightens the relaxation. Returns nullopt when some
// row is infeasible on its own.
std::optional<LpProblem> relax(const IlpInstance& ilp) {
  LpProblem lp;
  lp.num_cols = static_cast<int>(ilp.variables.size());
  lp.columns.resize(lp.num_cols);
  lp.cost.assign(lp.num_cols, 0.0);
  for (const auto& t : ilp.objective) lp.cost[t.var] += static_cast<double>(t.coef);
  for (const auto& c : ilp.constraints) {
    std::int64_t g = 0;
    for (const auto& t : c.terms) g = std::gcd(g, t.coef < 0 ? -t.coef : t.coef);
    if (g == 0) {
      const bool ok = c.relation == Relation::kLessEqual  ? 0 <= c.rhs
                      : c.relation == Relation::kEqual ? c.rhs == 0
                                                       : 0 >= c.rhs;
      if (!ok) return std::nullopt;
      continue;
    }
    double lo = -kInf;
    double hi = kInf;
    switch (c.relation) {
      case Relation::kLessEqual: hi = static_cast<double>(floor_div(c.rhs, g)); break;
      case Relation::kGreaterEqual: lo = static_cast<double>(ceil_div(c.rhs, g)); break;
      case Relation::kEqual:
        if (c.rhs % g != 0) return std::nullopt;
        lo = hi = static_cast<double>(c.rhs / g);
        break;
    }
    const int row = lp.num_rows++;
    for (const auto& t : c.terms) {
      lp.columns[t.var].emplace_back(row, static_cast<double>(t.coef / g));
    }
    lp.row_lower.push_back(lo);
    lp.row_upper.push_back(hi);
  }
  return lp;
}

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  std::optional<DualSimplex> start;  // warm start; a fresh basis if empty
};

struct Candidate {
  std::int64_t objective = kNoIncumbent;
  std::vector<std::int64_t> values;
};

class Search {
 public:
  Search(const IlpInstance& ilp, const LpProblem& lp, const SolverOptions& options)
      : ilp_(ilp), lp_(lp), options_(options), started_(Clock::now()) {
    root_lower_.reserve(ilp.variables.size());
    root_upper_.reserve(ilp.variables.size());
    for (const auto& v : ilp.variables) {
      root_lower_.push_back(static_cast<double>(v.lower));
      root_upper_.push_back(static_cast<double>(v.upper));
    }
    max_iterations_ = 1000 + 50L * (lp.num_cols + lp.num_rows);
  }

  SolverSolution run();

 private:
  enum class Outcome { kPruned, kLeaf, kBranched };

  // Solves one node and either records a leaf, prunes it, or produces the
  // floor and ceil children (floor first).
  Outcome process(Node node, std::int64_t local_best, Candidate& leaf, Node& floor_child,
                  Node& ceil_child, bool& is_root);
  bool timed_out();
  void offer_shared(std::int64_t objective);
  Candidate explore(Node root);

  const IlpInstance& ilp_;
  const LpProblem& lp_;
  SolverOptions options_;
  Clock::time_point started_;
  std::vector<double> root_lower_;
  std::vector<double> root_upper_;
  long max_iterations_ = 0;

  std::atomic<std::int64_t> shared_best_{kNoIncumbent};
  std::atomic<bool> stop_{false};
  std::atomic<std::int64_t> nodes_{0};
  std::atomic<std::int64_t> iterations_{0};
  double root_bound_ = 0;
  bool root_infeasible_ = false;
};

bool Search::timed_out() {
  if (stop_.load(std::memory_order_relaxed)) return true;
  if (options_.budget_ms <= 0) return false;
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started_).count();
  if (elapsed >= options_.budget_ms) {
    stop_.store(true);
    return true;
  }
  return false;
}

void Search::offer_shared(std::int64_t objective) {
  std::int64_t cur = shared_best_.load();
  while (objective < cur && !shared_best_.compare_exchange_weak(cur, objective)) {
  }
}

Search::Outcome Search::process(Node node, std::int64_t local_best, Candidate& leaf,
                                Node& floor_child, Node& ceil_child, bool& is_root) {
  nodes_.fetch_add(1, std::memory_order_relaxed);
  DualSimplex simplex = node.start ? std::move(*node.start)
                                   : DualSimplex(&lp_, node.lower, node.upper);
  for (int j = 0; j < lp_.num_cols; ++j) {
    if (simplex.lower(j) != node.lower[j] || simplex.upper(j) != node.upper[j]) {
      simplex.set_bounds(j, node.lower[j], node.upper[j]);
    }
  }
  const long before = simplex.iterations();
  LpStatus status = simplex.solve(max_iterations_);
  if (status == LpStatus::kIterationLimit || status == LpStatus::kNumericalFailure) {
    simplex.reset();
    status = simplex.solve(max_iterations_);
  }
  iterations_.fetch_add(simplex.iterations() - before, std::memory_order_relaxed);

  const bool root = is_root;
  is_root = false;
  if (status == LpStatus::kInfeasible) {
    if (root) root_infeasible_ = true;
    return Outcome::kPruned;
  }

  int branch = -1;
  double split = 0;
  if (status == LpStatus::kOptimal) {
    const double bound = simplex.objective() + static_cast<double>(ilp_.objective_constant);
    if (root) root_bound_ = bound;
    const double slack = 1e-6 * std::max(1.0, std::abs(bound));
    const double lifted = std::ceil(bound - slack);
    if (lifted >= static_cast<double>(local_best)) return Outcome::kPruned;
    if (lifted > static_cast<double>(shared_best_.load(std::memory_order_relaxed))) {
      return Outcome::kPruned;
    }
    for (int j = 0; j < lp_.num_cols; ++j) {
      const double v = simplex.value(j);
      if (std::abs(v - std::round(v)) > kIntegralityTolerance) {
        branch = j;
        split = std::floor(v);
        break;
      }
    }
    if (branch < 0) {
      std::vector<std::int64_t> values(lp_.num_cols);
      for (int j = 0; j < lp_.num_cols; ++j) {
        values[j] = std::llround(std::clamp(simplex.value(j), node.lower[j], node.upper[j]));
      }
      if (satisfies(ilp_, values)) {
        leaf.objective = evaluate_objective(ilp_, values);
        leaf.values = std::move(values);
        return Outcome::kLeaf;
      }
    }
  } else if (root) {
    root_bound_ = -kInf;
  }
  if (branch < 0) {
    // No usable relaxation answer: split the domain of the first free
    // variable so the search stays exhaustive.
    for (int j = 0; j < lp_.num_cols; ++j) {
      if (node.lower[j] < node.upper[j]) {
        branch = j;
        split = std::floor((node.lower[j] + node.upper[j]) / 2);
        break;
      }
    }
    if (branch < 0) return Outcome::kPruned;
    if (status != LpStatus::kOptimal) simplex.reset();
  }

  ceil_child.lower = node.lower;
  ceil_child.upper = node.upper;
  ceil_child.lower[branch] = split + 1;
  floor_child.lower = std::move(node.lower);
  floor_child.upper = std::move(node.upper);
  floor_child.upper[branch] = split;
  ceil_child.start = simplex;
  floor_child.start = std::move(simplex);
  return Outcome::kBranched;
}

Candidate Search::explore(Node root) {
  Candidate best;
  std::vector<Node> stack;
  stack.push_back(std::move(root));
  bool is_root = false;
  while (!stack.empty()) {
    if (timed_out()) break;
    Node node = std::move(stack.back());
    stack.pop_back();
    Candidate leaf;
    Node floor_child;
    Node ceil_child;
    switch (process(std::move(node), best.objective, leaf, floor_child, ceil_child, is_root)) {
      case Outcome::kPruned: break;
      case Outcome::kLeaf:
        if (leaf.objective < best.objective) {
          best = std::move(leaf);
          offer_shared(best.objective);
        }
        break;
      case Outcome::kBranched:
        stack.push_back(std::move(ceil_child));
        stack.push_back(std::move(floor_child));
        break;
    }
  }
  return best;
}

SolverSolution Search::run() {
  SolverSolution out;
  // Deterministic breadth-first expansion into a fixed number of subtrees,
  // which are then searched depth first, possibly in parallel.
  std::deque<Node> frontier;
  frontier.push_back(Node{root_lower_, root_upper_, std::nullopt});
  Candidate best;
  bool is_root = true;
  while (!frontier.empty() && frontier.size() < kFrontierSize && !timed_out()) {
    Node node = std::move(frontier.front());
    frontier.pop_front();
    Candidate leaf;
    Node floor_child;
    Node ceil_child;
    switch (process(std::move(node), best.objective, leaf, floor_child, ceil_child, is_root)) {
      case Outcome::kPruned: break;
      case Outcome::kLeaf:
        if (leaf.objective < best.objective) {
          best = std::move(leaf);
          offer_shared(best.objective);
        }
        break;
      case Outcome::kBranched:
        frontier.push_back(std::move(floor_child));
        frontier.push_back(std::move(ceil_child));
        break;
    }
  }

  std::vector<Node> subtrees(std::make_move_iterator(frontier.begin()),
                             std::make_move_iterator(frontier.end()));
  std::vector<Candidate> results(subtrees.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < subtrees.size(); i = next.fetch_add(1)) {
      results[i] = explore(std::move(subtrees[i]));
    }
  };
  const int workers = std::max(1, std::min<int>(options_.workers, static_cast<int>(subtrees.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& r : results) {
    if (r.objective < best.objective) best = std::move(r);
  }

  out.stats.nodes = nodes_.load();
  out.stats.lp_iterations = iterations_.load();
  out.stats.root_bound = root_bound_;
  out.stats.root_infeasible = root_infeasible_;
  out.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - started_).count();
  out.has_incumbent = best.objective != kNoIncumbent;
  if (out.has_incumbent) {
    out.values = std::move(best.values);
    out.objective = best.objective;
  }
  if (stop_.load()) {
    out.status = SolveStatus::kTimeout;
  } else {
    out.status = out.has_incumbent ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
  }
  return out;
}

}  // namespace

SolverSolution solve(const IlpInstance& ilp, const SolverOptions& options) {
  for (const auto& v : ilp.variables) {
    if (v.lower <= -kMaxMagnitude || v.upper >= kMaxMagnitude) {
      throw SolverError("variable " + v.name + " is unbounded or its bound is too large");
    }
  }
  for (const auto& c : ilp.constraints) {
    for (const auto& t : c.terms) {
      if (t.coef <= -kMaxMagnitude || t.coef >= kMaxMagnitude) {
        throw SolverError("coefficient too large in constraint " + c.name);
      }
    }
  }
  SolverSolution out;
  for (const auto& v : ilp.variables) {
    if (v.lower > v.upper) {
      out.stats.root_infeasible = true;
      return out;
    }
  }
  const auto lp = relax(ilp);
  if (!lp) {
    out.stats.root_infeasible = true;
    return out;
  }
  Search search(ilp, *lp, options);
  return search.run();
}

}  // namespace ttw
