#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ttw/io.hpp"

namespace ttw::testing {

std::string data_path(const std::string& name) {
  return std::string(TTW_SOURCE_DIR) + "/data/" + name;
}

std::string test_data_path(const std::string& name) {
  return std::string(TTW_SOURCE_DIR) + "/tests/data/" + name;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SystemSpec load_spec(const std::string& name) { return parse_spec(read_text(data_path(name))); }

namespace {

class Enumerator {
 public:
  explicit Enumerator(const IlpInstance& ilp) : ilp_(ilp), n_(ilp.variables.size()) {
    const std::size_t m = ilp.constraints.size();
    coef_.assign(m, std::vector<std::int64_t>(n_, 0));
    for (std::size_t c = 0; c < m; ++c) {
      for (const auto& t : ilp.constraints[c].terms) coef_[c][t.var] += t.coef;
    }
    obj_.assign(n_, 0);
    for (const auto& t : ilp.objective) obj_[t.var] += t.coef;
    // Activity range of variables i.. over the box.
    suffix_min_.assign(m, std::vector<std::int64_t>(n_ + 1, 0));
    suffix_max_.assign(m, std::vector<std::int64_t>(n_ + 1, 0));
    obj_min_.assign(n_ + 1, 0);
    for (std::size_t i = n_; i-- > 0;) {
      const auto& v = ilp.variables[i];
      for (std::size_t c = 0; c < m; ++c) {
        const std::int64_t a = coef_[c][i] * v.lower;
        const std::int64_t b = coef_[c][i] * v.upper;
        suffix_min_[c][i] = suffix_min_[c][i + 1] + std::min(a, b);
        suffix_max_[c][i] = suffix_max_[c][i + 1] + std::max(a, b);
      }
      obj_min_[i] = obj_min_[i + 1] + std::min(obj_[i] * v.lower, obj_[i] * v.upper);
    }
    partial_.assign(m, 0);
    values_.assign(n_, 0);
  }

  EnumResult run() {
    dfs(0, 0);
    return result_;
  }

 private:
  bool possible(std::size_t next) const {
    for (std::size_t c = 0; c < partial_.size(); ++c) {
      const auto& con = ilp_.constraints[c];
      const std::int64_t lo = partial_[c] + suffix_min_[c][next];
      const std::int64_t hi = partial_[c] + suffix_max_[c][next];
      if (con.relation != Relation::kGreaterEqual && lo > con.rhs) return false;
      if (con.relation != Relation::kLessEqual && hi < con.rhs) return false;
    }
    return true;
  }

  void dfs(std::size_t i, std::int64_t obj) {
    if (!possible(i)) return;
    if (result_.feasible && obj + obj_min_[i] + ilp_.objective_constant >= result_.objective) return;
    if (i == n_) {
      ++result_.leaves;
      if (!satisfies(ilp_, values_)) throw std::logic_error("enumerator accepted a bad point");
      const std::int64_t value = evaluate_objective(ilp_, values_);
      if (!result_.feasible || value < result_.objective) {
        result_.feasible = true;
        result_.objective = value;
      }
      return;
    }
    const auto& v = ilp_.variables[i];
    for (std::int64_t x = v.lower; x <= v.upper; ++x) {
      values_[i] = x;
      for (std::size_t c = 0; c < partial_.size(); ++c) partial_[c] += coef_[c][i] * x;
      dfs(i + 1, obj + obj_[i] * x);
      for (std::size_t c = 0; c < partial_.size(); ++c) partial_[c] -= coef_[c][i] * x;
    }
  }

  const IlpInstance& ilp_;
  std::size_t n_;
  std::vector<std::vector<std::int64_t>> coef_;
  std::vector<std::int64_t> obj_;
  std::vector<std::vector<std::int64_t>> suffix_min_;
  std::vector<std::vector<std::int64_t>> suffix_max_;
  std::vector<std::int64_t> obj_min_;
  std::vector<std::int64_t> partial_;
  std::vector<std::int64_t> values_;
  EnumResult result_;
};

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

template <typename T, std::size_t N>
T pick(std::mt19937_64& rng, const T (&items)[N]) {
  return items[uniform(rng, 0, N - 1)];
}

}  // namespace

EnumResult enumerate_ilp(const IlpInstance& ilp) { return Enumerator(ilp).run(); }

IlpInstance random_ilp(std::mt19937_64& rng, int max_vars) {
  constexpr double kMaxBox = 2e6;
  static const int kSizes[] = {2, 2, 3, 4, 6, 10, 20};
  IlpInstance ilp;
  const int n = static_cast<int>(uniform(rng, 1, max_vars));
  double box = 1;
  for (int i = 0; i < n; ++i) {
    int size = pick(rng, kSizes);
    if (box * size > kMaxBox) size = 2;
    box *= size;
    const std::string name = "v" + std::to_string(i);
    if (size == 2 && uniform(rng, 0, 1) == 0) {
      ilp.add_binary(name);
    } else {
      const std::int64_t lo = uniform(rng, -5, 5);
      ilp.add_variable(name, VarKind::kInteger, lo, lo + size - 1);
    }
  }
  std::vector<std::int64_t> point(n);
  for (int i = 0; i < n; ++i) {
    point[i] = uniform(rng, ilp.variables[i].lower, ilp.variables[i].upper);
  }
  const int m = static_cast<int>(uniform(rng, 1, 6));
  for (int c = 0; c < m; ++c) {
    std::vector<int> vars(n);
    for (int i = 0; i < n; ++i) vars[i] = i;
    std::shuffle(vars.begin(), vars.end(), rng);
    vars.resize(uniform(rng, 1, n));
    std::vector<Term> terms;
    std::int64_t act = 0;
    for (int v : vars) {
      std::int64_t a = 0;
      while (a == 0) a = uniform(rng, -6, 6);
      terms.push_back({v, a});
      act += a * point[v];
    }
    const auto rel = static_cast<Relation>(uniform(rng, 0, 2));
    std::int64_t rhs = act;
    if (rel == Relation::kLessEqual) rhs += uniform(rng, -3, 5);
    if (rel == Relation::kGreaterEqual) rhs -= uniform(rng, -3, 5);
    if (rel == Relation::kEqual && uniform(rng, 0, 4) == 0) rhs += uniform(rng, -2, 2);
    ilp.add_constraint("c" + std::to_string(c), std::move(terms), rel, rhs);
  }
  for (int i = 0; i < n; ++i) {
    const std::int64_t a = uniform(rng, -9, 9);
    if (a != 0) ilp.objective.push_back({i, a});
  }
  ilp.objective_constant = uniform(rng, -5, 5);
  return ilp;
}

SystemSpec random_small_spec(std::mt19937_64& rng) {
  static const int kHops[] = {1, 2};
  static const int kSlots[] = {1, 2};
  static const TimeUs kPeriodsMs[] = {25, 50, 100};
  static const char* kNodes[] = {"n1", "n2", "n3"};

  SystemSpec s;
  s.network.hops = pick(rng, kHops);
  s.network.slots_per_round = pick(rng, kSlots);
  s.synth.grid_us = 1000;

  const int ntasks = static_cast<int>(uniform(rng, 2, 4));
  for (int i = 0; i < ntasks; ++i) {
    s.tasks.push_back({"t" + std::to_string(i + 1), pick(rng, kNodes), uniform(rng, 1, 4) * 1000});
  }
  // Tasks [0, cut) form the first application, the rest a second one.
  const int cut = (ntasks >= 3 && uniform(rng, 0, 1) == 1)
                      ? static_cast<int>(uniform(rng, 2, ntasks - 1))
                      : ntasks;
  std::vector<std::pair<int, int>> ranges{{0, cut}};
  if (cut < ntasks) ranges.emplace_back(cut, ntasks);

  for (std::size_t a = 0; a < ranges.size(); ++a) {
    Application app;
    app.id = "a" + std::to_string(a + 1);
    app.period_us = pick(rng, kPeriodsMs) * 1000;
    app.deadline_us = uniform(rng, app.period_us / 2000, app.period_us / 1000) * 1000;
    for (int i = ranges[a].first; i < ranges[a].second; ++i) app.tasks.push_back(s.tasks[i].id);
    s.applications.push_back(std::move(app));
  }

  const int nmsg = static_cast<int>(uniform(rng, 1, 3));
  for (int k = 0; k < nmsg; ++k) {
    std::vector<std::size_t> eligible;
    for (std::size_t a = 0; a < ranges.size(); ++a) {
      if (ranges[a].second - ranges[a].first >= 2) eligible.push_back(a);
    }
    const std::size_t a = eligible[uniform(rng, 0, eligible.size() - 1)];
    const auto [lo, hi] = ranges[a];
    const int src = static_cast<int>(uniform(rng, lo, hi - 2));
    const int dst = static_cast<int>(uniform(rng, src + 1, hi - 1));
    const std::string id = "m" + std::to_string(k + 1);
    s.messages.push_back({id});
    Application& app = s.applications[a];
    app.messages.push_back(id);
    app.edges.push_back({s.tasks[src].id, id, s.tasks[dst].id});
    if (dst + 1 < hi && uniform(rng, 0, 2) == 0) {
      app.edges.push_back({s.tasks[src].id, id, s.tasks[hi - 1].id});
    }
  }
  Mode mode{"m", {}};
  for (const auto& app : s.applications) mode.applications.push_back(app.id);
  s.modes.push_back(std::move(mode));
  return s;
}

SystemSpec single_message_spec(TimeUs period_us, TimeUs deadline_us, TimeUs wcet_us) {
  SystemSpec s;
  s.synth.grid_us = 1000;
  s.tasks = {{"src", "n1", wcet_us}, {"dst", "n2", wcet_us}};
  s.messages = {{"msg"}};
  Application app;
  app.id = "a";
  app.period_us = period_us;
  app.deadline_us = deadline_us;
  app.tasks = {"src", "dst"};
  app.messages = {"msg"};
  app.edges = {{"src", "msg", "dst"}};
  s.applications.push_back(std::move(app));
  s.modes.push_back({"m", {"a"}});
  return s;
}

}  // namespace ttw::testing
