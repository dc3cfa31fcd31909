#include "ttw/brute_force.hpp"

#include <algorithm>
#include <string>

#include "difference_constraints.hpp"
#include "ttw/netcalc.hpp"
#include "ttw/timing.hpp"

namespace ttw {

namespace {

using detail::DifferenceSystem;

class Enumerator {
 public:
  Enumerator(const ModeModel& model, const NetworkParams& params, TimeUs grid, int rounds,
             std::optional<TimeUs> latency_bound, std::optional<TimeUs> t_max)
      : model_(model),
        g_(grid),
        tr_(t_round(params)),
        lcm_(model.hyperperiod_us),
        rounds_(rounds),
        capacity_(params.slots_per_round),
        latency_bound_(latency_bound),
        t_max_(t_max.value_or(model.hyperperiod_us)) {
    zero_ = sys_.add_variable();
    for (std::size_t i = 0; i < model.tasks.size(); ++i) task_.push_back(sys_.add_variable());
    for (std::size_t i = 0; i < model.messages.size(); ++i) {
      offset_.push_back(sys_.add_variable());
      end_.push_back(sys_.add_variable());
    }
    for (int j = 0; j < rounds; ++j) round_.push_back(sys_.add_variable());
    sigma_.assign(model.precedences.size(), 0);
    leftover_.assign(model.messages.size(), 0);
    remaining_.resize(model.messages.size());
    for (std::size_t i = 0; i < model.messages.size(); ++i) {
      remaining_[i] = lcm_ / model.messages[i].period_us;
    }
    counts_.assign(static_cast<std::size_t>(rounds) * model.messages.size(), 0);
    served_.assign(model.messages.size(), 0);
    for (int i = 0; i < static_cast<int>(model.tasks.size()); ++i) {
      for (int j = i + 1; j < static_cast<int>(model.tasks.size()); ++j) {
        if (model.tasks[i].node != model.tasks[j].node) continue;
        for (TimeUs ki = 0; ki < lcm_ / model.tasks[i].period_us; ++ki) {
          for (TimeUs kj = 0; kj < lcm_ / model.tasks[j].period_us; ++kj) {
            pairs_.push_back({i, j, ki * model.tasks[i].period_us, kj * model.tasks[j].period_us});
          }
        }
      }
    }
    add_static();
  }

  bool run() { return sys_.feasible() && pick_sigma(0); }
  std::int64_t explored() const { return explored_; }
  const ModeSchedule& witness() const { return witness_; }

 private:
  struct JobPair {
    int i, j;
    TimeUs si, sj;
  };

  // g * (x_a - x_b) <= c
  void le(int a, int b, TimeUs c) { sys_.add(a, b, floor_div(c, g_)); }

  void add_static() {
    for (std::size_t i = 0; i < model_.tasks.size(); ++i) {
      le(task_[i], zero_, model_.tasks[i].period_us - 1);
      le(zero_, task_[i], 0);
    }
    for (std::size_t i = 0; i < model_.messages.size(); ++i) {
      const TimeUs p = model_.messages[i].period_us;
      le(offset_[i], zero_, p - 1);
      le(zero_, offset_[i], 0);
      le(end_[i], offset_[i], 2 * p - 1);
      le(offset_[i], end_[i], -1);
      le(end_[i], zero_, 2 * p - 1);
    }
    for (int j = 0; j < rounds_; ++j) {
      le(round_[j], zero_, lcm_ - tr_);
      le(zero_, round_[j], 0);
      if (j + 1 < rounds_) {
        le(round_[j], round_[j + 1], -tr_);
        le(round_[j + 1], round_[j], t_max_);
      }
    }
  }

  void add_precedence(std::size_t k) {
    const auto& pr = model_.precedences[k];
    const TimeUs wrap = sigma_[k] * pr.period_us;
    if (pr.from.kind == VertexKind::kTask) {
      le(task_[pr.from.index], offset_[pr.to.index],
         wrap - model_.tasks[pr.from.index].wcet_us);
    } else {
      le(end_[pr.from.index], task_[pr.to.index], wrap);
    }
  }

  void add_chains() {
    for (const auto& app : model_.apps) {
      for (const auto& c : app.chains) {
        TimeUs wrap = 0;
        for (int k : c.precedences) wrap += sigma_[k] * app.period_us;
        const TimeUs e = model_.tasks[c.last_task].wcet_us;
        const TimeUs bound = latency_bound_ ? std::min(*latency_bound_, app.deadline_us)
                                            : app.deadline_us;
        le(task_[c.last_task], task_[c.first_task], bound - e - wrap);
      }
    }
  }

  bool pick_sigma(std::size_t k) {
    if (k == sigma_.size()) {
      const auto mark = sys_.mark();
      add_chains();
      const bool ok = sys_.feasible() && pick_order(0);
      sys_.rollback(mark);
      return ok;
    }
    for (int v = 0; v <= 1; ++v) {
      sigma_[k] = v;
      const auto mark = sys_.mark();
      add_precedence(k);
      const bool ok = sys_.feasible() && pick_sigma(k + 1);
      sys_.rollback(mark);
      if (ok) return true;
    }
    return false;
  }

  bool pick_order(std::size_t q) {
    if (q == pairs_.size()) return pick_leftover(0);
    const auto& p = pairs_[q];
    const TimeUs ei = model_.tasks[p.i].wcet_us;
    const TimeUs ej = model_.tasks[p.j].wcet_us;
    const int oi = task_[p.i];
    const int oj = task_[p.j];
    for (int first = 0; first <= 1; ++first) {
      const auto mark = sys_.mark();
      if (first == 0) {
        // job i, then job j, then job i one hyperperiod later
        le(oi, oj, p.sj - p.si - ei);
        le(oj, oi, p.si + lcm_ - p.sj - ej);
      } else {
        le(oj, oi, p.si - p.sj - ej);
        le(oi, oj, p.sj + lcm_ - p.si - ei);
      }
      const bool ok = sys_.feasible() && pick_order(q + 1);
      sys_.rollback(mark);
      if (ok) return true;
    }
    return false;
  }

  bool pick_leftover(std::size_t i) {
    if (i == leftover_.size()) return allocate(0, 0, 0);
    for (int v = 0; v <= 1; ++v) {
      leftover_[i] = v;
      const auto mark = sys_.mark();
      if (v == 1) {
        // a carried instance needs o + d > p
        le(zero_, end_[i], -(model_.messages[i].period_us + 1));
      }
      const bool ok = sys_.feasible() && pick_leftover(i + 1);
      sys_.rollback(mark);
      if (ok) return true;
    }
    return false;
  }

  // Chooses how many instances of message i round j carries.
  bool allocate(int j, std::size_t i, int used) {
    const std::size_t nm = model_.messages.size();
    if (j == rounds_) {
      for (auto r : remaining_) {
        if (r != 0) return false;
      }
      return finish();
    }
    if (i == nm) return close_round(j);
    const bool last_round = j + 1 == rounds_;
    const std::int64_t most = std::min<std::int64_t>(remaining_[i], capacity_ - used);
    const std::int64_t least = last_round ? remaining_[i] : 0;
    for (std::int64_t c = least; c <= most; ++c) {
      counts_[static_cast<std::size_t>(j) * nm + i] = c;
      remaining_[i] -= c;
      const bool ok = allocate(j, i + 1, used + static_cast<int>(c));
      remaining_[i] += c;
      if (ok) return true;
    }
    return false;
  }

  bool close_round(int j) {
    const std::size_t nm = model_.messages.size();
    std::int64_t left = 0;
    for (auto r : remaining_) left += r;
    if (left > static_cast<std::int64_t>(rounds_ - j - 1) * capacity_) return false;
    const auto mark = sys_.mark();
    const auto saved = served_;
    for (std::size_t i = 0; i < nm; ++i) {
      const TimeUs p = model_.messages[i].period_us;
      const std::int64_t before = served_[i] - leftover_[i];
      served_[i] += counts_[static_cast<std::size_t>(j) * nm + i];
      const std::int64_t through = served_[i] - leftover_[i];
      // released: floor((r - o) / p) + 1 >= through
      le(offset_[i], round_[j], -(through - 1) * p);
      // due: ceil((r + Tr - o - d) / p) <= before
      le(round_[j], end_[i], before * p - tr_);
    }
    const bool ok = sys_.feasible() && allocate(j + 1, 0, 0);
    served_ = saved;
    sys_.rollback(mark);
    return ok;
  }

  bool finish() {
    ++explored_;
    const auto x = sys_.solve(zero_);
    if (!x) return false;
    ModeSchedule s;
    s.mode = model_.id;
    s.hyperperiod_us = lcm_;
    s.round_length_us = tr_;
    s.slots_per_round = capacity_;
    for (std::size_t i = 0; i < model_.tasks.size(); ++i) {
      s.task_offsets[model_.tasks[i].id] = g_ * (*x)[task_[i]];
    }
    for (std::size_t i = 0; i < model_.messages.size(); ++i) {
      const TimeUs o = g_ * (*x)[offset_[i]];
      s.messages[model_.messages[i].id] =
          MessageTiming{o, g_ * (*x)[end_[i]] - o, leftover_[i]};
    }
    const std::size_t nm = model_.messages.size();
    for (int j = 0; j < rounds_; ++j) {
      ScheduledRound r;
      r.start_us = g_ * (*x)[round_[j]];
      for (std::size_t i = 0; i < nm; ++i) {
        for (std::int64_t c = 0; c < counts_[static_cast<std::size_t>(j) * nm + i]; ++c) {
          r.slots.emplace_back(model_.messages[i].id);
        }
      }
      r.slots.resize(capacity_);
      s.rounds.push_back(std::move(r));
    }
    witness_ = std::move(s);
    return true;
  }

  const ModeModel& model_;
  TimeUs g_;
  TimeUs tr_;
  TimeUs lcm_;
  int rounds_;
  int capacity_;
  std::optional<TimeUs> latency_bound_;
  TimeUs t_max_;
  DifferenceSystem sys_;
  int zero_ = 0;
  std::vector<int> task_;
  std::vector<int> offset_;
  std::vector<int> end_;  // offset + deadline
  std::vector<int> round_;
  std::vector<JobPair> pairs_;
  std::vector<int> sigma_;
  std::vector<int> leftover_;
  std::vector<std::int64_t> remaining_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> served_;
  std::int64_t explored_ = 0;
  ModeSchedule witness_;
};

}  // namespace

BruteForceResult brute_force_min_rounds(const ModeModel& model, const NetworkParams& params,
                                        TimeUs grid_us, bool minimize_latency,
                                        const BruteForceLimits& limits,
                                        std::optional<TimeUs> t_max_us) {
  if (grid_us <= 0) throw std::invalid_argument("grid must be positive");
  if (model.hyperperiod_us / grid_us > limits.max_positions) {
    throw OracleRefused("hyperperiod spans more than " + std::to_string(limits.max_positions) +
                        " grid positions");
  }
  if (static_cast<int>(model.messages.size()) > limits.max_messages) {
    throw OracleRefused("more than " + std::to_string(limits.max_messages) + " messages");
  }
  if (static_cast<int>(model.tasks.size()) > limits.max_tasks) {
    throw OracleRefused("more than " + std::to_string(limits.max_tasks) + " tasks");
  }
  if (minimize_latency && model.apps.size() != 1) {
    throw OracleRefused("latency minimization needs a single application");
  }

  BruteForceResult result;
  const int r_max = static_cast<int>(model.hyperperiod_us / t_round(params));
  for (int r = 0; r <= r_max; ++r) {
    if (r > limits.max_rounds) {
      throw OracleRefused("more than " + std::to_string(limits.max_rounds) + " rounds needed");
    }
    Enumerator e(model, params, grid_us, r, std::nullopt, t_max_us);
    const bool ok = e.run();
    result.explored += e.explored();
    if (!ok) continue;
    result.feasible = true;
    result.rounds = r;
    result.witness = e.witness();
    break;
  }
  if (!result.feasible || !minimize_latency) return result;

  // Smallest latency bound that still admits a schedule with R rounds.
  TimeUs lo = 0;
  TimeUs hi = model.apps.front().deadline_us;
  ModeSchedule best = result.witness;
  while (lo < hi) {
    const TimeUs mid = lo + (hi - lo) / 2;
    Enumerator e(model, params, grid_us, result.rounds, mid, t_max_us);
    const bool ok = e.run();
    result.explored += e.explored();
    if (ok) {
      hi = mid;
      best = e.witness();
    } else {
      lo = mid + 1;
    }
  }
  result.min_latency_us = hi;
  result.witness = std::move(best);
  result.witness.objective_us = hi;
  return result;
}

}  // namespace ttw
