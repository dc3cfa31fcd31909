#include "ttw/builder.hpp"

#include <stdexcept>

#include "ttw/checker.hpp"
#include "ttw/timing.hpp"

namespace ttw {

const char* to_string(SynthStatus status) {
  switch (status) {
    case SynthStatus::kFeasible: return "feasible";
    case SynthStatus::kInfeasible: return "infeasible";
    case SynthStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

int IlpLayout::slot_var(int round, int s, int message) const {
  const int messages = static_cast<int>(message_offset.size());
  return slot[(static_cast<std::size_t>(round) * slots + s) * messages + message];
}

namespace {

using T = Term;
constexpr auto kLe = Relation::kLessEqual;
constexpr auto kGe = Relation::kGreaterEqual;
constexpr auto kEq = Relation::kEqual;

std::string vertex_name(const ModeModel& m, const Vertex& v) {
  return v.kind == VertexKind::kTask ? m.tasks[v.index].id : m.messages[v.index].id;
}

}  // namespace

ScheduleIlp build_instance(const ModeModel& model, int rounds, const NetworkParams& params,
                           const SynthConfig& config) {
  if (rounds < 0) throw std::invalid_argument("round count must be non-negative");
  if (config.grid_us <= 0) throw std::invalid_argument("grid must be positive");

  ScheduleIlp out;
  out.model = model;
  IlpLayout& lay = out.layout;
  IlpInstance& ilp = out.instance;
  const TimeUs g = config.grid_us;
  const TimeUs lcm = model.hyperperiod_us;
  const TimeUs tr = t_round(params);
  const int nm = static_cast<int>(model.messages.size());
  const int nt = static_cast<int>(model.tasks.size());
  const int b = params.slots_per_round;
  lay.grid_us = g;
  lay.round_length_us = tr;
  lay.rounds = rounds;
  lay.slots = b;

  // Discrete choices first: branching picks the lowest fractional index.
  for (const auto& pr : model.precedences) {
    lay.sigma.push_back(ilp.add_binary("sigma_" + vertex_name(model, pr.from) + "_" +
                                       vertex_name(model, pr.to)));
  }
  for (const auto& m : model.messages) lay.leftover.push_back(ilp.add_binary("r0_" + m.id));
  for (int j = 0; j < rounds; ++j) {
    for (int s = 0; s < b; ++s) {
      for (const auto& m : model.messages) {
        lay.slot.push_back(ilp.add_binary("x_" + std::to_string(j + 1) + "_" +
                                          std::to_string(s + 1) + "_" + m.id));
      }
    }
  }
  for (int j = 0; j < rounds; ++j) {
    for (const auto& m : model.messages) {
      const std::int64_t n = lcm / m.period_us;
      lay.k_arrival.push_back(
          ilp.add_variable("ka_" + m.id + "_" + std::to_string(j + 1), VarKind::kInteger, 0, n + 1));
      lay.k_demand.push_back(
          ilp.add_variable("kd_" + m.id + "_" + std::to_string(j + 1), VarKind::kInteger, -1, n + 1));
    }
  }
  struct JobPair {
    int i, j;
    TimeUs ki, kj;
  };
  std::vector<JobPair> job_pairs;
  for (int i = 0; i < nt; ++i) {
    for (int j = i + 1; j < nt; ++j) {
      if (model.tasks[i].node != model.tasks[j].node) continue;
      for (TimeUs ki = 0; ki < lcm / model.tasks[i].period_us; ++ki) {
        for (TimeUs kj = 0; kj < lcm / model.tasks[j].period_us; ++kj) {
          job_pairs.push_back({i, j, ki, kj});
          lay.lambda.push_back(ilp.add_binary("lambda_" + model.tasks[i].id + "_" +
                                              std::to_string(ki + 1) + "_" + model.tasks[j].id +
                                              "_" + std::to_string(kj + 1)));
        }
      }
    }
  }
  for (const auto& t : model.tasks) {
    lay.task_offset.push_back(
        ilp.add_variable("o_" + t.id, VarKind::kTime, 0, (t.period_us - 1) / g));
  }
  for (const auto& m : model.messages) {
    lay.message_offset.push_back(
        ilp.add_variable("mo_" + m.id, VarKind::kTime, 0, (m.period_us - 1) / g));
    lay.message_deadline.push_back(
        ilp.add_variable("md_" + m.id, VarKind::kTime, 1, (2 * m.period_us - 1) / g));
  }
  const std::int64_t last_start = lcm >= tr ? (lcm - tr) / g : -1;
  for (int j = 0; j < rounds; ++j) {
    lay.round_start.push_back(
        ilp.add_variable("r_" + std::to_string(j + 1), VarKind::kTime, 0, last_start));
  }
  for (const auto& app : model.apps) {
    lay.latency.push_back(ilp.add_variable("delta_" + app.id, VarKind::kTime, 0, app.deadline_us));
  }

  // Precedence with period wrap.
  for (std::size_t k = 0; k < model.precedences.size(); ++k) {
    const auto& pr = model.precedences[k];
    const std::string name = "prec_" + vertex_name(model, pr.from) + "_" + vertex_name(model, pr.to);
    if (pr.from.kind == VertexKind::kTask) {
      const int t = pr.from.index;
      const int m = pr.to.index;
      ilp.add_constraint(name,
                         {T{lay.task_offset[t], g}, T{lay.message_offset[m], -g},
                          T{lay.sigma[k], -pr.period_us}},
                         kLe, -model.tasks[t].wcet_us);
    } else {
      const int m = pr.from.index;
      const int t = pr.to.index;
      ilp.add_constraint(name,
                         {T{lay.message_offset[m], g}, T{lay.message_deadline[m], g},
                          T{lay.task_offset[t], -g}, T{lay.sigma[k], -pr.period_us}},
                         kLe, 0);
    }
  }
  for (int i = 0; i < nm; ++i) {
    ilp.add_constraint("window_" + model.messages[i].id,
                       {T{lay.message_offset[i], g}, T{lay.message_deadline[i], g}}, kLe,
                       2 * model.messages[i].period_us - 1);
  }

  // End-to-end deadline and latency per chain.
  for (std::size_t a = 0; a < model.apps.size(); ++a) {
    const auto& app = model.apps[a];
    for (std::size_t c = 0; c < app.chains.size(); ++c) {
      const auto& ch = app.chains[c];
      std::vector<Term> lat{T{lay.task_offset[ch.last_task], g},
                            T{lay.task_offset[ch.first_task], -g}};
      for (int k : ch.precedences) lat.push_back(T{lay.sigma[k], app.period_us});
      const TimeUs e = model.tasks[ch.last_task].wcet_us;
      const std::string suffix = app.id + "_" + std::to_string(c + 1);
      ilp.add_constraint("chain_" + suffix, lat, kLe, app.deadline_us - e);
      std::vector<Term> bound{T{lay.latency[a], 1}};
      for (const auto& t : lat) bound.push_back(T{t.var, -t.coef});
      ilp.add_constraint("latency_" + suffix, bound, kGe, e);
    }
  }

  // Rounds in index order, without overlap, at most t_max apart.
  const TimeUs t_max = config.t_max_us.value_or(lcm);
  for (int j = 0; j + 1 < rounds; ++j) {
    const std::string idx = std::to_string(j + 1);
    ilp.add_constraint("order_" + idx, {T{lay.round_start[j], g}, T{lay.round_start[j + 1], -g}},
                       kLe, -tr);
    ilp.add_constraint("gap_" + idx, {T{lay.round_start[j + 1], g}, T{lay.round_start[j], -g}},
                       kLe, t_max);
  }

  // Non-preemption on a shared node: each job pair takes one cyclic order.
  const TimeUs big_m = 10 * lcm;
  for (std::size_t q = 0; q < job_pairs.size(); ++q) {
    const auto& jp = job_pairs[q];
    const auto& ti = model.tasks[jp.i];
    const auto& tj = model.tasks[jp.j];
    const TimeUs si = ti.period_us * jp.ki;
    const TimeUs sj = tj.period_us * jp.kj;
    const int oi = lay.task_offset[jp.i];
    const int oj = lay.task_offset[jp.j];
    const int lam = lay.lambda[q];
    const std::string base = ilp.variables[lam].name.substr(7);
    ilp.add_constraint("excl_a_" + base, {T{oi, g}, T{oj, -g}, T{lam, big_m}}, kLe,
                       sj - si - ti.wcet_us + big_m);
    ilp.add_constraint("excl_b_" + base, {T{oj, g}, T{oi, -g}, T{lam, big_m}}, kLe,
                       si + lcm - sj - tj.wcet_us + big_m);
    ilp.add_constraint("excl_c_" + base, {T{oj, g}, T{oi, -g}, T{lam, -big_m}}, kLe,
                       si - sj - tj.wcet_us);
    ilp.add_constraint("excl_d_" + base, {T{oi, g}, T{oj, -g}, T{lam, -big_m}}, kLe,
                       sj + lcm - si - ti.wcet_us);
  }

  // Slots: one message each, occupied slots packed to the front.
  for (int j = 0; j < rounds; ++j) {
    for (int s = 0; s < b; ++s) {
      std::vector<Term> used;
      for (int i = 0; i < nm; ++i) used.push_back(T{lay.slot_var(j, s, i), 1});
      const std::string idx = std::to_string(j + 1) + "_" + std::to_string(s + 1);
      if (!used.empty()) ilp.add_constraint("slot_" + idx, used, kLe, 1);
      if (s + 1 < b && nm > 0) {
        std::vector<Term> pack;
        for (int i = 0; i < nm; ++i) {
          pack.push_back(T{lay.slot_var(j, s + 1, i), 1});
          pack.push_back(T{lay.slot_var(j, s, i), -1});
        }
        ilp.add_constraint("pack_" + idx, pack, kLe, 0);
      }
    }
  }

  // Release and deadline windows per message and round.
  constexpr TimeUs mm = 1;
  for (int i = 0; i < nm; ++i) {
    const auto& msg = model.messages[i];
    const TimeUs p = msg.period_us;
    const int mo = lay.message_offset[i];
    const int md = lay.message_deadline[i];
    const int r0 = lay.leftover[i];
    std::vector<Term> served;  // allocations in rounds before j
    for (int j = 0; j < rounds; ++j) {
      const std::string idx = msg.id + "_" + std::to_string(j + 1);
      const int ka = lay.k_arrival[static_cast<std::size_t>(j) * nm + i];
      const int kd = lay.k_demand[static_cast<std::size_t>(j) * nm + i];
      const int r = lay.round_start[j];
      // ka = number of instances released at or before the round start.
      ilp.add_constraint("ka_lo_" + idx, {T{r, g}, T{mo, -g}, T{ka, -p}}, kGe, -p);
      ilp.add_constraint("ka_hi_" + idx, {T{r, g}, T{mo, -g}, T{ka, -p}}, kLe, -mm);
      // kd = number of deadlines strictly before the round ends.
      ilp.add_constraint("kd_lo_" + idx, {T{r, g}, T{mo, -g}, T{md, -g}, T{kd, -p}}, kGe,
                         mm - tr - p);
      ilp.add_constraint("kd_hi_" + idx, {T{r, g}, T{mo, -g}, T{md, -g}, T{kd, -p}}, kLe, -tr);

      std::vector<Term> before = served;
      before.push_back(T{r0, -1});
      before.push_back(T{kd, -1});
      ilp.add_constraint("due_" + idx, before, kGe, 0);

      for (int s = 0; s < b; ++s) served.push_back(T{lay.slot_var(j, s, i), 1});
      std::vector<Term> through = served;
      through.push_back(T{r0, -1});
      through.push_back(T{ka, -1});
      ilp.add_constraint("released_" + idx, through, kLe, 0);
    }
    ilp.add_constraint("conserve_" + msg.id, served, kEq, lcm / p);
  }

  for (int d : lay.latency) ilp.objective.push_back(T{d, 1});
  return out;
}

ModeSchedule extract_schedule(const ScheduleIlp& ilp, const SolverSolution& solution,
                              const NetworkParams& params, const SynthConfig& config) {
  if (!solution.has_incumbent || solution.values.size() != ilp.instance.variables.size()) {
    throw DecodeError(std::string("no assignment to decode (solver status ") +
                      to_string(solution.status) + ")");
  }
  std::string why;
  if (!satisfies(ilp.instance, solution.values, &why)) {
    throw DecodeError("assignment does not satisfy the instance: " + why);
  }
  const auto& v = solution.values;
  const auto& lay = ilp.layout;
  const auto& model = ilp.model;
  const TimeUs g = lay.grid_us;

  ModeSchedule s;
  s.mode = model.id;
  s.hyperperiod_us = model.hyperperiod_us;
  s.round_length_us = lay.round_length_us;
  s.slots_per_round = lay.slots;
  for (std::size_t t = 0; t < model.tasks.size(); ++t) {
    s.task_offsets[model.tasks[t].id] = g * v[lay.task_offset[t]];
  }
  for (std::size_t i = 0; i < model.messages.size(); ++i) {
    s.messages[model.messages[i].id] =
        MessageTiming{g * v[lay.message_offset[i]], g * v[lay.message_deadline[i]],
                      static_cast<int>(v[lay.leftover[i]])};
  }
  const int nm = static_cast<int>(model.messages.size());
  for (int j = 0; j < lay.rounds; ++j) {
    ScheduledRound r;
    r.start_us = g * v[lay.round_start[j]];
    for (int sl = 0; sl < lay.slots; ++sl) {
      std::optional<std::string> who;
      for (int i = 0; i < nm; ++i) {
        if (v[lay.slot_var(j, sl, i)] == 0) continue;
        if (who) {
          throw DecodeError("slot " + std::to_string(sl + 1) + " of round " +
                            std::to_string(j + 1) + " holds both " + *who + " and " +
                            model.messages[i].id);
        }
        who = model.messages[i].id;
      }
      r.slots.push_back(who);
    }
    s.rounds.push_back(std::move(r));
  }
  s.objective_us = solution.objective;

  const CheckReport report = check(model, s, params, config.t_max_us);
  if (!report.ok()) {
    const Verdict* bad = nullptr;
    for (const auto& vd : report.verdicts) {
      if (!vd.passed) {
        bad = &vd;
        break;
      }
    }
    throw DecodeError("decoded schedule fails " + bad->name + ": " +
                      (bad->violations.empty() ? std::string() : bad->violations.front()));
  }
  return s;
}

SynthResult synthesize(const ModeModel& model, const NetworkParams& params,
                       const SynthConfig& config) {
  SynthResult result;
  const TimeUs tr = t_round(params);
  result.r_max = static_cast<int>(model.hyperperiod_us / tr);
  SolverOptions options;
  options.budget_ms = config.solver_budget_ms;
  options.workers = config.workers;
  for (int r = 0; r <= result.r_max; ++r) {
    const ScheduleIlp ilp = build_instance(model, r, params, config);
    SolverSolution sol = solve(ilp.instance, options);
    result.calls.push_back(SynthCall{r, sol.status, sol.stats});
    if (sol.status == SolveStatus::kTimeout) {
      result.status = SynthStatus::kTimeout;
      result.rounds = r;
      return result;
    }
    if (sol.status == SolveStatus::kOptimal) {
      result.status = SynthStatus::kFeasible;
      result.rounds = r;
      result.schedule = extract_schedule(ilp, sol, params, config);
      return result;
    }
  }
  result.status = SynthStatus::kInfeasible;
  return result;
}

}  // namespace ttw
