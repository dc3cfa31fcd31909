#include "ttw/checker.hpp"

#include <algorithm>
#include <set>

#include "ttw/netcalc.hpp"
#include "ttw/timing.hpp"

namespace ttw {

bool CheckReport::ok() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

const Verdict* CheckReport::find(std::string_view name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

bool CheckReport::passed(std::string_view name) const {
  const Verdict* v = find(name);
  return v != nullptr && v->passed;
}

std::vector<std::string> CheckReport::failed() const {
  std::vector<std::string> out;
  for (const auto& v : verdicts) {
    if (!v.passed) out.push_back(v.name);
  }
  return out;
}

namespace {

class Builder {
 public:
  explicit Builder(CheckReport& report) : report_(report) {}

  Verdict& open(std::string_view name) {
    report_.verdicts.push_back(Verdict{std::string(name), true, {}});
    return report_.verdicts.back();
  }

 private:
  CheckReport& report_;
};

void fail(Verdict& v, std::string why) {
  v.passed = false;
  v.violations.push_back(std::move(why));
}

std::string str(TimeUs t) { return std::to_string(t); }

bool check_structure(const ModeModel& model, const ModeSchedule& s, const CheckOptions& opt,
                     Verdict& v) {
  if (s.mode != model.id) fail(v, "schedule is for mode '" + s.mode + "', expected '" + model.id + "'");
  if (s.hyperperiod_us != model.hyperperiod_us) {
    fail(v, "hyperperiod " + str(s.hyperperiod_us) + " differs from " + str(model.hyperperiod_us));
  }
  if (s.round_length_us <= 0) fail(v, "round length must be positive");
  if (opt.expected_round_length_us && s.round_length_us != *opt.expected_round_length_us) {
    fail(v, "round length " + str(s.round_length_us) + " differs from the network's " +
                str(*opt.expected_round_length_us));
  }
  if (s.slots_per_round < 0) fail(v, "negative slot count");
  if (opt.expected_slots_per_round && s.slots_per_round != *opt.expected_slots_per_round) {
    fail(v, "slots per round " + std::to_string(s.slots_per_round) + " differs from the network's " +
                std::to_string(*opt.expected_slots_per_round));
  }
  for (const auto& t : model.tasks) {
    if (!s.task_offsets.count(t.id)) fail(v, "task " + t.id + " has no offset");
  }
  for (const auto& [id, _] : s.task_offsets) {
    if (model.task_index(id) < 0) fail(v, "unknown task " + id);
  }
  for (const auto& m : model.messages) {
    if (!s.messages.count(m.id)) fail(v, "message " + m.id + " has no timing");
  }
  for (const auto& [id, _] : s.messages) {
    if (model.message_index(id) < 0) fail(v, "unknown message " + id);
  }
  for (std::size_t j = 0; j < s.rounds.size(); ++j) {
    for (const auto& slot : s.rounds[j].slots) {
      if (slot && model.message_index(*slot) < 0) {
        fail(v, "round " + std::to_string(j + 1) + " carries unknown message " + *slot);
      }
    }
  }
  return v.passed;
}

}  // namespace

CheckReport check(const ModeModel& model, const ModeSchedule& s, const CheckOptions& opt) {
  CheckReport report;
  report.verdicts.reserve(16);  // verdict references stay valid while filling
  Builder b(report);
  if (!check_structure(model, s, opt, b.open(verdict::kStructure))) return report;

  const TimeUs lcm = s.hyperperiod_us;
  const TimeUs tr = s.round_length_us;
  auto task_offset = [&](int i) { return s.task_offsets.at(model.tasks[i].id); };
  auto timing = [&](int i) { return s.messages.at(model.messages[i].id); };
  auto window = [&](int i) {
    const auto& mt = timing(i);
    return MessageWindow{mt.offset_us, mt.deadline_us, model.messages[i].period_us};
  };

  {
    Verdict& v = b.open(verdict::kDomains);
    for (std::size_t i = 0; i < model.tasks.size(); ++i) {
      const TimeUs o = task_offset(static_cast<int>(i));
      if (o < 0 || o >= model.tasks[i].period_us) {
        fail(v, "task " + model.tasks[i].id + " offset " + str(o) + " outside [0, period)");
      }
    }
    for (std::size_t i = 0; i < model.messages.size(); ++i) {
      const auto& mt = timing(static_cast<int>(i));
      const TimeUs p = model.messages[i].period_us;
      const auto& id = model.messages[i].id;
      if (mt.offset_us < 0 || mt.offset_us >= p) {
        fail(v, "message " + id + " offset " + str(mt.offset_us) + " outside [0, period)");
      }
      if (mt.deadline_us <= 0 || mt.offset_us + mt.deadline_us >= 2 * p) {
        fail(v, "message " + id + " deadline " + str(mt.deadline_us) + " outside (0, 2 period - offset)");
      }
      if (mt.leftover < 0 || mt.leftover > 1) {
        fail(v, "message " + id + " leftover count must be 0 or 1");
      }
    }
    for (std::size_t j = 0; j < s.rounds.size(); ++j) {
      const TimeUs t = s.rounds[j].start_us;
      if (t < 0 || t > lcm - tr) {
        fail(v, "round " + std::to_string(j + 1) + " at " + str(t) + " does not fit in the hyperperiod");
      }
    }
  }

  // Smallest period-wrap count per precedence pair; -1 if none works.
  std::vector<int> sigma(model.precedences.size(), 0);
  {
    Verdict& v = b.open(verdict::kPrecedence);
    for (std::size_t k = 0; k < model.precedences.size(); ++k) {
      const auto& pr = model.precedences[k];
      TimeUs end = 0;
      TimeUs start = 0;
      std::string what;
      if (pr.from.kind == VertexKind::kTask) {
        const auto& t = model.tasks[pr.from.index];
        end = task_offset(pr.from.index) + t.wcet_us;
        start = timing(pr.to.index).offset_us;
        what = "task " + t.id + " -> message " + model.messages[pr.to.index].id;
      } else {
        const auto& mt = timing(pr.from.index);
        end = mt.offset_us + mt.deadline_us;
        start = task_offset(pr.to.index);
        what = "message " + model.messages[pr.from.index].id + " -> task " +
               model.tasks[pr.to.index].id;
      }
      if (end <= start) {
        sigma[k] = 0;
      } else if (end <= start + pr.period_us) {
        sigma[k] = 1;
      } else {
        sigma[k] = -1;
        fail(v, what + ": producer ends at " + str(end) + ", more than one period after " + str(start));
      }
    }
  }

  {
    Verdict& v = b.open(verdict::kChainDeadline);
    for (const auto& app : model.apps) {
      TimeUs worst = 0;
      bool known = true;
      for (const auto& c : app.chains) {
        TimeUs lat = task_offset(c.last_task) + model.tasks[c.last_task].wcet_us -
                     task_offset(c.first_task);
        for (int k : c.precedences) {
          if (sigma[k] < 0) known = false;
          lat += app.period_us * std::max(sigma[k], 0);
        }
        worst = std::max(worst, lat);
        if (known && lat > app.deadline_us) {
          std::string path;
          for (const auto& vx : c.path) {
            if (!path.empty()) path += ",";
            path += vx.kind == VertexKind::kTask ? model.tasks[vx.index].id
                                                 : model.messages[vx.index].id;
          }
          fail(v, "application " + app.id + " chain " + path + " latency " + str(lat) +
                      " exceeds deadline " + str(app.deadline_us));
        }
      }
      if (known) report.app_latency_us[app.id] = worst;
    }
  }

  std::vector<ScheduledRound> rounds = s.rounds;
  std::stable_sort(rounds.begin(), rounds.end(),
                   [](const auto& a, const auto& c) { return a.start_us < c.start_us; });
  {
    Verdict& v = b.open(verdict::kRoundOverlap);
    for (std::size_t j = 0; j + 1 < s.rounds.size(); ++j) {
      if (s.rounds[j].start_us + tr > s.rounds[j + 1].start_us) {
        fail(v, "round " + std::to_string(j + 1) + " at " + str(s.rounds[j].start_us) +
                    " overlaps round " + std::to_string(j + 2) + " at " +
                    str(s.rounds[j + 1].start_us));
      }
    }
  }
  {
    Verdict& v = b.open(verdict::kRoundGap);
    if (opt.t_max_us) {
      for (std::size_t j = 0; j + 1 < rounds.size(); ++j) {
        const TimeUs gap = rounds[j + 1].start_us - rounds[j].start_us;
        if (gap > *opt.t_max_us) {
          fail(v, "rounds " + std::to_string(j + 1) + " and " + std::to_string(j + 2) + " are " +
                      str(gap) + " apart, limit " + str(*opt.t_max_us));
        }
      }
    }
  }

  {
    Verdict& v = b.open(verdict::kTaskOverlap);
    for (std::size_t i = 0; i < model.tasks.size(); ++i) {
      const auto& ti = model.tasks[i];
      if (ti.wcet_us > ti.period_us) fail(v, "task " + ti.id + " overlaps its own next job");
      for (std::size_t j = i + 1; j < model.tasks.size(); ++j) {
        const auto& tj = model.tasks[j];
        if (ti.node != tj.node) continue;
        const TimeUs oi = task_offset(static_cast<int>(i));
        const TimeUs oj = task_offset(static_cast<int>(j));
        bool clash = false;
        for (TimeUs ki = 0; ki < lcm / ti.period_us && !clash; ++ki) {
          for (TimeUs kj = 0; kj < lcm / tj.period_us && !clash; ++kj) {
            const TimeUs ai = oi + ki * ti.period_us;
            const TimeUs aj = oj + kj * tj.period_us;
            for (TimeUs shift : {-lcm, TimeUs{0}, lcm}) {
              if (ai < aj + shift + tj.wcet_us && aj + shift < ai + ti.wcet_us) {
                fail(v, "tasks " + ti.id + " and " + tj.id + " overlap on node " + ti.node +
                            " (jobs at " + str(ai) + " and " + str(aj) + ")");
                clash = true;
                break;
              }
            }
          }
        }
      }
    }
  }

  auto count_in = [](const ScheduledRound& r, const std::string& id) {
    return static_cast<std::int64_t>(std::count_if(
        r.slots.begin(), r.slots.end(), [&](const auto& x) { return x && *x == id; }));
  };
  {
    Verdict& release = b.open(verdict::kRelease);
    Verdict& deadline = b.open(verdict::kDeadline);
    for (std::size_t i = 0; i < model.messages.size(); ++i) {
      const auto& id = model.messages[i].id;
      const MessageWindow w = window(static_cast<int>(i));
      const int r0 = timing(static_cast<int>(i)).leftover;
      std::int64_t before = 0;
      for (std::size_t j = 0; j < rounds.size(); ++j) {
        const std::int64_t here = count_in(rounds[j], id);
        const std::int64_t through = before + here;
        if (here > 0 && through - r0 > arrival(w, rounds[j].start_us)) {
          fail(release, "message " + id + " served in round at " + str(rounds[j].start_us) +
                            " before its release");
        }
        const std::int64_t due = demand(w, rounds[j].start_us + tr);
        if (before - r0 < due) {
          fail(deadline, "message " + id + ": " + std::to_string(due) +
                             " instance(s) due before round at " + str(rounds[j].start_us) +
                             " ends, " + std::to_string(before - r0) + " served");
        }
        before = through;
      }
    }
  }

  {
    Verdict& v = b.open(verdict::kSlotCapacity);
    for (std::size_t j = 0; j < s.rounds.size(); ++j) {
      if (static_cast<int>(s.rounds[j].slots.size()) > s.slots_per_round) {
        fail(v, "round " + std::to_string(j + 1) + " has " +
                    std::to_string(s.rounds[j].slots.size()) + " slots, capacity " +
                    std::to_string(s.slots_per_round));
      }
    }
  }

  {
    Verdict& v = b.open(verdict::kConservation);
    for (const auto& m : model.messages) {
      std::int64_t total = 0;
      for (const auto& r : rounds) total += count_in(r, m.id);
      const std::int64_t released = lcm / m.period_us;
      if (total != released) {
        fail(v, "message " + m.id + " allocated " + std::to_string(total) + " times, released " +
                    std::to_string(released) + " times");
      }
    }
  }

  {
    Verdict& v = b.open(verdict::kLeftover);
    for (std::size_t i = 0; i < model.messages.size(); ++i) {
      const int r0 = timing(static_cast<int>(i)).leftover;
      const int bound = leftover(window(static_cast<int>(i)));
      if (r0 > bound) {
        fail(v, "message " + model.messages[i].id + " carries " + std::to_string(r0) +
                    " leftover instance(s) but offset + deadline does not exceed the period");
      }
    }
  }

  {
    Verdict& v = b.open(verdict::kServiceCurve);
    for (std::size_t i = 0; i < model.messages.size(); ++i) {
      const auto& id = model.messages[i].id;
      const MessageWindow w = window(static_cast<int>(i));
      const int r0 = timing(static_cast<int>(i)).leftover;
      std::set<TimeUs> points{0, lcm, lcm + 1};
      for (const auto& r : rounds) {
        points.insert({r.start_us, r.start_us + tr, r.start_us + tr + 1});
      }
      for (TimeUs k = -1; k * w.period_us <= lcm + 1; ++k) {
        const TimeUs rel = w.offset_us + k * w.period_us;
        points.insert({rel, rel + w.deadline_us, rel + w.deadline_us + 1});
      }
      for (TimeUs t : points) {
        if (t < 0 || t > lcm + 1) continue;
        const std::int64_t sf = service(id, t, rounds, tr, r0);
        const std::int64_t df = demand(w, t);
        const std::int64_t af = arrival(w, t);
        if (df > sf || sf > af) {
          fail(v, "message " + id + " at t=" + str(t) + ": demand " + std::to_string(df) +
                      ", service " + std::to_string(sf) + ", arrival " + std::to_string(af));
          break;
        }
      }
    }
  }

  if (s.objective_us) {
    Verdict& v = b.open(verdict::kObjective);
    TimeUs sum = 0;
    for (const auto& [_, lat] : report.app_latency_us) sum += lat;
    if (report.app_latency_us.size() == model.apps.size() && sum != *s.objective_us) {
      fail(v, "objective " + str(*s.objective_us) + " differs from the latency sum " + str(sum));
    }
  }
  return report;
}

CheckReport check(const ModeModel& model, const ModeSchedule& schedule,
                  const NetworkParams& params, std::optional<TimeUs> t_max_us) {
  CheckOptions opt;
  opt.expected_round_length_us = t_round(params);
  opt.expected_slots_per_round = params.slots_per_round;
  opt.t_max_us = t_max_us;
  return check(model, schedule, opt);
}

}  // namespace ttw
