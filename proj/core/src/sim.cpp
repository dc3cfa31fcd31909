#include "ttw/sim.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "ttw/checker.hpp"
#include "ttw/timing.hpp"

namespace ttw {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kModeCommand: return "mode_command";
    case EventKind::kRoundStart: return "round_start";
    case EventKind::kBeaconTx: return "beacon_tx";
    case EventKind::kBeaconRx: return "beacon_rx";
    case EventKind::kBeaconLoss: return "beacon_loss";
    case EventKind::kSlotTx: return "slot_tx";
    case EventKind::kMessageLost: return "message_lost";
    case EventKind::kRoundEnd: return "round_end";
    case EventKind::kPhase: return "phase";
    case EventKind::kModeStart: return "mode_start";
    case EventKind::kDegradedStart: return "degraded_start";
    case EventKind::kDegradedEnd: return "degraded_end";
    case EventKind::kViolation: return "violation";
  }
  return "unknown";
}

ScheduleTables::ScheduleTables(std::vector<ModeSchedule> schedules)
    : schedules_(std::move(schedules)) {
  int next = 1;
  for (const auto& s : schedules_) {
    first_id_.push_back(next);
    next += static_cast<int>(s.rounds.size());
  }
}

const ModeSchedule* ScheduleTables::find(std::string_view mode) const {
  for (const auto& s : schedules_) {
    if (s.mode == mode) return &s;
  }
  return nullptr;
}

int ScheduleTables::round_id(const RoundRef& ref) const {
  for (std::size_t m = 0; m < schedules_.size(); ++m) {
    if (schedules_[m].mode == ref.mode) return first_id_[m] + ref.index;
  }
  return 0;
}

std::optional<RoundRef> ScheduleTables::lookup(int round_id) const {
  for (std::size_t m = 0; m < schedules_.size(); ++m) {
    const int first = first_id_[m];
    const int count = static_cast<int>(schedules_[m].rounds.size());
    if (round_id >= first && round_id < first + count) {
      return RoundRef{schedules_[m].mode, round_id - first};
    }
  }
  return std::nullopt;
}

std::optional<NextRound> next_round(const Beacon& beacon, const ScheduleTables& tables) {
  const ModeSchedule* announced = tables.find(beacon.mode_id);
  if (announced == nullptr) return std::nullopt;
  if (beacon.sb) {
    if (announced->rounds.empty()) return std::nullopt;
    return NextRound{RoundRef{announced->mode, 0}, false};
  }
  const auto ref = tables.lookup(beacon.round_id);
  if (!ref) return std::nullopt;
  const ModeSchedule* owner = tables.find(ref->mode);
  const int count = static_cast<int>(owner->rounds.size());
  return NextRound{RoundRef{ref->mode, (ref->index + 1) % count}, ref->mode != beacon.mode_id};
}

namespace {

struct Prediction {
  RoundRef round;
  TimeUs start_us = 0;
};

// Span of one application instance relative to its release.
struct AppWindow {
  TimeUs period_us = 0;
  TimeUs start_offset_us = 0;
  TimeUs end_offset_us = 0;
};

struct ModeRun {
  ModeModel model;
  const ModeSchedule* schedule = nullptr;
  std::map<std::string, std::string> sender;  // message -> node
  std::vector<AppWindow> apps;
};

std::vector<AppWindow> app_windows(const ModeModel& model, const ModeSchedule& s) {
  std::vector<int> sigma(model.precedences.size(), 0);
  for (std::size_t k = 0; k < model.precedences.size(); ++k) {
    const auto& pr = model.precedences[k];
    TimeUs end = 0;
    TimeUs start = 0;
    if (pr.from.kind == VertexKind::kTask) {
      end = s.task_offsets.at(model.tasks[pr.from.index].id) + model.tasks[pr.from.index].wcet_us;
      start = s.messages.at(model.messages[pr.to.index].id).offset_us;
    } else {
      const auto& mt = s.messages.at(model.messages[pr.from.index].id);
      end = mt.offset_us + mt.deadline_us;
      start = s.task_offsets.at(model.tasks[pr.to.index].id);
    }
    sigma[k] = end <= start ? 0 : 1;
  }
  std::vector<AppWindow> out;
  for (const auto& app : model.apps) {
    AppWindow w{app.period_us, app.period_us, 0};
    for (const auto& c : app.chains) {
      const TimeUs first = s.task_offsets.at(model.tasks[c.first_task].id);
      TimeUs end = s.task_offsets.at(model.tasks[c.last_task].id) +
                   model.tasks[c.last_task].wcet_us;
      for (int k : c.precedences) end += sigma[k] * app.period_us;
      w.start_offset_us = std::min(w.start_offset_us, first);
      w.end_offset_us = std::max(w.end_offset_us, end);
    }
    out.push_back(w);
  }
  return out;
}

class Simulator {
 public:
  Simulator(const SystemSpec& spec, const std::vector<ModeSchedule>& schedules,
            const Scenario& scenario)
      : spec_(spec), tables_(schedules), scenario_(scenario), rng_(scenario.seed) {
    std::set<std::string> nodes;
    for (const auto& s : tables_.schedules()) {
      ModeRun run;
      run.model = resolve_mode(spec, s.mode);
      run.schedule = &s;
      const CheckReport report = check(run.model, s, spec.network, spec.synth.t_max_us);
      if (!report.ok()) {
        const auto failed = report.failed();
        throw SimError("schedule for mode '" + s.mode + "' fails " + failed.front());
      }
      for (const auto& m : run.model.messages) run.sender[m.id] = m.sender;
      run.apps = app_windows(run.model, s);
      for (const auto& n : run.model.nodes()) nodes.insert(n);
      runs_[s.mode] = std::move(run);
    }
    nodes_.assign(nodes.begin(), nodes.end());
    for (const auto& n : nodes_) state_[n];
    require_rounds(scenario.initial_mode);
    for (const auto& c : scenario.commands) require_rounds(c.mode);
    if (scenario.beacon_loss < 0 || scenario.beacon_loss > 1) {
      throw SimError("beacon loss probability must lie in [0, 1]");
    }
    if (scenario.rounds <= 0 && !scenario.duration_us) {
      throw SimError("scenario needs a round count or a duration");
    }
    beacon_slot_ = t_slot(spec.network.beacon_bytes, spec.network).total_us();
    data_slot_ = t_slot(spec.network.payload_bytes, spec.network).total_us();
  }

  SimTrace run();

 private:
  struct NodeState {
    std::optional<Prediction> prediction;  // from the latest received beacon
    std::optional<Prediction> belief;      // what an unsafe node assumes
    int misses = 0;
    bool degraded = false;
  };

  void require_rounds(const std::string& mode) {
    const ModeSchedule* s = tables_.find(mode);
    if (s == nullptr) throw SimError("no schedule for mode '" + mode + "'");
    if (s->rounds.empty()) throw SimError("mode '" + mode + "' has no rounds to carry beacons");
  }

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  const ModeRun& mode_run(const std::string& mode) const { return runs_.at(mode); }

  TimeUs slot_time(TimeUs round_start, int slot) const {
    return round_start + beacon_slot_ + static_cast<TimeUs>(slot) * data_slot_;
  }

  // Start of the round after `ref`, given the start of `ref`.
  Prediction successor(const RoundRef& ref, TimeUs start) const {
    const ModeSchedule& s = *mode_run(ref.mode).schedule;
    TimeUs hp = start - s.rounds[ref.index].start_us;
    int next = ref.index + 1;
    if (next == static_cast<int>(s.rounds.size())) {
      next = 0;
      hp += s.hyperperiod_us;
    }
    return Prediction{RoundRef{ref.mode, next}, hp + s.rounds[next].start_us};
  }

  Prediction predict(const Beacon& b, TimeUs start) const {
    const auto next = next_round(b, tables_);
    if (b.sb) {
      const ModeSchedule& s = *mode_run(next->round.mode).schedule;
      return Prediction{next->round, start + s.round_length_us + s.rounds[0].start_us};
    }
    return successor(*tables_.lookup(b.round_id), start);
  }

  TimeUs inflight_end(TimeUs announce) const {
    const ModeRun& run = mode_run(mode_);
    const TimeUs lcm = run.schedule->hyperperiod_us;
    TimeUs end = announce;
    for (TimeUs hp : {hp_start_ - lcm, hp_start_}) {
      if (hp < mode_began_) continue;
      for (const auto& app : run.apps) {
        for (TimeUs k = 0; k < lcm / app.period_us; ++k) {
          const TimeUs release = hp + k * app.period_us;
          if (release + app.start_offset_us < announce) {
            end = std::max(end, release + app.end_offset_us);
          }
        }
      }
    }
    return end;
  }

  SimEvent event(TimeUs t, EventKind kind) const {
    SimEvent e;
    e.t_us = t;
    e.kind = kind;
    return e;
  }

  void violation(TimeUs t, std::string what) {
    SimEvent e = event(t, EventKind::kViolation);
    e.detail = what;
    trace_.events.push_back(std::move(e));
    trace_.violations.push_back("t=" + std::to_string(t) + ": " + std::move(what));
  }

  const SystemSpec& spec_;
  ScheduleTables tables_;
  Scenario scenario_;
  std::mt19937_64 rng_;
  std::map<std::string, ModeRun> runs_;
  std::vector<std::string> nodes_;
  std::map<std::string, NodeState> state_;
  TimeUs beacon_slot_ = 0;
  TimeUs data_slot_ = 0;

  std::string mode_;
  TimeUs hp_start_ = 0;
  TimeUs mode_began_ = 0;
  SimTrace trace_;
};

SimTrace Simulator::run() {
  mode_ = scenario_.initial_mode;
  hp_start_ = 0;
  mode_began_ = 0;
  int index = 0;
  std::size_t next_command = 0;
  std::optional<std::string> target;  // mode being switched to
  TimeUs switch_after = 0;            // SB goes into the first round starting at or after this
  {
    SimEvent e = event(0, EventKind::kModeStart);
    e.mode = mode_;
    trace_.events.push_back(std::move(e));
  }

  for (std::int64_t executed = 0;; ++executed) {
    if (scenario_.rounds > 0 && executed >= scenario_.rounds) break;
    const ModeRun& run = mode_run(mode_);
    const ModeSchedule& sched = *run.schedule;
    const ScheduledRound& round = sched.rounds[index];
    const TimeUs t = hp_start_ + round.start_us;
    const TimeUs tr = sched.round_length_us;
    if (scenario_.duration_us && t >= *scenario_.duration_us) break;
    const RoundRef ref{mode_, index};
    const int rid = tables_.round_id(ref);

    bool announcing = false;
    while (next_command < scenario_.commands.size() &&
           scenario_.commands[next_command].at_us <= t) {
      const ModeCommand& cmd = scenario_.commands[next_command];
      if (target) break;  // one change at a time; later commands wait
      SimEvent e = event(cmd.at_us, EventKind::kModeCommand);
      e.mode = cmd.mode;
      ++next_command;
      if (cmd.mode == mode_) {
        e.detail = "ignored";
        trace_.events.push_back(std::move(e));
        continue;
      }
      trace_.events.push_back(std::move(e));
      target = cmd.mode;
      switch_after = inflight_end(t);
      announcing = true;
      SimEvent p = event(t, EventKind::kPhase);
      p.detail = "announce";
      p.mode = *target;
      p.round_id = rid;
      trace_.events.push_back(std::move(p));
    }
    const bool sb = target && !announcing && t >= switch_after;
    const Beacon beacon{rid, target ? *target : mode_, sb};

    {
      SimEvent e = event(t, EventKind::kRoundStart);
      e.round_id = rid;
      e.mode = mode_;
      trace_.events.push_back(std::move(e));
      SimEvent b = event(t, EventKind::kBeaconTx);
      b.round_id = rid;
      b.mode = beacon.mode_id;
      b.sb = sb;
      trace_.events.push_back(std::move(b));
      if (sb) {
        SimEvent p = event(t, EventKind::kPhase);
        p.detail = "switch";
        p.mode = *target;
        p.round_id = rid;
        trace_.events.push_back(std::move(p));
      }
    }

    // Who transmits what in each slot of this round.
    std::vector<std::vector<std::pair<std::string, std::string>>> sent(round.slots.size());
    std::vector<std::string> heard;
    for (const auto& node : nodes_) {
      NodeState& st = state_[node];
      const bool received = uniform() >= scenario_.beacon_loss;
      SimEvent e = event(t, received ? EventKind::kBeaconRx : EventKind::kBeaconLoss);
      e.node = node;
      e.round_id = rid;
      trace_.events.push_back(std::move(e));
      if (received) {
        if (st.degraded && !beacon.sb && tables_.lookup(rid)->mode == beacon.mode_id) {
          st.degraded = false;
          SimEvent d = event(t, EventKind::kDegradedEnd);
          d.node = node;
          trace_.events.push_back(std::move(d));
        }
        heard.push_back(node);
        for (std::size_t s = 0; s < round.slots.size(); ++s) {
          const auto& msg = round.slots[s];
          if (msg && run.sender.at(*msg) == node) sent[s].emplace_back(node, *msg);
        }
        continue;
      }
      ++trace_.summary.beacons_lost;
      if (sb && !st.degraded) {
        st.degraded = true;
        ++trace_.summary.degraded_intervals;
        SimEvent d = event(t, EventKind::kDegradedStart);
        d.node = node;
        trace_.events.push_back(std::move(d));
      }
      for (std::size_t s = 0; s < round.slots.size(); ++s) {
        const auto& msg = round.slots[s];
        if (msg && run.sender.at(*msg) == node) {
          SimEvent l = event(slot_time(t, static_cast<int>(s)), EventKind::kMessageLost);
          l.node = node;
          l.round_id = rid;
          l.slot = static_cast<int>(s) + 1;
          l.message = *msg;
          trace_.events.push_back(std::move(l));
          ++trace_.summary.messages_lost;
        }
      }
      if (scenario_.policy == NodePolicy::kUnsafe && st.belief) {
        // Transmit from stale knowledge, catching up on rounds presumed past.
        while (st.belief->start_us < t) {
          const auto& bref = st.belief->round;
          const auto& bs = *mode_run(bref.mode).schedule;
          for (std::size_t s = 0; s < bs.rounds[bref.index].slots.size(); ++s) {
            const auto& msg = bs.rounds[bref.index].slots[s];
            if (msg && mode_run(bref.mode).sender.at(*msg) == node) {
              const TimeUs ts = slot_time(st.belief->start_us, static_cast<int>(s));
              SimEvent x = event(ts, EventKind::kSlotTx);
              x.node = node;
              x.slot = static_cast<int>(s) + 1;
              x.message = *msg;
              trace_.events.push_back(std::move(x));
              ++trace_.summary.foreign_transmissions;
              violation(ts, "node " + node + " transmits " + *msg + " outside any round");
            }
          }
          st.belief = successor(bref, st.belief->start_us);
        }
        if (st.belief->start_us == t) {
          const auto& bref = st.belief->round;
          const auto& bs = *mode_run(bref.mode).schedule;
          for (std::size_t s = 0; s < bs.rounds[bref.index].slots.size() && s < sent.size(); ++s) {
            const auto& msg = bs.rounds[bref.index].slots[s];
            if (msg && mode_run(bref.mode).sender.at(*msg) == node) {
              sent[s].emplace_back(node, *msg);
            }
          }
        }
      }
    }

    for (std::size_t s = 0; s < sent.size(); ++s) {
      const TimeUs ts = slot_time(t, static_cast<int>(s));
      std::set<std::string> distinct;
      for (const auto& [node, msg] : sent[s]) {
        SimEvent x = event(ts, EventKind::kSlotTx);
        x.node = node;
        x.round_id = rid;
        x.slot = static_cast<int>(s) + 1;
        x.message = msg;
        trace_.events.push_back(std::move(x));
        ++trace_.summary.transmissions[msg];
        distinct.insert(msg);
        if (!round.slots[s] || *round.slots[s] != msg) {
          ++trace_.summary.foreign_transmissions;
          violation(ts, "node " + node + " transmits " + msg + " in slot " +
                            std::to_string(s + 1) + " of round " + std::to_string(rid));
        }
      }
      if (distinct.size() > 1) {
        ++trace_.summary.collisions;
        violation(ts, "collision in slot " + std::to_string(s + 1) + " of round " +
                          std::to_string(rid));
      }
    }
    {
      SimEvent e = event(t + tr, EventKind::kRoundEnd);
      e.round_id = rid;
      trace_.events.push_back(std::move(e));
    }
    ++trace_.summary.rounds;

    // Advance the host.
    Prediction actual;
    if (sb) {
      mode_ = *target;
      target.reset();
      hp_start_ = t + tr;
      mode_began_ = hp_start_;
      index = 0;
      ++trace_.summary.mode_changes;
      SimEvent e = event(hp_start_, EventKind::kModeStart);
      e.mode = mode_;
      trace_.events.push_back(std::move(e));
      actual = Prediction{RoundRef{mode_, 0}, hp_start_ + mode_run(mode_).schedule->rounds[0].start_us};
    } else {
      actual = successor(ref, t);
      index = actual.round.index;
      if (index == 0) hp_start_ += sched.hyperperiod_us;
    }

    // Node knowledge for the next round.
    std::size_t h = 0;
    for (const auto& node : nodes_) {
      NodeState& st = state_[node];
      const bool got = h < heard.size() && heard[h] == node;
      if (!got) {
        ++st.misses;
        if (st.belief) {
          while (st.belief->start_us <= t) st.belief = successor(st.belief->round, st.belief->start_us);
        }
        continue;
      }
      ++h;
      const Prediction p = predict(beacon, t);
      if (st.misses > 0) ++trace_.summary.resync_checks;
      if (!(p.round == actual.round) || p.start_us != actual.start_us) {
        if (st.misses > 0) ++trace_.summary.resync_failures;
        violation(t, "node " + node + " expects round " + std::to_string(tables_.round_id(p.round)) +
                         " at " + std::to_string(p.start_us) + ", host runs " +
                         std::to_string(tables_.round_id(actual.round)) + " at " +
                         std::to_string(actual.start_us));
      }
      st.prediction = p;
      st.belief = p;
      st.misses = 0;
    }
  }

  std::stable_sort(trace_.events.begin(), trace_.events.end(),
                   [](const SimEvent& a, const SimEvent& b) { return a.t_us < b.t_us; });
  return std::move(trace_);
}

}  // namespace

SimTrace simulate(const SystemSpec& spec, const std::vector<ModeSchedule>& schedules,
                  const Scenario& scenario) {
  Simulator sim(spec, schedules, scenario);
  return sim.run();
}

}  // namespace ttw
