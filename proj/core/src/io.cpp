#include "ttw/io.hpp"

#include <initializer_list>
#include <optional>
#include <set>

#include "json.hpp"

namespace ttw {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += "\n";
    out += e;
  }
  return out;
}

class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }

  bool object(const json& j, const std::string& path,
              std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      error(path, "expected an object");
      return false;
    }
    for (const auto& [key, _] : j.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) error(path + "." + key, "unknown key");
    }
    return true;
  }

  const json* field(const json& obj, const std::string& path, const char* key, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(path + "." + key, "missing required key");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& path, const char* key,
                                      bool required) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) {
      error(path + "." + key, "expected an integer");
      return std::nullopt;
    }
    if (v->is_number_unsigned() && v->get<std::uint64_t>() > INT64_MAX) {
      error(path + "." + key, "integer out of range");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<double> number(const json& obj, const std::string& path, const char* key,
                               bool required) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) {
      error(path + "." + key, "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::string> string(const json& obj, const std::string& path, const char* key,
                                    bool required) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
      error(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::vector<std::string> strings(const json& obj, const std::string& path, const char* key,
                                   bool required) {
    std::vector<std::string> out;
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return out;
    if (!v->is_array()) {
      error(path + "." + key, "expected an array");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        error(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        continue;
      }
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  const json* array(const json& obj, const std::string& path, const char* key, bool required) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return nullptr;
    if (!v->is_array()) {
      error(path + "." + key, "expected an array");
      return nullptr;
    }
    return v;
  }

  void check() const {
    if (!errors.empty()) throw SchemaError(errors);
  }
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError({std::string("$: invalid JSON: ") + e.what()});
  }
}

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

template <typename T>
void set_int(Reader& r, const json& obj, const std::string& path, const char* key, T& out) {
  if (auto v = r.integer(obj, path, key, false)) out = static_cast<T>(*v);
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

SystemSpec parse_spec(std::string_view text) {
  const json doc = parse_json(text);
  Reader r;
  SystemSpec spec;
  if (!r.object(doc, "$", {"network", "synth", "tasks", "messages", "applications", "modes"})) {
    r.check();
  }

  if (const json* net = r.field(doc, "$", "network", false)) {
    const std::string p = "$.network";
    if (r.object(*net, p, {"hops", "retransmissions", "slots_per_round", "payload_bytes",
                           "beacon_bytes", "calibration_bytes", "header_bytes", "bitrate_bps",
                           "t_wakeup_us", "t_start_us", "t_d_us", "t_gap_us"})) {
      auto& n = spec.network;
      set_int(r, *net, p, "hops", n.hops);
      set_int(r, *net, p, "retransmissions", n.retransmissions);
      set_int(r, *net, p, "slots_per_round", n.slots_per_round);
      set_int(r, *net, p, "payload_bytes", n.payload_bytes);
      set_int(r, *net, p, "beacon_bytes", n.beacon_bytes);
      set_int(r, *net, p, "calibration_bytes", n.calibration_bytes);
      set_int(r, *net, p, "header_bytes", n.header_bytes);
      set_int(r, *net, p, "bitrate_bps", n.bitrate_bps);
      set_int(r, *net, p, "t_wakeup_us", n.t_wakeup_us);
      set_int(r, *net, p, "t_start_us", n.t_start_us);
      set_int(r, *net, p, "t_d_us", n.t_d_us);
      set_int(r, *net, p, "t_gap_us", n.t_gap_us);
      if (n.hops < 1) r.error(p + ".hops", "must be at least 1");
      if (n.retransmissions < 1) r.error(p + ".retransmissions", "must be at least 1");
      if (n.slots_per_round < 0) r.error(p + ".slots_per_round", "must not be negative");
      if (n.bitrate_bps <= 0) r.error(p + ".bitrate_bps", "must be positive");
    }
  }

  if (const json* syn = r.field(doc, "$", "synth", false)) {
    const std::string p = "$.synth";
    if (r.object(*syn, p, {"grid_us", "t_max_us", "solver_budget_ms", "workers"})) {
      auto& s = spec.synth;
      set_int(r, *syn, p, "grid_us", s.grid_us);
      if (auto v = r.integer(*syn, p, "t_max_us", false)) s.t_max_us = *v;
      set_int(r, *syn, p, "solver_budget_ms", s.solver_budget_ms);
      set_int(r, *syn, p, "workers", s.workers);
      if (s.grid_us <= 0) r.error(p + ".grid_us", "must be positive");
      if (s.workers < 1) r.error(p + ".workers", "must be at least 1");
    }
  }

  std::set<std::string> task_ids;
  if (const json* tasks = r.array(doc, "$", "tasks", true)) {
    for (std::size_t i = 0; i < tasks->size(); ++i) {
      const std::string p = index_path("$.tasks", i);
      const json& t = (*tasks)[i];
      if (!r.object(t, p, {"id", "map", "wcet_us"})) continue;
      Task task;
      task.id = r.string(t, p, "id", true).value_or("");
      task.node = r.string(t, p, "map", true).value_or("");
      task.wcet_us = r.integer(t, p, "wcet_us", true).value_or(0);
      if (!task_ids.insert(task.id).second) r.error(p + ".id", "duplicate task id '" + task.id + "'");
      spec.tasks.push_back(std::move(task));
    }
  }
  std::set<std::string> message_ids;
  if (const json* msgs = r.array(doc, "$", "messages", true)) {
    for (std::size_t i = 0; i < msgs->size(); ++i) {
      const std::string p = index_path("$.messages", i);
      const json& m = (*msgs)[i];
      if (!r.object(m, p, {"id"})) continue;
      Message msg{r.string(m, p, "id", true).value_or("")};
      if (!message_ids.insert(msg.id).second) {
        r.error(p + ".id", "duplicate message id '" + msg.id + "'");
      }
      spec.messages.push_back(std::move(msg));
    }
  }
  std::set<std::string> app_ids;
  if (const json* apps = r.array(doc, "$", "applications", true)) {
    for (std::size_t i = 0; i < apps->size(); ++i) {
      const std::string p = index_path("$.applications", i);
      const json& a = (*apps)[i];
      if (!r.object(a, p, {"id", "period_us", "deadline_us", "tasks", "messages", "edges"})) {
        continue;
      }
      Application app;
      app.id = r.string(a, p, "id", true).value_or("");
      app.period_us = r.integer(a, p, "period_us", true).value_or(0);
      app.deadline_us = r.integer(a, p, "deadline_us", true).value_or(0);
      app.tasks = r.strings(a, p, "tasks", true);
      app.messages = r.strings(a, p, "messages", false);
      for (std::size_t k = 0; k < app.tasks.size(); ++k) {
        if (!task_ids.count(app.tasks[k])) {
          r.error(index_path(p + ".tasks", k), "unknown task '" + app.tasks[k] + "'");
        }
      }
      for (std::size_t k = 0; k < app.messages.size(); ++k) {
        if (!message_ids.count(app.messages[k])) {
          r.error(index_path(p + ".messages", k), "unknown message '" + app.messages[k] + "'");
        }
      }
      if (const json* edges = r.array(a, p, "edges", false)) {
        for (std::size_t k = 0; k < edges->size(); ++k) {
          const std::string ep = index_path(p + ".edges", k);
          const json& e = (*edges)[k];
          if (!r.object(e, ep, {"src", "msg", "dst"})) continue;
          Edge edge;
          edge.src = r.string(e, ep, "src", true).value_or("");
          edge.message = r.string(e, ep, "msg", true).value_or("");
          edge.dst = r.string(e, ep, "dst", true).value_or("");
          if (!task_ids.count(edge.src)) r.error(ep + ".src", "unknown task '" + edge.src + "'");
          if (!message_ids.count(edge.message)) {
            r.error(ep + ".msg", "unknown message '" + edge.message + "'");
          }
          if (!task_ids.count(edge.dst)) r.error(ep + ".dst", "unknown task '" + edge.dst + "'");
          app.edges.push_back(std::move(edge));
        }
      }
      if (!app_ids.insert(app.id).second) {
        r.error(p + ".id", "duplicate application id '" + app.id + "'");
      }
      spec.applications.push_back(std::move(app));
    }
  }
  if (const json* modes = r.field(doc, "$", "modes", true)) {
    auto read_apps = [&](const std::string& p, const json& list, Mode& mode) {
      if (!list.is_array()) {
        r.error(p, "expected an array of application ids");
        return;
      }
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (!list[k].is_string()) {
          r.error(index_path(p, k), "expected a string");
          continue;
        }
        const auto id = list[k].get<std::string>();
        if (!app_ids.count(id)) r.error(index_path(p, k), "unknown application '" + id + "'");
        mode.applications.push_back(id);
      }
    };
    if (modes->is_object()) {
      for (const auto& [id, list] : modes->items()) {
        Mode mode{id, {}};
        read_apps("$.modes." + id, list, mode);
        spec.modes.push_back(std::move(mode));
      }
    } else if (modes->is_array()) {
      for (std::size_t i = 0; i < modes->size(); ++i) {
        const std::string p = index_path("$.modes", i);
        const json& m = (*modes)[i];
        if (!r.object(m, p, {"id", "applications"})) continue;
        Mode mode;
        mode.id = r.string(m, p, "id", true).value_or("");
        if (const json* list = r.field(m, p, "applications", true)) {
          read_apps(p + ".applications", *list, mode);
        }
        spec.modes.push_back(std::move(mode));
      }
    } else {
      r.error("$.modes", "expected an object or an array");
    }
  }
  r.check();
  const ValidationReport report = validate_spec(spec);
  for (const auto& v : report.violations) r.error("$", v);
  r.check();
  return spec;
}

namespace {

ModeSchedule read_schedule(Reader& r, const json& s, const std::string& p) {
  ModeSchedule out;
  if (!r.object(s, p, {"mode", "hyperperiod_us", "round_length_us", "slots_per_round", "tasks",
                       "messages", "rounds", "objective_us"})) {
    return out;
  }
  out.mode = r.string(s, p, "mode", true).value_or("");
  out.hyperperiod_us = r.integer(s, p, "hyperperiod_us", true).value_or(0);
  out.round_length_us = r.integer(s, p, "round_length_us", true).value_or(0);
  out.slots_per_round = static_cast<int>(r.integer(s, p, "slots_per_round", true).value_or(0));
  if (auto v = r.integer(s, p, "objective_us", false)) out.objective_us = *v;
  if (const json* tasks = r.field(s, p, "tasks", true)) {
    if (!tasks->is_object()) {
      r.error(p + ".tasks", "expected an object");
    } else {
      for (const auto& [id, t] : tasks->items()) {
        const std::string tp = p + ".tasks." + id;
        if (!r.object(t, tp, {"offset_us"})) continue;
        out.task_offsets[id] = r.integer(t, tp, "offset_us", true).value_or(0);
      }
    }
  }
  if (const json* msgs = r.field(s, p, "messages", true)) {
    if (!msgs->is_object()) {
      r.error(p + ".messages", "expected an object");
    } else {
      for (const auto& [id, m] : msgs->items()) {
        const std::string mp = p + ".messages." + id;
        if (!r.object(m, mp, {"offset_us", "deadline_us", "leftover"})) continue;
        MessageTiming mt;
        mt.offset_us = r.integer(m, mp, "offset_us", true).value_or(0);
        mt.deadline_us = r.integer(m, mp, "deadline_us", true).value_or(0);
        mt.leftover = static_cast<int>(r.integer(m, mp, "leftover", false).value_or(0));
        out.messages[id] = mt;
      }
    }
  }
  if (const json* rounds = r.array(s, p, "rounds", true)) {
    for (std::size_t j = 0; j < rounds->size(); ++j) {
      const std::string rp = index_path(p + ".rounds", j);
      const json& rd = (*rounds)[j];
      if (!r.object(rd, rp, {"start_us", "slots"})) continue;
      ScheduledRound round;
      round.start_us = r.integer(rd, rp, "start_us", true).value_or(0);
      if (const json* slots = r.array(rd, rp, "slots", true)) {
        for (std::size_t k = 0; k < slots->size(); ++k) {
          const json& v = (*slots)[k];
          if (v.is_null()) {
            round.slots.emplace_back();
          } else if (v.is_string()) {
            round.slots.emplace_back(v.get<std::string>());
          } else {
            r.error(index_path(rp + ".slots", k), "expected a message id or null");
          }
        }
      }
      out.rounds.push_back(std::move(round));
    }
  }
  return out;
}

json schedule_json(const ModeSchedule& s) {
  json j;
  j["mode"] = s.mode;
  j["hyperperiod_us"] = s.hyperperiod_us;
  j["round_length_us"] = s.round_length_us;
  j["slots_per_round"] = s.slots_per_round;
  if (s.objective_us) j["objective_us"] = *s.objective_us;
  json tasks = json::object();
  for (const auto& [id, o] : s.task_offsets) tasks[id] = {{"offset_us", o}};
  j["tasks"] = std::move(tasks);
  json msgs = json::object();
  for (const auto& [id, m] : s.messages) {
    msgs[id] = {{"offset_us", m.offset_us}, {"deadline_us", m.deadline_us}, {"leftover", m.leftover}};
  }
  j["messages"] = std::move(msgs);
  json rounds = json::array();
  for (const auto& r : s.rounds) {
    json slots = json::array();
    for (const auto& x : r.slots) slots.push_back(x ? json(*x) : json(nullptr));
    rounds.push_back({{"start_us", r.start_us}, {"slots", std::move(slots)}});
  }
  j["rounds"] = std::move(rounds);
  return j;
}

}  // namespace

std::vector<ModeSchedule> parse_schedules(std::string_view text) {
  const json doc = parse_json(text);
  Reader r;
  std::vector<ModeSchedule> out;
  if (doc.is_object() && doc.contains("schedules")) {
    if (r.object(doc, "$", {"schedules"})) {
      if (const json* list = r.array(doc, "$", "schedules", true)) {
        for (std::size_t i = 0; i < list->size(); ++i) {
          out.push_back(read_schedule(r, (*list)[i], index_path("$.schedules", i)));
        }
      }
    }
  } else {
    out.push_back(read_schedule(r, doc, "$"));
  }
  r.check();
  return out;
}

ModeSchedule parse_schedule(std::string_view text) {
  auto all = parse_schedules(text);
  if (all.size() != 1) throw SchemaError({"$: expected exactly one schedule"});
  return std::move(all.front());
}

std::string schedule_to_json(const ModeSchedule& schedule) {
  return schedule_json(schedule).dump(2) + "\n";
}

std::string schedules_to_json(const std::vector<ModeSchedule>& schedules) {
  json list = json::array();
  for (const auto& s : schedules) list.push_back(schedule_json(s));
  json doc;
  doc["schedules"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::string report_to_json(const CheckReport& report, std::string_view mode) {
  json j;
  j["mode"] = std::string(mode);
  j["ok"] = report.ok();
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"violations", v.violations}});
  }
  j["verdicts"] = std::move(verdicts);
  json lat = json::object();
  for (const auto& [id, l] : report.app_latency_us) lat[id] = l;
  j["app_latency_us"] = std::move(lat);
  return j.dump(2) + "\n";
}

Scenario parse_scenario(std::string_view text) {
  const json doc = parse_json(text);
  Reader r;
  Scenario s;
  if (r.object(doc, "$", {"initial_mode", "rounds", "duration_us", "beacon_loss", "policy",
                          "commands", "seed"})) {
    s.initial_mode = r.string(doc, "$", "initial_mode", true).value_or("");
    s.rounds = r.integer(doc, "$", "rounds", false).value_or(0);
    if (auto v = r.integer(doc, "$", "duration_us", false)) s.duration_us = *v;
    s.beacon_loss = r.number(doc, "$", "beacon_loss", false).value_or(0.0);
    if (auto v = r.integer(doc, "$", "seed", false)) s.seed = static_cast<std::uint64_t>(*v);
    if (auto v = r.string(doc, "$", "policy", false)) {
      if (*v == "safe") {
        s.policy = NodePolicy::kSafe;
      } else if (*v == "unsafe") {
        s.policy = NodePolicy::kUnsafe;
      } else {
        r.error("$.policy", "expected \"safe\" or \"unsafe\"");
      }
    }
    if (const json* cmds = r.array(doc, "$", "commands", false)) {
      for (std::size_t i = 0; i < cmds->size(); ++i) {
        const std::string p = index_path("$.commands", i);
        const json& c = (*cmds)[i];
        if (!r.object(c, p, {"at_us", "mode"})) continue;
        ModeCommand cmd;
        cmd.at_us = r.integer(c, p, "at_us", true).value_or(0);
        cmd.mode = r.string(c, p, "mode", true).value_or("");
        if (!s.commands.empty() && cmd.at_us < s.commands.back().at_us) {
          r.error(p + ".at_us", "commands must be sorted by time");
        }
        s.commands.push_back(std::move(cmd));
      }
    }
    if (s.rounds < 0) r.error("$.rounds", "must not be negative");
  }
  r.check();
  return s;
}

std::string trace_to_jsonl(const SimTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    json j;
    j["t_us"] = e.t_us;
    j["event"] = to_string(e.kind);
    if (!e.node.empty()) j["node"] = e.node;
    if (e.round_id != 0) j["round"] = e.round_id;
    if (!e.mode.empty()) j["mode"] = e.mode;
    if (e.slot != 0) j["slot"] = e.slot;
    if (!e.message.empty()) j["message"] = e.message;
    if (e.kind == EventKind::kBeaconTx) j["sb"] = e.sb;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  const auto& s = trace.summary;
  json sum;
  sum["event"] = "summary";
  sum["clean"] = trace.clean();
  sum["rounds"] = s.rounds;
  sum["collisions"] = s.collisions;
  sum["foreign_transmissions"] = s.foreign_transmissions;
  sum["resync_checks"] = s.resync_checks;
  sum["resync_failures"] = s.resync_failures;
  sum["beacons_lost"] = s.beacons_lost;
  sum["messages_lost"] = s.messages_lost;
  sum["mode_changes"] = s.mode_changes;
  sum["degraded_intervals"] = s.degraded_intervals;
  json tx = json::object();
  for (const auto& [id, n] : s.transmissions) tx[id] = n;
  sum["transmissions"] = std::move(tx);
  sum["violations"] = trace.violations.size();
  out += sum.dump();
  out += '\n';
  return out;
}

}  // namespace ttw
