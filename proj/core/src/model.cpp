#include "ttw/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ttw {

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  auto it = std::find_if(items.begin(), items.end(),
                         [&](const T& item) { return item.id == id; });
  return it == items.end() ? nullptr : &*it;
}

template <typename T>
void report_duplicates(const std::vector<T>& items, const char* what,
                       std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) {
      out.push_back(std::string("duplicate ") + what + " id '" + item.id + "'");
    }
  }
}

// Kahn's algorithm on the task graph induced by the edges.
bool is_acyclic(const Application& app) {
  std::unordered_map<std::string, int> indegree;
  std::unordered_map<std::string, std::vector<std::string>> out;
  for (const auto& t : app.tasks) indegree.emplace(t, 0);
  for (const auto& e : app.edges) {
    indegree.emplace(e.src, 0);
    ++indegree[e.dst];
    out[e.src].push_back(e.dst);
  }
  std::vector<std::string> ready;
  for (const auto& [task, deg] : indegree) {
    if (deg == 0) ready.push_back(task);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    std::string task = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& next : out[task]) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return visited == indegree.size();
}

}  // namespace

const Task* SystemSpec::find_task(std::string_view id) const {
  return find_by_id(tasks, id);
}

const Application* SystemSpec::find_application(std::string_view id) const {
  return find_by_id(applications, id);
}

const Mode* SystemSpec::find_mode(std::string_view id) const {
  return find_by_id(modes, id);
}

ValidationReport validate_spec(const SystemSpec& spec) {
  ValidationReport report;
  auto& v = report.violations;

  report_duplicates(spec.tasks, "task", v);
  report_duplicates(spec.messages, "message", v);
  report_duplicates(spec.applications, "application", v);
  report_duplicates(spec.modes, "mode", v);

  for (const auto& task : spec.tasks) {
    if (task.wcet_us <= 0) {
      v.push_back("task '" + task.id + "': WCET must be positive");
    }
    if (task.node.empty()) {
      v.push_back("task '" + task.id + "': missing node mapping");
    }
  }

  // Period seen by each task and message, to catch shared elements whose
  // applications disagree.
  std::unordered_map<std::string, std::pair<TimeUs, std::string>> task_period;
  std::unordered_map<std::string, std::pair<TimeUs, std::string>> msg_period;
  // Node of the first preceding task found for each message.
  std::unordered_map<std::string, std::pair<std::string, std::string>> msg_node;

  for (const auto& app : spec.applications) {
    const std::string where = "application '" + app.id + "'";
    if (app.period_us <= 0) v.push_back(where + ": period must be positive");
    if (app.deadline_us <= 0) {
      v.push_back(where + ": deadline must be positive");
    }
    if (app.deadline_us > app.period_us) {
      v.push_back(where + ": deadline exceeds period");
    }
    if (app.tasks.empty()) v.push_back(where + ": no tasks");

    std::set<std::string> app_tasks(app.tasks.begin(), app.tasks.end());
    std::set<std::string> app_msgs(app.messages.begin(), app.messages.end());
    if (app_tasks.size() != app.tasks.size()) {
      v.push_back(where + ": task listed twice");
    }
    if (app_msgs.size() != app.messages.size()) {
      v.push_back(where + ": message listed twice");
    }

    for (const auto& t : app.tasks) {
      const Task* task = spec.find_task(t);
      if (task == nullptr) {
        v.push_back(where + ": unknown task '" + t + "'");
        continue;
      }
      if (app.period_us > 0 && task->wcet_us > app.period_us) {
        v.push_back(where + ": task '" + t + "' WCET exceeds period");
      }
      auto [it, inserted] = task_period.emplace(t, std::pair{app.period_us, app.id});
      if (!inserted && it->second.first != app.period_us) {
        v.push_back("task '" + t + "' shared by applications '" +
                    it->second.second + "' and '" + app.id +
                    "' with different periods");
      }
    }
    for (const auto& m : app.messages) {
      if (find_by_id(spec.messages, m) == nullptr) {
        v.push_back(where + ": unknown message '" + m + "'");
        continue;
      }
      auto [it, inserted] = msg_period.emplace(m, std::pair{app.period_us, app.id});
      if (!inserted && it->second.first != app.period_us) {
        v.push_back("message '" + m + "' shared by applications '" +
                    it->second.second + "' and '" + app.id +
                    "' with different periods");
      }
    }

    std::set<std::string> labeled;
    for (const auto& e : app.edges) {
      if (!app_tasks.count(e.src) || !app_tasks.count(e.dst)) {
        v.push_back(where + ": edge " + e.src + " -" + e.message + "-> " +
                    e.dst + " references a task outside the application");
        continue;
      }
      if (!app_msgs.count(e.message)) {
        v.push_back(where + ": edge references message '" + e.message +
                    "' outside the application");
        continue;
      }
      if (e.src == e.dst) {
        v.push_back(where + ": self loop on task '" + e.src + "'");
      }
      labeled.insert(e.message);
      const Task* src = spec.find_task(e.src);
      if (src == nullptr) continue;
      auto [it, inserted] = msg_node.emplace(e.message, std::pair{src->node, e.src});
      if (!inserted && it->second.first != src->node) {
        v.push_back("message '" + e.message + "': preceding tasks '" +
                    it->second.second + "' and '" + e.src +
                    "' are mapped to different nodes");
      }
    }
    for (const auto& m : app.messages) {
      if (!labeled.count(m)) {
        v.push_back(where + ": message '" + m + "' has no preceding task");
      }
    }
    if (!is_acyclic(app)) {
      v.push_back(where + ": precedence graph has a cycle");
    }
  }

  std::unordered_map<std::string, std::string> app_mode;
  for (const auto& mode : spec.modes) {
    if (mode.applications.empty()) {
      v.push_back("mode '" + mode.id + "' has no applications");
    }
    for (const auto& a : mode.applications) {
      if (spec.find_application(a) == nullptr) {
        v.push_back("mode '" + mode.id + "': unknown application '" + a + "'");
        continue;
      }
      auto [it, inserted] = app_mode.emplace(a, mode.id);
      if (!inserted) {
        v.push_back("application '" + a + "' belongs to modes '" + it->second +
                    "' and '" + mode.id + "'");
      }
    }
  }
  return report;
}

TimeUs hyperperiod(std::span<const TimeUs> periods) {
  if (periods.empty()) throw std::invalid_argument("hyperperiod of no periods");
  TimeUs result = 1;
  for (TimeUs p : periods) {
    if (p <= 0) throw std::invalid_argument("period must be positive");
    TimeUs g = std::gcd(result, p);
    TimeUs scaled = 0;
    if (__builtin_mul_overflow(result / g, p, &scaled)) {
      throw std::overflow_error("hyperperiod overflows the time type");
    }
    result = scaled;
  }
  return result;
}

TimeUs hyperperiod(const SystemSpec& spec, const Mode& mode) {
  std::vector<TimeUs> periods;
  for (const auto& a : mode.applications) {
    const Application* app = spec.find_application(a);
    if (app == nullptr) throw ModelError("unknown application '" + a + "'");
    periods.push_back(app->period_us);
  }
  return hyperperiod(periods);
}

std::vector<Chain> chains(const Application& app) {
  if (!is_acyclic(app)) {
    throw ModelError("application '" + app.id + "': precedence graph has a cycle");
  }
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> out;
  std::set<std::string> has_pred;
  for (const auto& e : app.edges) {
    out[e.src].emplace_back(e.message, e.dst);
    has_pred.insert(e.dst);
  }
  for (auto& [_, next] : out) std::sort(next.begin(), next.end());

  std::vector<Chain> result;
  std::vector<std::string> path;
  auto walk = [&](auto&& self, const std::string& task) -> void {
    path.push_back(task);
    auto it = out.find(task);
    if (it == out.end() || it->second.empty()) {
      result.push_back(Chain{path});
    } else {
      for (const auto& [msg, dst] : it->second) {
        path.push_back(msg);
        self(self, dst);
        path.pop_back();
      }
    }
    path.pop_back();
  };
  for (const auto& t : app.tasks) {
    if (!has_pred.count(t)) walk(walk, t);
  }
  std::sort(result.begin(), result.end(),
            [](const Chain& a, const Chain& b) { return a.elements < b.elements; });
  return result;
}

int ModeModel::task_index(std::string_view id) const {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int ModeModel::message_index(std::string_view id) const {
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> ModeModel::nodes() const {
  std::set<std::string> all;
  for (const auto& t : tasks) all.insert(t.node);
  return {all.begin(), all.end()};
}

ModeModel resolve_mode(const SystemSpec& spec, std::string_view mode_id) {
  const Mode* mode = spec.find_mode(mode_id);
  if (mode == nullptr) {
    throw ModelError("unknown mode '" + std::string(mode_id) + "'");
  }
  ValidationReport report = validate_spec(spec);
  if (!report.ok()) {
    throw ModelError("invalid system specification: " + report.violations.front());
  }

  ModeModel model;
  model.id = mode->id;
  model.hyperperiod_us = hyperperiod(spec, *mode);

  auto task_of = [&](const std::string& id, TimeUs period) {
    int idx = model.task_index(id);
    if (idx >= 0) return idx;
    const Task* t = spec.find_task(id);
    model.tasks.push_back(ModeTask{t->id, t->node, t->wcet_us, period, {}, {}});
    return static_cast<int>(model.tasks.size() - 1);
  };
  auto message_of = [&](const std::string& id, TimeUs period) {
    int idx = model.message_index(id);
    if (idx >= 0) return idx;
    model.messages.push_back(ModeMessage{id, period, {}, {}, {}});
    return static_cast<int>(model.messages.size() - 1);
  };
  auto add_unique = [](std::vector<int>& v, int x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  auto precedence_of = [&](Vertex from, Vertex to, TimeUs period) {
    for (std::size_t i = 0; i < model.precedences.size(); ++i) {
      if (model.precedences[i].from == from && model.precedences[i].to == to) {
        return static_cast<int>(i);
      }
    }
    model.precedences.push_back(Precedence{from, to, period});
    return static_cast<int>(model.precedences.size() - 1);
  };

  for (const auto& app_id : mode->applications) {
    const Application& app = *spec.find_application(app_id);
    ModeApp mapp{app.id, app.period_us, app.deadline_us, {}, {}, {}};
    for (const auto& t : app.tasks) add_unique(mapp.tasks, task_of(t, app.period_us));
    for (const auto& m : app.messages) {
      add_unique(mapp.messages, message_of(m, app.period_us));
    }
    for (const auto& e : app.edges) {
      int src = model.task_index(e.src);
      int dst = model.task_index(e.dst);
      int msg = model.message_index(e.message);
      add_unique(model.messages[msg].preds, src);
      add_unique(model.messages[msg].succs, dst);
      add_unique(model.tasks[src].succs, msg);
      add_unique(model.tasks[dst].preds, msg);
      model.messages[msg].sender = model.tasks[src].node;
    }
    for (const auto& chain : chains(app)) {
      ModeChain mc;
      for (std::size_t i = 0; i < chain.elements.size(); ++i) {
        if (i % 2 == 0) {
          mc.path.push_back({VertexKind::kTask, model.task_index(chain.elements[i])});
        } else {
          mc.path.push_back({VertexKind::kMessage, model.message_index(chain.elements[i])});
        }
      }
      for (std::size_t i = 0; i + 1 < mc.path.size(); ++i) {
        mc.precedences.push_back(precedence_of(mc.path[i], mc.path[i + 1], app.period_us));
      }
      mc.first_task = mc.path.front().index;
      mc.last_task = mc.path.back().index;
      mapp.chains.push_back(std::move(mc));
    }
    model.apps.push_back(std::move(mapp));
  }
  // Pairs that lie on no chain still constrain the schedule.
  for (std::size_t m = 0; m < model.messages.size(); ++m) {
    const int mi = static_cast<int>(m);
    for (int t : model.messages[m].preds) {
      precedence_of({VertexKind::kTask, t}, {VertexKind::kMessage, mi},
                    model.messages[m].period_us);
    }
    for (int t : model.messages[m].succs) {
      precedence_of({VertexKind::kMessage, mi}, {VertexKind::kTask, t},
                    model.messages[m].period_us);
    }
  }
  return model;
}

}  // namespace ttw
