#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttw/params.hpp"

namespace ttw {

// Raised for inputs that violate the structural rules of the system model.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input model, as given by the designer.

struct Task {
  std::string id;
  std::string node;  // mapping
  TimeUs wcet_us = 0;
};

struct Message {
  std::string id;
};

// A precedence edge src -> dst labeled by a message. Several edges with the
// same message label and source model a multicast.
struct Edge {
  std::string src;
  std::string message;
  std::string dst;
};

struct Application {
  std::string id;
  TimeUs period_us = 0;
  TimeUs deadline_us = 0;
  std::vector<std::string> tasks;
  std::vector<std::string> messages;
  std::vector<Edge> edges;
};

struct Mode {
  std::string id;
  std::vector<std::string> applications;
};

struct SystemSpec {
  NetworkParams network;
  SynthConfig synth;
  std::vector<Task> tasks;
  std::vector<Message> messages;
  std::vector<Application> applications;
  std::vector<Mode> modes;

  const Task* find_task(std::string_view id) const;
  const Application* find_application(std::string_view id) const;
  const Mode* find_mode(std::string_view id) const;
};

// Alternating task, message, task, ..., task path from a source task to a
// sink task of one application's precedence graph.
struct Chain {
  std::vector<std::string> elements;

  std::size_t task_count() const { return (elements.size() + 1) / 2; }
  const std::string& first() const { return elements.front(); }
  const std::string& last() const { return elements.back(); }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_spec(const SystemSpec& spec);

// Least common multiple of the periods. Throws std::overflow_error instead
// of wrapping and std::invalid_argument on a non-positive period.
TimeUs hyperperiod(std::span<const TimeUs> periods);
TimeUs hyperperiod(const SystemSpec& spec, const Mode& mode);

// All maximal source-to-sink chains, ordered lexicographically by the id
// sequence. Throws ModelError if the graph has a cycle.
std::vector<Chain> chains(const Application& app);

// ---------------------------------------------------------------------------
// Resolved view of one mode: every id turned into an index, periods
// propagated from the owning application, chains and precedence pairs
// precomputed. This is what the synthesis, checking and simulation code
// consumes.

enum class VertexKind { kTask, kMessage };

struct Vertex {
  VertexKind kind = VertexKind::kTask;
  int index = 0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct ModeTask {
  std::string id;
  std::string node;
  TimeUs wcet_us = 0;
  TimeUs period_us = 0;
  std::vector<int> preds;  // message indices
  std::vector<int> succs;  // message indices
};

struct ModeMessage {
  std::string id;
  TimeUs period_us = 0;
  std::vector<int> preds;  // task indices, all on one node
  std::vector<int> succs;  // task indices
  std::string sender;      // node of the preceding tasks
};

// Producer -> consumer pair that carries one period-wrap binary.
struct Precedence {
  Vertex from;
  Vertex to;
  TimeUs period_us = 0;
};

struct ModeChain {
  std::vector<Vertex> path;
  std::vector<int> precedences;  // indices into ModeModel::precedences
  int first_task = 0;
  int last_task = 0;
};

struct ModeApp {
  std::string id;
  TimeUs period_us = 0;
  TimeUs deadline_us = 0;
  std::vector<int> tasks;
  std::vector<int> messages;
  std::vector<ModeChain> chains;
};

struct ModeModel {
  std::string id;
  std::vector<ModeTask> tasks;
  std::vector<ModeMessage> messages;
  std::vector<ModeApp> apps;
  std::vector<Precedence> precedences;
  TimeUs hyperperiod_us = 0;

  int task_index(std::string_view id) const;     // -1 if absent
  int message_index(std::string_view id) const;  // -1 if absent
  std::vector<std::string> nodes() const;        // sorted, unique
};

// Throws ModelError if the mode is unknown or the spec fails validation.
ModeModel resolve_mode(const SystemSpec& spec, std::string_view mode_id);

// ---------------------------------------------------------------------------
// Synthesized schedule of one mode over one hyperperiod.

struct MessageTiming {
  TimeUs offset_us = 0;
  TimeUs deadline_us = 0;
  int leftover = 0;  // r0: instances carried over from the previous hyperperiod
};

struct ScheduledRound {
  TimeUs start_us = 0;
  std::vector<std::optional<std::string>> slots;  // message id per slot
};

struct ModeSchedule {
  std::string mode;
  TimeUs hyperperiod_us = 0;
  TimeUs round_length_us = 0;
  int slots_per_round = 0;
  std::map<std::string, TimeUs> task_offsets;
  std::map<std::string, MessageTiming> messages;
  std::vector<ScheduledRound> rounds;
  std::optional<TimeUs> objective_us;  // sum of application latencies
};

}  // namespace ttw
