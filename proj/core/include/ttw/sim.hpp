#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttw/model.hpp"

namespace ttw {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Beacon {
  int round_id = 0;
  std::string mode_id;
  bool sb = false;  // the pending mode starts right after this round
};

struct RoundRef {
  std::string mode;
  int index = 0;  // position in that mode's round sequence

  friend bool operator==(const RoundRef&, const RoundRef&) = default;
};

// Per-mode round tables as stored on every node. Round ids are unique
// across modes: modes are numbered in the given order, rounds from 1.
class ScheduleTables {
 public:
  explicit ScheduleTables(std::vector<ModeSchedule> schedules);

  const std::vector<ModeSchedule>& schedules() const { return schedules_; }
  const ModeSchedule* find(std::string_view mode) const;
  int round_id(const RoundRef& ref) const;
  std::optional<RoundRef> lookup(int round_id) const;

 private:
  std::vector<ModeSchedule> schedules_;
  std::vector<int> first_id_;
};

struct NextRound {
  RoundRef round;
  bool transition = false;  // beacon announces a mode other than the round's own
};

// The round a node expects after receiving `beacon`. With SB set this is
// the first round of the announced mode. Otherwise it is the successor of
// the beacon's round in the cyclic sequence of the mode that owns it; if
// that mode differs from the announced one the node is in the transition
// phase. An unknown mode or round id yields nothing, and the node stays
// silent as if the beacon had been missed.
std::optional<NextRound> next_round(const Beacon& beacon, const ScheduleTables& tables);

enum class NodePolicy {
  kSafe,    // transmit only in rounds whose beacon was received
  kUnsafe,  // also transmit on belief after a missed beacon (for testing the detector)
};

struct ModeCommand {
  TimeUs at_us = 0;
  std::string mode;
};

struct Scenario {
  std::string initial_mode;
  std::int64_t rounds = 0;             // rounds to execute; 0 means until duration
  std::optional<TimeUs> duration_us;
  double beacon_loss = 0.0;            // independent per node and round
  std::vector<ModeCommand> commands;   // sorted by time
  NodePolicy policy = NodePolicy::kSafe;
  std::uint64_t seed = 0;
};

enum class EventKind {
  kModeCommand,
  kRoundStart,
  kBeaconTx,
  kBeaconRx,
  kBeaconLoss,
  kSlotTx,
  kMessageLost,
  kRoundEnd,
  kPhase,
  kModeStart,
  kDegradedStart,
  kDegradedEnd,
  kViolation,
};

const char* to_string(EventKind kind);

struct SimEvent {
  TimeUs t_us = 0;
  EventKind kind = EventKind::kRoundStart;
  std::string node;      // empty for host events
  int round_id = 0;      // 0 if not applicable
  std::string mode;
  int slot = 0;          // 1-based data slot, 0 if not applicable
  std::string message;
  bool sb = false;
  std::string detail;    // phase name or violation text
};

struct SimSummary {
  std::int64_t rounds = 0;
  std::int64_t collisions = 0;
  std::int64_t foreign_transmissions = 0;
  std::int64_t resync_checks = 0;
  std::int64_t resync_failures = 0;
  std::int64_t beacons_lost = 0;
  std::int64_t messages_lost = 0;
  std::int64_t mode_changes = 0;
  std::int64_t degraded_intervals = 0;
  std::map<std::string, std::int64_t> transmissions;  // per message
};

struct SimTrace {
  std::vector<SimEvent> events;  // chronological
  std::vector<std::string> violations;
  SimSummary summary;

  bool clean() const { return violations.empty(); }
};

// Executes the scenario on the given system. Every schedule must pass the
// checker for its mode; otherwise SimError is thrown. Modes without rounds
// cannot be simulated because the host has no beacon to send.
SimTrace simulate(const SystemSpec& spec, const std::vector<ModeSchedule>& schedules,
                  const Scenario& scenario);

}  // namespace ttw
