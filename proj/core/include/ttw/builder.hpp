#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ttw/ilp.hpp"
#include "ttw/model.hpp"
#include "ttw/params.hpp"
#include "ttw/solver.hpp"

namespace ttw {

// Raised when a solver answer cannot be turned into a valid schedule.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column indices of each variable family. Times are in grid units.
struct IlpLayout {
  TimeUs grid_us = 1;
  TimeUs round_length_us = 0;
  int rounds = 0;
  int slots = 0;
  std::vector<int> sigma;          // per ModeModel::precedences entry
  std::vector<int> leftover;       // r0, per message
  std::vector<int> slot;           // x, index (round * slots + s) * messages + i
  std::vector<int> k_arrival;      // index round * messages + i
  std::vector<int> k_demand;       // index round * messages + i
  std::vector<int> lambda;         // one per job pair of tasks sharing a node
  std::vector<int> task_offset;
  std::vector<int> message_offset;
  std::vector<int> message_deadline;
  std::vector<int> round_start;
  std::vector<int> latency;        // delta, per application, in microseconds

  int slot_var(int round, int s, int message) const;
};

struct ScheduleIlp {
  ModeModel model;
  IlpLayout layout;
  IlpInstance instance;
};

// Integer program for `rounds` communication rounds. Throws
// std::invalid_argument for a negative round count or grid.
ScheduleIlp build_instance(const ModeModel& model, int rounds, const NetworkParams& params,
                           const SynthConfig& config);

// Decodes a solver answer and re-checks the result independently. Throws
// DecodeError if the answer has no assignment, fills a slot twice, or the
// decoded schedule fails the checker.
ModeSchedule extract_schedule(const ScheduleIlp& ilp, const SolverSolution& solution,
                              const NetworkParams& params, const SynthConfig& config);

enum class SynthStatus { kFeasible, kInfeasible, kTimeout };

const char* to_string(SynthStatus status);

struct SynthCall {
  int rounds = 0;
  SolveStatus status = SolveStatus::kInfeasible;
  SolverStats stats;
};

struct SynthResult {
  SynthStatus status = SynthStatus::kInfeasible;
  std::optional<ModeSchedule> schedule;
  int rounds = 0;  // round count of the schedule
  int r_max = 0;   // floor(hyperperiod / round length)
  std::vector<SynthCall> calls;
};

// Tries R = 0, 1, ..., r_max in order and stops at the first R that admits
// a schedule, so the round count is minimal; the schedule minimizes the
// sum of application latencies for that R. A timeout at some R stops the
// search and is reported as such rather than as infeasibility.
SynthResult synthesize(const ModeModel& model, const NetworkParams& params,
                       const SynthConfig& config);

}  // namespace ttw
