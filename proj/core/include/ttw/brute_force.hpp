#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "ttw/model.hpp"
#include "ttw/params.hpp"

namespace ttw {

// Raised when an instance is larger than the oracle is willing to search.
class OracleRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BruteForceLimits {
  TimeUs max_positions = 200;  // hyperperiod / grid
  int max_messages = 3;
  int max_tasks = 6;
  int max_rounds = 8;
};

struct BruteForceResult {
  bool feasible = false;
  int rounds = -1;       // minimal round count when feasible
  ModeSchedule witness;  // a schedule with that many rounds
  std::optional<TimeUs> min_latency_us;  // single-application modes, on request
  std::int64_t explored = 0;             // discrete assignments tried
};

// Minimal round count by exhaustive search, independent of the integer
// program. For each R it enumerates every slot allocation, leftover choice,
// period-wrap choice and per-node job order; the times left over form a
// system of difference constraints on the grid, decided exactly.
BruteForceResult brute_force_min_rounds(const ModeModel& model, const NetworkParams& params,
                                        TimeUs grid_us, bool minimize_latency = false,
                                        const BruteForceLimits& limits = {},
                                        std::optional<TimeUs> t_max_us = std::nullopt);

}  // namespace ttw
