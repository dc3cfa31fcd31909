#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttw/model.hpp"
#include "ttw/params.hpp"

namespace ttw {

// Verdict names, one per constraint family.
namespace verdict {
inline constexpr std::string_view kStructure = "structure";
inline constexpr std::string_view kDomains = "domains";
inline constexpr std::string_view kPrecedence = "precedence";
inline constexpr std::string_view kChainDeadline = "chain_deadline";
inline constexpr std::string_view kRoundOverlap = "round_overlap";
inline constexpr std::string_view kRoundGap = "round_gap";
inline constexpr std::string_view kTaskOverlap = "task_overlap";
inline constexpr std::string_view kRelease = "release";
inline constexpr std::string_view kDeadline = "deadline";
inline constexpr std::string_view kSlotCapacity = "slot_capacity";
inline constexpr std::string_view kConservation = "conservation";
inline constexpr std::string_view kLeftover = "leftover";
inline constexpr std::string_view kServiceCurve = "service_curve";
inline constexpr std::string_view kObjective = "objective";
}  // namespace verdict

struct Verdict {
  std::string name;
  bool passed = true;
  std::vector<std::string> violations;
};

struct CheckReport {
  std::vector<Verdict> verdicts;
  std::map<std::string, TimeUs> app_latency_us;  // max chain latency per application

  bool ok() const;
  const Verdict* find(std::string_view name) const;
  bool passed(std::string_view name) const;  // false if absent
  std::vector<std::string> failed() const;
};

struct CheckOptions {
  std::optional<TimeUs> expected_round_length_us;
  std::optional<int> expected_slots_per_round;
  std::optional<TimeUs> t_max_us;
};

// Checks a schedule against every constraint family using only the
// schedule itself and the counting functions. If the structure verdict
// fails, the remaining families are not evaluated.
CheckReport check(const ModeModel& model, const ModeSchedule& schedule,
                  const CheckOptions& options = {});

// Same, with round length and slot count taken from the network parameters.
CheckReport check(const ModeModel& model, const ModeSchedule& schedule,
                  const NetworkParams& params, std::optional<TimeUs> t_max_us = std::nullopt);

}  // namespace ttw
