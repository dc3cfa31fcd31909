#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttw/checker.hpp"
#include "ttw/model.hpp"
#include "ttw/sim.hpp"

namespace ttw {

// A document that does not match its schema. Each error is prefixed with
// the JSON path of the offending value, e.g. "$.tasks[2].wcet_us".
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// System specification. Unknown keys, non-integer times and references to
// undeclared ids are schema errors; the parsed spec is also run through
// validate_spec and its findings reported the same way.
SystemSpec parse_spec(std::string_view text);

// One schedule, or a document {"schedules": [...]}.
std::vector<ModeSchedule> parse_schedules(std::string_view text);
ModeSchedule parse_schedule(std::string_view text);
std::string schedule_to_json(const ModeSchedule& schedule);
std::string schedules_to_json(const std::vector<ModeSchedule>& schedules);

std::string report_to_json(const CheckReport& report, std::string_view mode);

Scenario parse_scenario(std::string_view text);

// One JSON object per line, chronological, closed by a summary line.
std::string trace_to_jsonl(const SimTrace& trace);

}  // namespace ttw
