#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ttw/ilp.hpp"
#include "ttw/model.hpp"

namespace ttw::testing {

// Path of a file under the repository's data/ or tests/data/ directory.
std::string data_path(const std::string& name);
std::string test_data_path(const std::string& name);
std::string read_text(const std::string& path);

SystemSpec load_spec(const std::string& name);

struct EnumResult {
  bool feasible = false;
  std::int64_t objective = 0;
  std::int64_t leaves = 0;
};

// Exhaustive search over the box of an integer program. Prunes only with
// interval bounds that are exact for the box, so the answer equals that of
// plain enumeration.
EnumResult enumerate_ilp(const IlpInstance& ilp);

// At most `max_vars` variables with a box of at most a few million points.
IlpInstance random_ilp(std::mt19937_64& rng, int max_vars = 12);

// Small mode "m" for the synthesis oracle: at most 4 tasks and 3 messages,
// hyperperiod at most 100 ms on a fast network (short rounds).
SystemSpec random_small_spec(std::mt19937_64& rng);

// src -> msg -> dst, one application, one mode "m".
SystemSpec single_message_spec(TimeUs period_us, TimeUs deadline_us, TimeUs wcet_us = 1000);

}  // namespace ttw::testing
