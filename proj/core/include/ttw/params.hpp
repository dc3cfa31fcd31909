#pragma once

#include <cstdint>
#include <optional>

namespace ttw {

// All model time is integer microseconds.
using TimeUs = std::int64_t;

// Radio and round parameters. Defaults are the constants of the public
// Glossy implementation for the CC430 (250 kbps, 3 ms processing gap) with
// a 4-hop network, two transmissions per node, 5-slot rounds and 10-byte
// payloads.
struct NetworkParams {
  int hops = 4;              // H, network diameter
  int retransmissions = 2;   // N, transmissions per node and flood
  int slots_per_round = 5;   // B
  int payload_bytes = 10;    // l
  int beacon_bytes = 3;      // L_beacon
  int calibration_bytes = 3; // L_cal
  int header_bytes = 6;      // L_header
  std::int64_t bitrate_bps = 250'000;
  TimeUs t_wakeup_us = 750;
  TimeUs t_start_us = 164;
  TimeUs t_d_us = 68;
  TimeUs t_gap_us = 3'000;
};

struct SynthConfig {
  // Every computed time (offsets, deadlines, round starts) is a multiple
  // of the grid.
  TimeUs grid_us = 1;
  // Upper bound on the distance between consecutive round starts. Unset
  // means the hyperperiod, which makes the bound vacuous.
  std::optional<TimeUs> t_max_us;
  // Per-round-count solver budget; 0 disables the limit.
  std::int64_t solver_budget_ms = 0;
  int workers = 1;
};

}  // namespace ttw
