#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ttw/model.hpp"
#include "ttw/params.hpp"

namespace ttw {

// Airtime of `bytes` at the configured bitrate, 8 * bytes / R_bit, rounded
// half-up to the microsecond. Exact for the default 250 kbps.
TimeUs t_tx(int bytes, const NetworkParams& p);

struct SlotTiming {
  TimeUs on_us = 0;   // radio start plus (H + 2N - 1) hops of the flood
  TimeUs off_us = 0;  // wake-up plus processing gap
  TimeUs total_us() const { return on_us + off_us; }
};

SlotTiming t_slot(int bytes, const NetworkParams& p);

// Beacon slot followed by `slots` data slots of `bytes` payload.
TimeUs t_round(int bytes, int slots, const NetworkParams& p);
// Round length for the configured payload and slot count.
TimeUs t_round(const NetworkParams& p);

// Lower bound on an application's latency: the largest chain sum of task
// WCETs plus one round length per message.
TimeUs min_app_latency(const SystemSpec& spec, const Application& app,
                       TimeUs round_length_us);

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Relative radio-on time saved by sending `slots` messages in one round
// instead of one beacon per message. Zero for a single slot.
Ratio energy_saving(int bytes, int slots, const NetworkParams& p);

// Latency gain over a baseline that needs `baseline_rounds` round lengths
// for a single message; 2 for the loosely coupled prior design.
double latency_improvement_factor(TimeUs round_length_us, int baseline_rounds = 2);

// CSV tables over parameter grids, one row per combination, header first.
//   round:  H,B,l,N,t_slot_beacon_us,t_slot_us,t_round_us
//   energy: l,B,H,N,t_on_round_us,t_on_without_rounds_us,energy_saving
std::string round_length_csv(std::span<const int> hops, std::span<const int> slots,
                             std::span<const int> payloads, const NetworkParams& base);
std::string energy_saving_csv(std::span<const int> payloads, std::span<const int> slots,
                              std::span<const int> hops, const NetworkParams& base);

}  // namespace ttw
