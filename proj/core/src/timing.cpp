#include "ttw/timing.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ttw {

TimeUs t_tx(int bytes, const NetworkParams& p) {
  if (bytes < 0) throw std::invalid_argument("negative byte count");
  if (p.bitrate_bps <= 0) throw std::invalid_argument("bitrate must be positive");
  const std::int64_t bits_us = std::int64_t{8} * bytes * 1'000'000;
  return (bits_us + p.bitrate_bps / 2) / p.bitrate_bps;
}

SlotTiming t_slot(int bytes, const NetworkParams& p) {
  if (p.hops < 1 || p.retransmissions < 1) {
    throw std::invalid_argument("H and N must be at least 1");
  }
  const std::int64_t flood_hops = p.hops + 2 * p.retransmissions - 1;
  const TimeUs hop = p.t_d_us + t_tx(p.calibration_bytes + p.header_bytes + bytes, p);
  return SlotTiming{p.t_start_us + flood_hops * hop, p.t_wakeup_us + p.t_gap_us};
}

TimeUs t_round(int bytes, int slots, const NetworkParams& p) {
  if (slots < 0) throw std::invalid_argument("negative slot count");
  return t_slot(p.beacon_bytes, p).total_us() + slots * t_slot(bytes, p).total_us();
}

TimeUs t_round(const NetworkParams& p) {
  return t_round(p.payload_bytes, p.slots_per_round, p);
}

TimeUs min_app_latency(const SystemSpec& spec, const Application& app,
                       TimeUs round_length_us) {
  TimeUs best = 0;
  for (const auto& chain : chains(app)) {
    TimeUs sum = 0;
    for (std::size_t i = 0; i < chain.elements.size(); ++i) {
      if (i % 2 == 1) {
        sum += round_length_us;
        continue;
      }
      const Task* task = spec.find_task(chain.elements[i]);
      if (task == nullptr) throw ModelError("unknown task '" + chain.elements[i] + "'");
      sum += task->wcet_us;
    }
    best = std::max(best, sum);
  }
  return best;
}

Ratio energy_saving(int bytes, int slots, const NetworkParams& p) {
  if (slots < 1) throw std::invalid_argument("energy saving needs at least one slot");
  const TimeUs beacon_on = t_slot(p.beacon_bytes, p).on_us;
  const TimeUs data_on = t_slot(bytes, p).on_us;
  const TimeUs with_rounds = beacon_on + slots * data_on;
  const TimeUs without_rounds = slots * (beacon_on + data_on);
  return Ratio{without_rounds - with_rounds, without_rounds};
}

double latency_improvement_factor(TimeUs round_length_us, int baseline_rounds) {
  if (round_length_us <= 0) throw std::invalid_argument("round length must be positive");
  const double baseline = static_cast<double>(baseline_rounds) * round_length_us;
  return baseline / static_cast<double>(round_length_us);
}

std::string round_length_csv(std::span<const int> hops, std::span<const int> slots,
                             std::span<const int> payloads, const NetworkParams& base) {
  std::ostringstream out;
  out << "H,B,l,N,t_slot_beacon_us,t_slot_us,t_round_us\n";
  for (int h : hops) {
    for (int b : slots) {
      for (int l : payloads) {
        NetworkParams p = base;
        p.hops = h;
        out << h << ',' << b << ',' << l << ',' << p.retransmissions << ','
            << t_slot(p.beacon_bytes, p).total_us() << ',' << t_slot(l, p).total_us()
            << ',' << t_round(l, b, p) << '\n';
      }
    }
  }
  return out.str();
}

std::string energy_saving_csv(std::span<const int> payloads, std::span<const int> slots,
                              std::span<const int> hops, const NetworkParams& base) {
  std::ostringstream out;
  out << "l,B,H,N,t_on_round_us,t_on_without_rounds_us,energy_saving\n";
  for (int l : payloads) {
    for (int b : slots) {
      for (int h : hops) {
        NetworkParams p = base;
        p.hops = h;
        const Ratio e = energy_saving(l, b, p);
        char saving[32];
        std::snprintf(saving, sizeof saving, "%.6f", e.value());
        out << l << ',' << b << ',' << h << ',' << p.retransmissions << ','
            << (e.den - e.num) << ',' << e.den << ',' << saving << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace ttw
