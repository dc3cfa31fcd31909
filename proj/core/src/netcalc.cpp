#include "ttw/netcalc.hpp"

#include <algorithm>

namespace ttw {

std::int64_t arrival(const MessageWindow& m, TimeUs t) {
  return floor_div(t - m.offset_us, m.period_us) + 1;
}

std::int64_t demand(const MessageWindow& m, TimeUs t) {
  return ceil_div(t - m.offset_us - m.deadline_us, m.period_us);
}

std::int64_t service(std::string_view message_id, TimeUs t,
                     std::span<const ScheduledRound> rounds,
                     TimeUs round_length_us, int leftover_count) {
  std::int64_t served = 0;
  for (const auto& round : rounds) {
    if (round.start_us + round_length_us >= t) continue;
    served += std::count_if(round.slots.begin(), round.slots.end(),
                            [&](const auto& s) { return s && *s == message_id; });
  }
  return served - leftover_count;
}

int leftover(const MessageWindow& m) {
  return m.offset_us + m.deadline_us > m.period_us ? 1 : 0;
}

}  // namespace ttw
