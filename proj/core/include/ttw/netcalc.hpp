#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "ttw/model.hpp"

namespace ttw {

// Mathematical floor and ceiling of a / b for b > 0, exact for negative a.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && a > 0) ? q + 1 : q;
}

// Release offset, relative deadline and period of one message.
struct MessageWindow {
  TimeUs offset_us = 0;
  TimeUs deadline_us = 0;
  TimeUs period_us = 0;
};

// Instances released in [0, t]: floor((t - o) / p) + 1.
std::int64_t arrival(const MessageWindow& m, TimeUs t);

// Instances whose deadline lies strictly before t: ceil((t - o - d) / p).
// Equals -1 near the origin when o + d > p.
std::int64_t demand(const MessageWindow& m, TimeUs t);

// Instances served by rounds that ended strictly before t, minus the
// leftover count r0.
std::int64_t service(std::string_view message_id, TimeUs t,
                     std::span<const ScheduledRound> rounds,
                     TimeUs round_length_us, int leftover_count);

// Upper bound on r0: 1 iff the deadline of the last instance of a
// hyperperiod falls into the next one (o + d > p).
int leftover(const MessageWindow& m);

}  // namespace ttw
