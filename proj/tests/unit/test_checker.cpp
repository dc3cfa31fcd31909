#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "ttw/builder.hpp"
#include "ttw/checker.hpp"
#include "ttw/timing.hpp"

namespace {

namespace verdict = ttw::verdict;

struct Fixture {
  ttw::SystemSpec spec;
  ttw::ModeModel model;
  ttw::ModeSchedule schedule;
};

const Fixture& fig2() {
  static const Fixture f = [] {
    Fixture x;
    x.spec = ttw::testing::load_spec("fig2.json");
    x.model = ttw::resolve_mode(x.spec, "normal");
    x.schedule = *ttw::synthesize(x.model, x.spec.network, x.spec.synth).schedule;
    return x;
  }();
  return f;
}

ttw::CheckReport recheck(const ttw::ModeSchedule& s) {
  return ttw::check(fig2().model, s, fig2().spec.network);
}

TEST(Check, SynthesizedScheduleIsClean) {
  const auto report = recheck(fig2().schedule);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.verdicts.size(), 14u);
  EXPECT_EQ(report.app_latency_us.at("control_loop"), 105000);
}

TEST(Check, RoundsOverlappingByOneMicrosecond) {
  auto s = fig2().schedule;
  s.rounds[1].start_us = s.rounds[0].start_us + s.round_length_us - 1;
  const auto report = recheck(s);
  EXPECT_FALSE(report.passed(verdict::kRoundOverlap));
  s.rounds[1].start_us += 1;
  EXPECT_TRUE(recheck(s).passed(verdict::kRoundOverlap));
}

TEST(Check, WrongModeStopsAfterStructure) {
  auto s = fig2().schedule;
  s.mode = "emergency";
  const auto report = recheck(s);
  EXPECT_FALSE(report.passed(verdict::kStructure));
  EXPECT_EQ(report.verdicts.size(), 1u);
}

TEST(Check, RoundLengthMustMatchNetwork) {
  auto s = fig2().schedule;
  s.round_length_us -= 1;
  EXPECT_FALSE(recheck(s).passed(verdict::kStructure));
}

TEST(Check, DeletedAllocation) {
  auto s = fig2().schedule;
  for (auto& r : s.rounds) {
    for (auto& slot : r.slots) {
      if (slot == std::optional<std::string>("m3")) slot.reset();
    }
  }
  const auto report = recheck(s);
  EXPECT_FALSE(report.passed(verdict::kConservation));
  // No later round end sees the missed deadline; the curve check does.
  EXPECT_TRUE(report.passed(verdict::kDeadline));
  EXPECT_FALSE(report.passed(verdict::kServiceCurve));
}

TEST(Check, RoundGapLimit) {
  const auto& s = fig2().schedule;
  const ttw::TimeUs gap = s.rounds[1].start_us - s.rounds[0].start_us;
  EXPECT_TRUE(ttw::check(fig2().model, s, fig2().spec.network, gap).ok());
  EXPECT_FALSE(ttw::check(fig2().model, s, fig2().spec.network, gap - 1).passed(verdict::kRoundGap));
}

TEST(Check, ObjectiveMustMatchLatencies) {
  auto s = fig2().schedule;
  *s.objective_us += 1;
  EXPECT_FALSE(recheck(s).passed(verdict::kObjective));
  s.objective_us.reset();
  const auto report = recheck(s);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.find(verdict::kObjective), nullptr);
}

TEST(Check, TaskOverlapOnSharedNode) {
  ttw::SystemSpec spec = fig2().spec;
  const auto model = ttw::resolve_mode(spec, "emergency");
  auto s = *ttw::synthesize(model, spec.network, spec.synth).schedule;
  ASSERT_TRUE(ttw::check(model, s, spec.network).ok());
  auto shared = model;
  shared.tasks[shared.task_index("brake")].node = shared.tasks[shared.task_index("detect")].node;
  s.task_offsets["brake"] = s.task_offsets["detect"];
  EXPECT_FALSE(ttw::check(shared, s, spec.network).passed(verdict::kTaskOverlap));
}

TEST(Check, PrecedenceNeedsMessageAfterSender) {
  auto s = fig2().schedule;
  // Start m1 before sense1 finishes within the same period: the only way to
  // make that consistent is a wrap, which then breaks the chain deadline.
  s.messages["m1"].offset_us = s.task_offsets.at("sense1");
  const auto report = recheck(s);
  EXPECT_FALSE(report.ok());
}

TEST(Check, ReleaseBeforeOffset) {
  auto s = fig2().schedule;
  // Serve m3 in the first round, before control has produced it.
  auto& first = s.rounds[0].slots;
  auto& second = s.rounds[1].slots;
  std::swap(first[0], second[0]);
  const auto report = recheck(s);
  EXPECT_FALSE(report.passed(verdict::kRelease) && report.passed(verdict::kDeadline));
}

// Each mutation of a synthesized schedule must flip some verdict.
TEST(Check, MutationsAreDetected) {
  std::mt19937_64 rng(19);
  int schedules = 0;
  for (int trial = 0; trial < 60 && schedules < 15; ++trial) {
    const auto spec = ttw::testing::random_small_spec(rng);
    const auto model = ttw::resolve_mode(spec, "m");
    const auto r = ttw::synthesize(model, spec.network, spec.synth);
    if (r.status != ttw::SynthStatus::kFeasible || r.rounds == 0) continue;
    ++schedules;
    const auto& base = *r.schedule;
    ASSERT_TRUE(ttw::check(model, base, spec.network).ok());
    auto flips = [&](const ttw::ModeSchedule& m) { return !ttw::check(model, m, spec.network).ok(); };

    for (std::size_t j = 0; j < base.rounds.size(); ++j) {
      for (std::size_t k = 0; k < base.rounds[j].slots.size(); ++k) {
        const auto& slot = base.rounds[j].slots[k];
        if (!slot) continue;
        auto del = base;
        del.rounds[j].slots[k].reset();
        EXPECT_TRUE(flips(del)) << "delete, trial " << trial;
        for (const auto& other : model.messages) {
          if (other.id == *slot) continue;
          auto swapped = base;
          swapped.rounds[j].slots[k] = other.id;
          EXPECT_TRUE(flips(swapped)) << "swap, trial " << trial;
        }
      }
      auto late = base;
      late.rounds[j].start_us = base.hyperperiod_us - base.round_length_us + spec.synth.grid_us;
      EXPECT_TRUE(flips(late)) << "past hyperperiod, trial " << trial;
      if (j > 0) {
        auto overlap = base;
        overlap.rounds[j].start_us = base.rounds[j - 1].start_us + base.round_length_us - spec.synth.grid_us;
        EXPECT_TRUE(flips(overlap)) << "overlap, trial " << trial;
      }
    }
  }
  EXPECT_GE(schedules, 10);
}

}  // namespace
