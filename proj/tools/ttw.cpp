// ttw: schedule synthesis, checking, simulation and round/energy tables.
//
// Exit codes: 0 success, 1 usage or internal error (including a solver
// timeout), 2 no feasible schedule, 3 violations found.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ttw/builder.hpp"
#include "ttw/checker.hpp"
#include "ttw/io.hpp"
#include "ttw/sim.hpp"
#include "ttw/timing.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;
constexpr int kViolations = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

int run_synth(const std::string& spec_path, const std::string& mode, const std::string& out,
              int workers) {
  ttw::SystemSpec spec = ttw::parse_spec(read_file(spec_path));
  if (workers > 0) spec.synth.workers = workers;
  const ttw::ModeModel model = ttw::resolve_mode(spec, mode);
  const ttw::SynthResult result = ttw::synthesize(model, spec.network, spec.synth);
  for (const auto& call : result.calls) {
    std::cerr << "R=" << call.rounds << ": " << ttw::to_string(call.status) << " ("
              << call.stats.nodes << " nodes, " << static_cast<long>(call.stats.elapsed_ms)
              << " ms)\n";
  }
  switch (result.status) {
    case ttw::SynthStatus::kFeasible:
      emit(ttw::schedule_to_json(*result.schedule), out);
      std::cerr << "feasible with " << result.rounds << " round(s), latency sum "
                << result.schedule->objective_us.value_or(0) << " us\n";
      return kOk;
    case ttw::SynthStatus::kInfeasible:
      std::cerr << "infeasible: no schedule with up to " << result.r_max << " round(s)\n";
      return kInfeasible;
    case ttw::SynthStatus::kTimeout:
      std::cerr << "error: solver budget exhausted at R=" << result.rounds << "\n";
      return kError;
  }
  return kError;
}

int run_check(const std::string& spec_path, const std::string& schedule_path) {
  const ttw::SystemSpec spec = ttw::parse_spec(read_file(spec_path));
  const auto schedules = ttw::parse_schedules(read_file(schedule_path));
  bool ok = true;
  for (const auto& s : schedules) {
    const ttw::ModeModel model = ttw::resolve_mode(spec, s.mode);
    const ttw::CheckReport report = ttw::check(model, s, spec.network, spec.synth.t_max_us);
    std::cout << ttw::report_to_json(report, s.mode);
    for (const auto& name : report.failed()) {
      std::cerr << s.mode << ": " << name << " violated\n";
    }
    ok = ok && report.ok();
  }
  return ok ? kOk : kViolations;
}

int run_simulate(const std::string& spec_path, const std::string& schedule_path,
                 const std::string& scenario_path, std::uint64_t seed, const std::string& out) {
  const ttw::SystemSpec spec = ttw::parse_spec(read_file(spec_path));
  const auto schedules = ttw::parse_schedules(read_file(schedule_path));
  ttw::Scenario scenario = ttw::parse_scenario(read_file(scenario_path));
  scenario.seed = seed;
  const ttw::SimTrace trace = ttw::simulate(spec, schedules, scenario);
  emit(ttw::trace_to_jsonl(trace), out);
  std::cerr << trace.summary.rounds << " rounds, " << trace.summary.collisions
            << " collisions, " << trace.violations.size() << " violations\n";
  return trace.clean() ? kOk : kViolations;
}

int run_model(const std::string& grid, std::vector<int> hops, std::vector<int> slots,
              std::vector<int> payloads, int retransmissions) {
  ttw::NetworkParams base;
  if (retransmissions > 0) base.retransmissions = retransmissions;
  if (grid == "round") {
    if (hops.empty()) hops = {2, 3, 4, 5, 6, 7, 8};
    if (slots.empty()) slots = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    if (payloads.empty()) payloads = {base.payload_bytes};
    std::cout << ttw::round_length_csv(hops, slots, payloads, base);
    return kOk;
  }
  if (hops.empty()) hops = {base.hops};
  if (slots.empty()) slots = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (payloads.empty()) payloads = {5, 10, 20, 40, 60, 80, 100};
  std::cout << ttw::energy_saving_csv(payloads, slots, hops, base);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-triggered wireless schedule synthesis and simulation"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string schedule_path;
  std::string scenario_path;
  std::string mode;
  std::string out;
  int workers = 0;
  std::uint64_t seed = 0;
  std::string grid;
  std::vector<int> hops;
  std::vector<int> slots;
  std::vector<int> payloads;
  int retransmissions = 0;

  auto* synth = app.add_subcommand("synth", "Synthesize a schedule for one mode");
  synth->add_option("spec", spec_path, "System specification (JSON)")->required();
  synth->add_option("--mode", mode, "Mode id")->required();
  synth->add_option("--out", out, "Write the schedule here instead of stdout");
  synth->add_option("--workers", workers, "Solver threads")->check(CLI::PositiveNumber);

  auto* chk = app.add_subcommand("check", "Check schedules against a specification");
  chk->add_option("spec", spec_path, "System specification (JSON)")->required();
  chk->add_option("schedule", schedule_path, "Schedule file (JSON)")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate schedule execution");
  sim->add_option("spec", spec_path, "System specification (JSON)")->required();
  sim->add_option("schedule", schedule_path, "Schedules of all modes (JSON)")->required();
  sim->add_option("scenario", scenario_path, "Scenario (JSON)")->required();
  sim->add_option("--seed", seed, "Random seed")->required();
  sim->add_option("--out", out, "Write the trace here instead of stdout");

  auto* model = app.add_subcommand("model", "Print round length or energy tables as CSV");
  model->add_option("--grid", grid, "Table to print")
      ->required()
      ->check(CLI::IsMember({"round", "energy"}));
  model->add_option("--H", hops, "Network diameters")->delimiter(',');
  model->add_option("--B", slots, "Slots per round")->delimiter(',');
  model->add_option("--l", payloads, "Payload sizes in bytes")->delimiter(',');
  model->add_option("--N", retransmissions, "Transmissions per node and flood");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (synth->parsed()) return run_synth(spec_path, mode, out, workers);
    if (chk->parsed()) return run_check(spec_path, schedule_path);
    if (sim->parsed()) return run_simulate(spec_path, schedule_path, scenario_path, seed, out);
    if (model->parsed()) return run_model(grid, hops, slots, payloads, retransmissions);
  } catch (const std::exception& e) {
    std::cerr << "ttw: error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
