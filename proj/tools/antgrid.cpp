#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "antgrid/experiment.hpp"
#include "antgrid/trace.hpp"

namespace {

using antgrid::ConfigError;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailure = 2;
constexpr int kExitConfigError = 3;

uint64_t default_seed() {
  if (const char* env = std::getenv("ANTGRID_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

struct CommonFlags {
  std::string program;
  std::string mode = "auto";
  uint32_t k = 0;
  std::string treasure;
  int64_t distance = 0;
  std::string scheduler;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string faults;
  int64_t budget = -1;
  uint64_t max_steps = 0;
  std::string trace_path;
  std::string report_path;
  std::string emission;
  bool tm_mutable_id = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--program", f.program,
                  "ant program: async-fsm | sync-fsm | async-ft-fsm | sync-ft-fsm | tm");
  cmd->add_option("--mode", f.mode, "scheduling model: auto | sync | async");
  cmd->add_option("--k", f.k, "number of ants");
  cmd->add_option("--treasure", f.treasure, "treasure position X,Y");
  cmd->add_option("--distance", f.distance, "treasure distance (deterministic placement)");
  cmd->add_option("--scheduler", f.scheduler, "round-robin | random | script:FILE");
  cmd->add_option("--seed", f.seed, "PRNG seed (default: $ANTGRID_SEED or 0)")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--faults", f.faults, "fault plan: FILE (JSON [[ant,step],...]) or random:F");
  cmd->add_option("--budget", f.budget, "pheromone emission budget");
  cmd->add_option("--max-steps", f.max_steps, "step safety cap (0 = default)");
  cmd->add_option("--trace", f.trace_path, "write a JSON Lines trace here");
  cmd->add_option("--report", f.report_path, "write JSON Lines report rows here");
  cmd->add_option("--emission", f.emission, "one-per-round | on-first-schedule");
  cmd->add_flag("--tm-mutable-id", f.tm_mutable_id, "tm variant with an advancing id");
}

// Folds CLI flags over a (possibly empty) experiment document; flags win.
json flags_to_doc(const CommonFlags& f, json doc) {
  if (!f.program.empty()) doc["program"] = f.program;
  if (f.mode != "auto" || !doc.contains("mode")) doc["mode"] = f.mode;
  if (f.k > 0) doc["k"] = f.k;
  if (!f.treasure.empty()) {
    const auto comma = f.treasure.find(',');
    if (comma == std::string::npos)
      throw ConfigError("treasure", "expected X,Y");
    doc["treasure"] = json::array({std::stoll(f.treasure.substr(0, comma)),
                                   std::stoll(f.treasure.substr(comma + 1))});
    doc.erase("distance");
  }
  if (f.distance > 0) {
    doc["distance"] = f.distance;
    doc.erase("treasure");
  }
  if (!f.scheduler.empty()) {
    if (f.scheduler.rfind("script:", 0) == 0) {
      std::ifstream is(f.scheduler.substr(7));
      if (!is) throw ConfigError("scheduler", "cannot open script file");
      json script = json::parse(is);
      doc["scheduler"] = json{{"script", script}};
    } else {
      doc["scheduler"] = f.scheduler;
    }
  }
  if (f.seed_set) doc["seed"] = f.seed;
  if (!f.faults.empty()) {
    if (f.faults.rfind("random:", 0) == 0) {
      doc["faults"] = json{{"random", std::stoul(f.faults.substr(7))},
                           {"seed", f.seed_set ? f.seed : default_seed()}};
    } else {
      std::ifstream is(f.faults);
      if (!is) throw ConfigError("faults", "cannot open fault plan file");
      doc["faults"] = json{{"kills", json::parse(is)}};
    }
  }
  if (f.budget >= 0) doc["budget"] = f.budget;
  if (f.max_steps > 0) doc["max_steps"] = f.max_steps;
  if (!f.trace_path.empty()) doc["trace"] = f.trace_path;
  if (!f.report_path.empty()) doc["report"] = f.report_path;
  if (!f.emission.empty()) doc["emission"] = f.emission;
  if (f.tm_mutable_id) doc["tm_mutable_id"] = true;
  if (!doc.contains("seed")) doc["seed"] = default_seed();
  return doc;
}

int emit_rows_and_exit_code(const std::vector<antgrid::ReportRow>& rows) {
  bool ok = true;
  bool all_rejected = !rows.empty();
  for (const auto& row : rows) {
    std::cout << antgrid::row_to_json(row).dump() << '\n';
    ok = ok && row.verdicts_pass();
    all_rejected = all_rejected && row.error.rfind("ConfigInvalid", 0) == 0;
  }
  if (all_rejected) return kExitConfigError;
  return ok ? kExitOk : kExitVerdictFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antgrid: pheromone foraging simulations on the infinite grid"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* cmd_run = app.add_subcommand("run", "run a single configuration");
  add_common_flags(cmd_run, run_flags);

  CommonFlags sweep_flags;
  std::string sweep_config;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run an experiment sweep");
  cmd_sweep->add_option("--config", sweep_config, "sweep spec (JSON)")->required();
  add_common_flags(cmd_sweep, sweep_flags);

  std::string summarize_report;
  CLI::App* cmd_summarize =
      app.add_subcommand("summarize", "fit bounds and check verdicts over a report");
  cmd_summarize->add_option("--report", summarize_report, "report file (JSON Lines)")
      ->required();

  CommonFlags cycle_flags;
  uint64_t cycle_steps = 200000;
  CLI::App* cmd_cycle = app.add_subcommand(
      "detect-cycle", "run one budgeted ant and report the trajectory loop");
  add_common_flags(cmd_cycle, cycle_flags);
  cmd_cycle->add_option("--steps", cycle_steps, "simulation step cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      json doc = flags_to_doc(run_flags, json::object());
      antgrid::ExperimentSpec spec = antgrid::parse_experiment(doc);
      return emit_rows_and_exit_code(antgrid::run_experiment(spec));
    }

    if (cmd_sweep->parsed()) {
      std::ifstream is(sweep_config);
      if (!is) throw ConfigError("config", "cannot open sweep config " + sweep_config);
      json doc = json::parse(is);
      doc = flags_to_doc(sweep_flags, doc);
      antgrid::ExperimentSpec spec = antgrid::parse_experiment(doc);
      return emit_rows_and_exit_code(antgrid::run_experiment(spec));
    }

    if (cmd_summarize->parsed()) {
      auto rows = antgrid::read_report_file(summarize_report);
      antgrid::Summary summary = antgrid::summarize_rows(rows);
      std::cout << antgrid::summary_to_json(summary).dump(2) << '\n';
      return summary.pass ? kExitOk : kExitVerdictFailure;
    }

    if (cmd_cycle->parsed()) {
      if (cycle_flags.budget < 0)
        throw ConfigError("budget", "detect-cycle requires --budget");
      if (cycle_flags.program.empty()) cycle_flags.program = "async-fsm";
      if (cycle_flags.k == 0) cycle_flags.k = 1;
      if (cycle_flags.treasure.empty() && cycle_flags.distance == 0)
        cycle_flags.treasure = "-1000,0";  // far off the budgeted walk's drift
      if (cycle_flags.max_steps == 0) cycle_flags.max_steps = cycle_steps;
      json doc = flags_to_doc(cycle_flags, json::object());
      antgrid::ExperimentSpec spec = antgrid::parse_experiment(doc);
      auto cells = antgrid::expand_cells(spec);
      antgrid::validate_config(cells.at(0));
      antgrid::RunResult result = antgrid::run(cells.at(0));
      antgrid::CycleReport report =
          antgrid::detect_cycle(result, cells.at(0).program);
      nlohmann::ordered_json out;
      out["cycle_found"] = report.cycle_found;
      out["cycle_start_step"] = report.cycle_start_step;
      out["period"] = report.period;
      out["displacement"] = json::array({report.displacement.x, report.displacement.y});
      out["covered_radius"] = report.covered_radius;
      out["run_error"] = antgrid::run_error_name(result.error);
      std::cout << out.dump(2) << '\n';
      if (!cycle_flags.trace_path.empty())
        antgrid::write_trace_file(cycle_flags.trace_path, result.trace);
      return report.cycle_found ? kExitOk : kExitVerdictFailure;
    }
  } catch (const ConfigError& e) {
    std::cerr << "antgrid: config error (" << e.field << "): " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "antgrid: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}
