#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "antgrid/analysis.hpp"
#include "antgrid/scheduler.hpp"

namespace antgrid {

// A single experiment or a sweep: base settings plus axes. Every cell in
// the cross product expands to one validated RunConfig.
struct ExperimentSpec {
  std::vector<AntProgramId> programs{AntProgramId::AsyncFsm};
  std::vector<std::string> modes{"auto"};  // auto | sync | async
  std::vector<uint32_t> ks{1};
  std::vector<Position> treasures;     // explicit positions, or
  std::vector<int64_t> distances;      // deterministic placement per seed
  std::vector<uint64_t> seeds{0};
  std::vector<uint32_t> fault_counts{0};  // random fail-stop count axis
  ScheduleKind scheduler = ScheduleKind::RoundRobin;
  std::vector<uint32_t> script;
  std::optional<FaultPlan> explicit_faults;  // overrides the fault axis
  std::optional<uint64_t> budget;
  uint64_t max_steps = 0;
  std::optional<EmissionMode> emission;
  uint32_t repetitions = 1;
  bool tm_mutable_id = false;
  std::string trace_path;
  std::string report_path;
};

struct ReportRow {
  uint64_t cell = 0;
  RunConfig config;
  RunMetrics metrics;
  bool coverage_ok = false;
  bool collision_ok = true;
  bool audit_ok = false;
  uint32_t ants_departed = 0;
  std::string error;  // run error name or config rejection, empty when clean

  bool verdicts_pass() const {
    return error.empty() && metrics.found && coverage_ok && collision_ok && audit_ok;
  }
};

// Deterministic treasure placement at a given distance: walks the layer
// clockwise from (0, D), so seeds cycle through axis, near-axis and
// diagonal cells.
Position place_treasure(int64_t distance, uint64_t seed);

ExperimentSpec parse_experiment(const nlohmann::json& doc);
nlohmann::json experiment_to_json(const ExperimentSpec& spec);

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
nlohmann::ordered_json metrics_to_json(const RunMetrics& m);
nlohmann::ordered_json row_to_json(const ReportRow& row);
ReportRow row_from_json(const nlohmann::json& doc);

std::vector<RunConfig> expand_cells(const ExperimentSpec& spec);

// Runs one cell, applying the verifiers and the pheromone audit. Config
// rejections land in `error`; they never throw.
ReportRow run_cell(const RunConfig& cfg, uint64_t cell_index,
                   const std::string& trace_path = "");

std::vector<ReportRow> run_experiment(const ExperimentSpec& spec);

void write_report_file(const std::string& path, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_file(const std::string& path);

struct ProgramSummary {
  std::string program;
  bool synchronous = false;
  size_t rows = 0;
  size_t found = 0;
  bool all_coverage = true;
  bool all_collision = true;
  bool all_audit = true;
  bool fit_ok = true;  // residual within gate and bound dominating
  FitResult fit;
};

struct Summary {
  std::vector<ProgramSummary> programs;
  bool pass = false;
};

inline constexpr double kFitResidualGate = 0.5;

Summary summarize_rows(const std::vector<ReportRow>& rows);
nlohmann::ordered_json summary_to_json(const Summary& s);

}  // namespace antgrid
