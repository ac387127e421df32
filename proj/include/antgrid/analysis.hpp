#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "antgrid/agents.hpp"
#include "antgrid/trace.hpp"
#include "antgrid/world.hpp"

namespace antgrid {

struct RunMetrics {
  uint64_t rounds = 0;
  std::vector<uint64_t> steps_per_ant;
  uint64_t pheromone_emissions = 0;
  uint64_t distinct_marked_cells = 0;
  bool found = false;
  int64_t treasure_distance = 0;
  // Layer -> every ant that emitted on that layer's north-ray cell. One id
  // per layer in collision-free runs; the sync negative control shows more.
  std::map<int64_t, std::set<uint32_t>> layer_explorer_log;
  uint64_t visited_count = 0;

  bool operator==(const RunMetrics&) const = default;
};

struct CycleReport {
  bool cycle_found = false;
  uint64_t cycle_start_step = 0;
  uint64_t period = 0;
  Position displacement{0, 0};
  // Largest Manhattan distance reached up to the end of the first period.
  int64_t covered_radius = 0;
};

struct FitResult {
  std::string model;
  std::vector<double> coefficients;
  double max_relative_residual = 0.0;
};

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoBudgetExhaustion : AnalysisError {
  NoBudgetExhaustion() : AnalysisError("trace never exhausted its pheromone budget") {}
};
struct Underdetermined : AnalysisError {
  Underdetermined() : AnalysisError("sample matrix is rank-deficient") {}
};

struct RunResult;  // scheduler.hpp

// Pigeonhole cycle search over a budget-exhausted single-ant trace: two
// visits of one control state with no pheromone sensed in between pin a
// loop that repeats verbatim, translated by a fixed displacement.
CycleReport detect_cycle(const RunResult& run, AntProgramId program);

// Whether `cell` lies in the region the trajectory can ever touch once the
// reported cycle holds: the pre-cycle prefix plus the periodic translates.
bool cycle_band_contains(const CycleReport& report,
                         const std::vector<StepRecord>& steps, Position cell);

// Does base + n*step hit target for some integer n >= 0?
bool lattice_hits(Position base, Position step, Position target);

// Every completed layer at or below the treasure layer must be fully
// visited.
bool verify_layer_coverage(const std::set<int64_t>& layers_completed,
                           const PositionSet& visited, int64_t treasure_distance);
bool verify_layer_coverage(const RunResult& run);

// Exactly one claimant per layer in the explorer log.
bool verify_no_collision(const RunMetrics& metrics);

struct FitSample {
  int64_t distance = 0;
  uint32_t ants = 1;
  uint32_t faults = 0;
  uint64_t rounds = 0;
};

inline constexpr const char* kModelBase = "D + D^2/k";
inline constexpr const char* kModelFault = "D + D^2/(k-f) + D*f";

// Least-squares fit of the named bound form, scaled up to dominate every
// sample. max_relative_residual measures how far below the bound the worst
// sample sits, so an inflated bound cannot pass quietly.
FitResult fit_complexity(const std::vector<FitSample>& samples, const std::string& model);

double evaluate_model(const FitResult& fit, int64_t distance, uint32_t ants, uint32_t faults);

// Emission-count checks: counting agents pay one pheromone per departed ant,
// the finite-state programs a constant per layer.
inline constexpr uint64_t kFsmEmissionSlopeBound = 8;
inline constexpr uint64_t kFsmEmissionOffsetBound = 16;

bool pheromone_audit(const RunMetrics& metrics, AntProgramId program, int64_t distance,
                     uint32_t ants, uint64_t ants_departed);

}  // namespace antgrid
