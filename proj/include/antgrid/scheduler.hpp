#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "antgrid/agents.hpp"
#include "antgrid/analysis.hpp"
#include "antgrid/rng.hpp"
#include "antgrid/trace.hpp"
#include "antgrid/world.hpp"

namespace antgrid {

enum class ScheduleKind : uint8_t { RoundRobin, SeededRandom, Scripted };

struct ScheduleStrategy {
  ScheduleKind kind = ScheduleKind::RoundRobin;
  uint64_t seed = 0;                 // SeededRandom
  std::vector<uint32_t> script;      // Scripted, ant ids (1-based)
};

enum class EmissionMode : uint8_t { OnePerRound, OnFirstSchedule };

// Fail-stop plan. A kill (a, s) means ant a takes exactly s steps and is
// dead from the moment its s-th step would start; its pheromones persist.
struct FaultPlan {
  std::vector<std::pair<uint32_t, uint64_t>> kills;
  bool random = false;
  uint32_t random_count = 0;
  uint64_t random_seed = 0;

  bool empty() const { return kills.empty() && !random; }
};

// Expands a plan into ant -> kill step. Random plans draw `random_count`
// distinct ants and independent kill steps in [0, D^2 + 8D + 64).
std::map<uint32_t, uint64_t> resolve_fault_plan(const FaultPlan& plan, uint32_t k,
                                                int64_t distance);

enum class RunError : uint8_t {
  None,
  BudgetLoopDetected,
  StepCapExceeded,
  ScriptExhausted,
};

const char* run_error_name(RunError e);

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string fld, const std::string& what)
      : std::runtime_error(what), field(std::move(fld)) {}
};

struct RunConfig {
  AntProgramId program = AntProgramId::AsyncFsm;
  bool synchronous = false;
  uint32_t k = 1;
  Position treasure{1, 0};
  ScheduleStrategy strategy;
  EmissionMode emission = EmissionMode::OnFirstSchedule;
  FaultPlan faults;
  uint64_t max_steps = 0;  // 0: use default_max_steps()
  std::optional<uint64_t> pheromone_budget;
  bool tm_mutable_id = false;

  int64_t distance() const { return manhattan_distance(treasure); }
  uint64_t default_max_steps() const {
    const uint64_t d = static_cast<uint64_t>(distance());
    return 64 * (d * d + k * d + 1000);
  }
  uint64_t step_cap() const { return max_steps ? max_steps : default_max_steps(); }
};

// Throws ConfigError on an invalid configuration (k = 0, treasure on the
// nest, program/model mismatch, f = k, out-of-range script ids, ...).
void validate_config(const RunConfig& cfg);

struct Ant {
  uint32_t id = 0;  // 1-based
  Position pos{0, 0};
  std::variant<FsmState, TmState> state;
  uint64_t steps_taken = 0;
  bool alive = true;
  bool departed = false;  // has been released from the nest
};

Ant make_ant(uint32_t id, const RunConfig& cfg);
uint64_t state_fingerprint(const Ant& a);

// Round accounting shared by both schedulers and the trace replayer: a
// round completes as soon as every live, already-released ant has stepped
// at least once since the previous boundary.
class RoundClock {
 public:
  void track(uint32_t id) { pending_.insert(id); fresh_.insert(id); }
  void untrack(uint32_t id) {
    pending_.erase(id);
    fresh_.erase(id);
    maybe_complete();
  }
  void on_step(uint32_t id) {
    fresh_.erase(id);
    maybe_complete();
  }
  uint64_t rounds_completed() const { return rounds_; }

 private:
  void maybe_complete() {
    if (!pending_.empty() && fresh_.empty()) {
      ++rounds_;
      fresh_ = pending_;
    }
  }
  std::set<uint32_t> pending_;  // live and released
  std::set<uint32_t> fresh_;    // still owe a step this round
  uint64_t rounds_ = 0;
};

struct RunResult {
  RunMetrics metrics;
  RunError error = RunError::None;
  std::vector<TraceEvent> trace;
  std::vector<StepRecord> steps;
  PositionSet marked;
  PositionSet visited;
  std::set<int64_t> layers_completed;
  uint32_t ants_departed = 0;
  bool budget_exhausted = false;
};

// Test hooks: invoked after each synchronous round / asynchronous step.
struct RunObserver {
  std::function<void(const WorldState&, const std::vector<Ant>&, uint64_t round)> on_round;
  std::function<void(const WorldState&, const std::vector<Ant>&, const StepRecord&)> on_step;
};

RunResult run_sync(const RunConfig& cfg, const RunObserver* observer = nullptr);
RunResult run_async(const RunConfig& cfg, const RunObserver* observer = nullptr);
RunResult run(const RunConfig& cfg, const RunObserver* observer = nullptr);

// One atomic asynchronous step: sense, decide, emit, move.
StepRecord step_ant(WorldState& w, Ant& a);

// One synchronous round: all ants sense a round-start snapshot, then all
// emissions commit, then all moves execute, in id order.
std::vector<StepRecord> step_sync_round(WorldState& w, std::vector<Ant>& ants);

// A frozen copy of the pheromone field, the view all observations of one
// synchronous round answer from. The round runner gets the same effect by
// ordering every decision before any commit.
struct SenseSnapshot {
  PositionSet cells;
  bool sense(Position p) const { return cells.contains(p); }
};

inline SenseSnapshot snapshot_round_sense(const WorldState& w) {
  return SenseSnapshot{w.pheromones.cells};
}

// Rebuilds the metrics a run reported from its trace file plus the run's
// configuration (round accounting needs the fault and release schedule).
RunMetrics recompute_metrics_from_trace(const std::vector<TraceEvent>& events,
                                        const RunConfig& cfg);

}  // namespace antgrid
