#pragma once

#include <functional>
#include <vector>

#include "antgrid/agents.hpp"
#include "antgrid/trace.hpp"
#include "antgrid/world.hpp"

namespace antgrid::test {

// Drives one FSM ant directly against a world, no scheduler involved.
struct SoloFsm {
  WorldState world;
  FsmState state;
  Position pos{0, 0};
  std::vector<Position> path;  // positions after each move
  std::vector<int64_t> claims;     // layers whose first cell this ant marked
  std::vector<int64_t> completed;  // layers whose circuit this ant finished
  std::vector<StepRecord> records;

  SoloFsm(AntProgramId program, Position treasure,
          std::optional<uint64_t> budget = std::nullopt)
      : world(treasure, budget), state(initial_fsm_state(program)) {}

  Action step() {
    Observation o{sense(world, pos)};
    auto [act, next] = step_fsm(state, o);
    if (claims_layer(state.control, next.control)) claims.push_back(pos.y);
    if (explore_completed(state.control, next.control)) completed.push_back(pos.y);
    StepRecord rec;
    rec.step_index = records.size();
    rec.ant_id = 1;
    rec.fingerprint = FsmControlHash{}(state.control);
    rec.pos_before = pos;
    rec.sensed = o.pheromone_here;
    if (act.emit_pheromone) rec.emitted = emit(world, pos);
    state = next;
    pos = moved(pos, act.move);
    visit(world, pos);
    path.push_back(pos);
    rec.pos_after = pos;
    records.push_back(rec);
    return act;
  }

  // Runs until the predicate holds or the cap trips; returns steps taken.
  uint64_t run_until(const std::function<bool(const SoloFsm&)>& done, uint64_t cap) {
    uint64_t steps = 0;
    while (steps < cap && !done(*this)) {
      step();
      ++steps;
    }
    return steps;
  }
};

}  // namespace antgrid::test
