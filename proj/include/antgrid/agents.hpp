#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "antgrid/world.hpp"

namespace antgrid {

enum class AntProgramId : uint8_t { AsyncFsm, SyncFsm, AsyncFtFsm, SyncFtFsm, Tm };

const char* program_name(AntProgramId id);
AntProgramId parse_program(const std::string& name);
bool program_is_synchronous(AntProgramId id);

// The only world input an ant ever receives: whether its current cell is
// marked. Two ants on one cell cannot detect each other.
struct Observation {
  bool pheromone_here = false;
};

// Emission, if requested, happens on the pre-move cell; the move follows.
struct Action {
  bool emit_pheromone = false;
  Direction move = Direction::Hold;
};

// ---------------------------------------------------------------------------
// FSM programs
//
// Each program is flattened into a single sense-decide-act transition per
// step. A control state names where in the cycle the ant is *at sense time*,
// i.e. which cell kind it has just arrived on. The ray-walk primitives are
// do-while: the step that ends one walk issues the first move of the next,
// so a walk never re-tests its own start cell.

enum class FsmPhase : uint8_t {
  LeaveNest,    // at the nest, about to take the first eastbound step
  EastScan,     // riding the east ray outward; an unmarked arrival is the end
  NewbieEast,   // newbie: just stepped east onto the ray
  NewbieNorth,  // newbie: moved up to the check cell, idles next
  NewbieIdle,   // newbie: post-idle look for a veteran's mark
  NewbieRetry,  // newbie: collision seen, back on the ray, keep east
  PairNorth,    // second mark of an eastern extension goes here
  ExtendDone,   // eastern extension finished, head home
  WestHome,     // westbound along the east ray until the nest
  SouthScan,    // extending the south ray
  NorthHome,    // northbound back to the nest
  WestScan,     // extending the west ray
  EastHome,     // eastbound back to the nest
  NorthClimb,   // up the north ray; the first free cell is the layer claim
  Q1Zig, Q1Zag, // north-east quadrant, east/south alternation
  Q1Probe1,     // ft: one south of a marked zag cell, testing for a ray end
  Q1Probe2,     // ft: one further west, the second half of the test
  Q1RecoverA,   // ft: back on the doubted cell, resume the zigzag east
  Q1RecoverB,   // ft: returning north-east after a failed second probe
  Q2Zig, Q2Zag, // south-east quadrant, south/west
  Q3Zig, Q3Zag, // south-west quadrant, west/north
  Q4Zig, Q4Zag, // north-west quadrant, north/east
  SouthHome,    // layer done (plain programs): down the north ray to the nest
  MarkEast,     // layer done (ft): one cell east of the ray, emit completion
  DescSouth,    // ft descent: back on the ray, step down
  DescRay,      // ft descent: on a ray cell (or the nest, which ends it)
  DescCheck,    // ft descent: east of the ray, testing the completion mark
  DescProbeW,   // ft: missing marker; back on the ray before the nest peek
  DescProbeS,   // ft: one step down, deciding whether this is layer one
  ReEnterUp,    // ft: back up on the unfinished layer's ray cell
  ReEnter1,     // ft: the unfinished layer is layer one
};

struct FsmControl {
  FsmPhase phase = FsmPhase::LeaveNest;
  bool veteran = false;    // sync programs: flips at the first layer claim
  bool first = false;      // NorthClimb: nothing climbed yet (layer-one detect)
  bool layer1 = false;     // ft: the layer being explored is layer one
  bool prev_mark = false;  // plain sync Q1: previous zig arrival was marked

  bool operator==(const FsmControl&) const = default;
};

struct FsmControlHash {
  size_t operator()(const FsmControl& c) const {
    return (static_cast<size_t>(c.phase) << 4) | (c.veteran ? 1u : 0u) |
           (c.first ? 2u : 0u) | (c.layer1 ? 4u : 0u) | (c.prev_mark ? 8u : 0u);
  }
};

struct FsmState {
  AntProgramId program = AntProgramId::AsyncFsm;
  FsmControl control;
};

std::pair<Action, FsmState> step_fsm(const FsmState& s, Observation o);
std::pair<Action, FsmState> step_async_fsm(const FsmState& s, Observation o);
std::pair<Action, FsmState> step_sync_fsm(const FsmState& s, Observation o);
std::pair<Action, FsmState> step_async_ft_fsm(const FsmState& s, Observation o);
std::pair<Action, FsmState> step_sync_ft_fsm(const FsmState& s, Observation o);

FsmState initial_fsm_state(AntProgramId program);

// Closure of the transition relation over both observations, from the
// initial state. Terminates because the control space is finite by
// construction; the count is the S of the loop-detection bound.
std::vector<FsmControl> enumerate_reachable_states(AntProgramId program);

// True when a step crossed the end of a full layer circuit (used by the
// harness to log layer completions; the ant itself carries no layer number).
bool explore_completed(const FsmControl& before, const FsmControl& after);
bool claims_layer(const FsmControl& before, const FsmControl& after);

const char* phase_name(FsmPhase p);

// ---------------------------------------------------------------------------
// TM program
//
// Counters replace pheromone guides: the ant claims an identity on the north
// ray once, then walks counted diamond perimeters and counted ray descents
// forever. All counters stay O(current layer).

enum class TmPhase : uint8_t {
  ClimbNorth,    // initial ride up the ray looking for the first free cell
  ExploreLayer,  // counted perimeter walk, clockwise from (0, layer)
  DescendVerify, // counted walk down to the nest, tallying marked cells
  ClimbOut,      // counted walk back up to the next layer
};

enum class TmLeg : uint8_t { NorthEast, SouthEast, SouthWest, NorthWest };

struct TmState {
  AntProgramId program = AntProgramId::Tm;
  TmPhase phase = TmPhase::ClimbNorth;
  uint64_t id = 1;
  uint64_t total = 1;
  uint64_t current_layer = 1;
  TmLeg leg = TmLeg::NorthEast;
  uint64_t counter = 0;   // steps taken in leg / cells left to walk
  uint64_t tally = 0;     // marked cells seen during the descent
  bool started = false;   // false until the first northbound step
  // Variant that also advances `id` by `total` after every explored layer,
  // kept selectable for side-by-side comparison of the two readings.
  bool mutable_id = false;

  bool operator==(const TmState&) const = default;
};

std::pair<Action, TmState> step_tm(const TmState& s, Observation o);

TmState initial_tm_state(bool mutable_id = false);

// Largest counter value the state carries; proxy for the memory bound.
uint64_t tm_max_counter(const TmState& s);

}  // namespace antgrid
