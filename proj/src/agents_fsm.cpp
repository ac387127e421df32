#include "antgrid/agents.hpp"

#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace antgrid {

const char* program_name(AntProgramId id) {
  switch (id) {
    case AntProgramId::AsyncFsm: return "async-fsm";
    case AntProgramId::SyncFsm: return "sync-fsm";
    case AntProgramId::AsyncFtFsm: return "async-ft-fsm";
    case AntProgramId::SyncFtFsm: return "sync-ft-fsm";
    case AntProgramId::Tm: return "tm";
  }
  return "?";
}

AntProgramId parse_program(const std::string& name) {
  if (name == "async-fsm") return AntProgramId::AsyncFsm;
  if (name == "sync-fsm") return AntProgramId::SyncFsm;
  if (name == "async-ft-fsm") return AntProgramId::AsyncFtFsm;
  if (name == "sync-ft-fsm") return AntProgramId::SyncFtFsm;
  if (name == "tm") return AntProgramId::Tm;
  throw std::invalid_argument("antgrid: unknown program '" + name + "'");
}

bool program_is_synchronous(AntProgramId id) {
  return id == AntProgramId::SyncFsm || id == AntProgramId::SyncFtFsm;
}

namespace {

bool is_sync(AntProgramId p) {
  return p == AntProgramId::SyncFsm || p == AntProgramId::SyncFtFsm;
}

bool is_ft(AntProgramId p) {
  return p == AntProgramId::AsyncFtFsm || p == AntProgramId::SyncFtFsm;
}

FsmControl make(FsmPhase phase, bool veteran) {
  FsmControl c;
  c.phase = phase;
  c.veteran = veteran;
  return c;
}

// The eastbound state a cycle starts in, entered while the first east step
// is already underway.
FsmControl east_entry(AntProgramId p, bool veteran) {
  if (is_sync(p) && !veteran) return make(FsmPhase::NewbieEast, false);
  return make(FsmPhase::EastScan, veteran);
}

std::pair<Action, FsmState> out(bool emit, Direction dir, AntProgramId p, FsmControl c) {
  return {Action{emit, dir}, FsmState{p, c}};
}

}  // namespace

FsmState initial_fsm_state(AntProgramId program) {
  if (program == AntProgramId::Tm)
    throw std::invalid_argument("antgrid: tm is not an FSM program");
  return FsmState{program, make(FsmPhase::LeaveNest, false)};
}

std::pair<Action, FsmState> step_fsm(const FsmState& s, Observation o) {
  const AntProgramId p = s.program;
  const FsmControl c = s.control;
  const bool mark = o.pheromone_here;
  const bool vet = c.veteran;

  switch (c.phase) {
    case FsmPhase::LeaveNest:
      return out(false, Direction::East, p, east_entry(p, vet));

    // --- eastern ray ---------------------------------------------------
    case FsmPhase::EastScan:
      if (mark) return out(false, Direction::East, p, c);
      if (is_sync(p))  // veterans leave the two-cell end marker
        return out(true, Direction::North, p, make(FsmPhase::PairNorth, vet));
      return out(true, Direction::West, p, make(FsmPhase::WestHome, vet));

    case FsmPhase::NewbieEast:
      return out(!mark, Direction::North, p, make(FsmPhase::NewbieNorth, vet));

    case FsmPhase::NewbieNorth:
      return out(false, Direction::Hold, p, make(FsmPhase::NewbieIdle, vet));

    case FsmPhase::NewbieIdle:
      if (mark)  // a veteran got here first; keep the gap, try the next cell
        return out(false, Direction::South, p, make(FsmPhase::NewbieRetry, vet));
      return out(true, Direction::South, p, make(FsmPhase::ExtendDone, vet));

    case FsmPhase::NewbieRetry:
      return out(false, Direction::East, p, make(FsmPhase::NewbieEast, vet));

    case FsmPhase::PairNorth:
      return out(true, Direction::South, p, make(FsmPhase::ExtendDone, vet));

    case FsmPhase::ExtendDone:
      return out(false, Direction::West, p, make(FsmPhase::WestHome, vet));

    // --- remaining rays, nest to nest ----------------------------------
    case FsmPhase::WestHome:
      if (mark) return out(false, Direction::West, p, c);
      return out(false, Direction::South, p, make(FsmPhase::SouthScan, vet));

    case FsmPhase::SouthScan:
      if (mark) return out(false, Direction::South, p, c);
      return out(true, Direction::North, p, make(FsmPhase::NorthHome, vet));

    case FsmPhase::NorthHome:
      if (mark) return out(false, Direction::North, p, c);
      return out(false, Direction::West, p, make(FsmPhase::WestScan, vet));

    case FsmPhase::WestScan:
      if (mark) return out(false, Direction::West, p, c);
      return out(true, Direction::East, p, make(FsmPhase::EastHome, vet));

    case FsmPhase::EastHome:
      if (mark) return out(false, Direction::East, p, c);
      {
        FsmControl n = make(FsmPhase::NorthClimb, vet);
        n.first = true;
        return out(false, Direction::North, p, n);
      }

    case FsmPhase::NorthClimb:
      if (mark) return out(false, Direction::North, p, make(FsmPhase::NorthClimb, vet));
      {
        // The layer claim. Sync ants are veterans from here on.
        FsmControl n = make(FsmPhase::Q1Zig, is_sync(p) ? true : vet);
        n.layer1 = is_ft(p) && c.first;
        return out(true, Direction::East, p, n);
      }

    // --- exploration ----------------------------------------------------
    case FsmPhase::Q1Zig: {
      FsmControl n = make(FsmPhase::Q1Zag, vet);
      n.layer1 = c.layer1;
      if (p == AntProgramId::SyncFsm) n.prev_mark = mark;
      return out(false, Direction::South, p, n);
    }

    case FsmPhase::Q1Zag: {
      if (!mark) {
        FsmControl n = make(FsmPhase::Q1Zig, vet);
        n.layer1 = c.layer1;
        return out(false, Direction::East, p, n);
      }
      if (p == AntProgramId::AsyncFsm || c.layer1 ||
          (p == AntProgramId::SyncFsm && c.prev_mark))
        return out(false, Direction::South, p, make(FsmPhase::Q2Zig, vet));
      if (p == AntProgramId::SyncFsm) {  // lone mark off the ray end
        FsmControl n = make(FsmPhase::Q1Zig, vet);
        return out(false, Direction::East, p, n);
      }
      // Fault-tolerant programs cannot trust any single mark here: it may
      // be a completion marker or a leftover half pair. The two cells a
      // real turn would enter next are always bare, so walking them doubles
      // as the test.
      return out(false, Direction::South, p, make(FsmPhase::Q1Probe1, vet));
    }

    case FsmPhase::Q1Probe1:
      if (mark)  // a ray lies south: the doubted cell was not the east end
        return out(false, Direction::North, p, make(FsmPhase::Q1RecoverA, vet));
      return out(false, Direction::West, p, make(FsmPhase::Q1Probe2, vet));

    case FsmPhase::Q1Probe2:
      if (mark)  // the north ray: the doubted cell was a completion marker
        return out(false, Direction::North, p, make(FsmPhase::Q1RecoverB, vet));
      // Both probe cells bare: that was the east ray end, and the probes
      // were the first two steps of the next quadrant.
      return out(false, Direction::South, p, make(FsmPhase::Q2Zig, vet));

    case FsmPhase::Q1RecoverA:
      return out(false, Direction::East, p, make(FsmPhase::Q1Zig, vet));

    case FsmPhase::Q1RecoverB:
      return out(false, Direction::East, p, make(FsmPhase::Q1RecoverA, vet));

    case FsmPhase::Q2Zig:
      return out(false, Direction::West, p, make(FsmPhase::Q2Zag, vet));
    case FsmPhase::Q2Zag:
      if (mark) return out(false, Direction::West, p, make(FsmPhase::Q3Zig, vet));
      return out(false, Direction::South, p, make(FsmPhase::Q2Zig, vet));

    case FsmPhase::Q3Zig:
      return out(false, Direction::North, p, make(FsmPhase::Q3Zag, vet));
    case FsmPhase::Q3Zag:
      if (mark) return out(false, Direction::North, p, make(FsmPhase::Q4Zig, vet));
      return out(false, Direction::West, p, make(FsmPhase::Q3Zig, vet));

    case FsmPhase::Q4Zig:
      return out(false, Direction::East, p, make(FsmPhase::Q4Zag, vet));
    case FsmPhase::Q4Zag:
      if (!mark) return out(false, Direction::North, p, make(FsmPhase::Q4Zig, vet));
      if (is_ft(p)) return out(false, Direction::East, p, make(FsmPhase::MarkEast, vet));
      return out(false, Direction::South, p, make(FsmPhase::SouthHome, vet));

    case FsmPhase::SouthHome:
      if (mark) return out(false, Direction::South, p, c);
      return out(false, Direction::East, p, east_entry(p, vet));

    // --- completion marking and the verification descent ----------------
    case FsmPhase::MarkEast:
      return out(true, Direction::West, p, make(FsmPhase::DescSouth, vet));

    case FsmPhase::DescSouth:
      return out(false, Direction::South, p, make(FsmPhase::DescRay, vet));

    case FsmPhase::DescRay:
      if (mark) return out(false, Direction::East, p, make(FsmPhase::DescCheck, vet));
      // Unmarked ray cell below: the nest. Verified all the way down.
      return out(false, Direction::East, p, east_entry(p, vet));

    case FsmPhase::DescCheck:
      if (mark) return out(false, Direction::West, p, make(FsmPhase::DescSouth, vet));
      // Missing completion marker: redo this layer. A peek one cell below
      // the ray first tells whether the unfinished layer is layer one,
      // whose ray end doubles as the cell a marker would sit next to.
      return out(false, Direction::West, p, make(FsmPhase::DescProbeW, vet));

    case FsmPhase::DescProbeW:
      return out(false, Direction::South, p, make(FsmPhase::DescProbeS, vet));

    case FsmPhase::DescProbeS:
      if (mark) return out(false, Direction::North, p, make(FsmPhase::ReEnterUp, vet));
      return out(false, Direction::North, p, make(FsmPhase::ReEnter1, vet));

    case FsmPhase::ReEnterUp:
      return out(false, Direction::East, p, make(FsmPhase::Q1Zig, vet));

    case FsmPhase::ReEnter1: {
      FsmControl n = make(FsmPhase::Q1Zig, vet);
      n.layer1 = true;
      return out(false, Direction::East, p, n);
    }
  }
  throw std::logic_error("antgrid: unhandled FSM phase");
}

namespace {

std::pair<Action, FsmState> step_checked(const FsmState& s, Observation o, AntProgramId expect) {
  if (s.program != expect)
    throw std::invalid_argument("antgrid: state belongs to a different program");
  return step_fsm(s, o);
}

}  // namespace

std::pair<Action, FsmState> step_async_fsm(const FsmState& s, Observation o) {
  return step_checked(s, o, AntProgramId::AsyncFsm);
}
std::pair<Action, FsmState> step_sync_fsm(const FsmState& s, Observation o) {
  return step_checked(s, o, AntProgramId::SyncFsm);
}
std::pair<Action, FsmState> step_async_ft_fsm(const FsmState& s, Observation o) {
  return step_checked(s, o, AntProgramId::AsyncFtFsm);
}
std::pair<Action, FsmState> step_sync_ft_fsm(const FsmState& s, Observation o) {
  return step_checked(s, o, AntProgramId::SyncFtFsm);
}

std::vector<FsmControl> enumerate_reachable_states(AntProgramId program) {
  std::unordered_set<FsmControl, FsmControlHash> seen;
  std::deque<FsmControl> frontier;
  const FsmControl init = initial_fsm_state(program).control;
  seen.insert(init);
  frontier.push_back(init);
  while (!frontier.empty()) {
    FsmControl cur = frontier.front();
    frontier.pop_front();
    for (bool mark : {false, true}) {
      auto [act, next] = step_fsm(FsmState{program, cur}, Observation{mark});
      (void)act;
      if (seen.insert(next.control).second) frontier.push_back(next.control);
    }
  }
  return {seen.begin(), seen.end()};
}

bool explore_completed(const FsmControl& before, const FsmControl& after) {
  return before.phase == FsmPhase::Q4Zag &&
         (after.phase == FsmPhase::SouthHome || after.phase == FsmPhase::MarkEast);
}

bool claims_layer(const FsmControl& before, const FsmControl& after) {
  return before.phase == FsmPhase::NorthClimb && after.phase == FsmPhase::Q1Zig;
}

const char* phase_name(FsmPhase p) {
  switch (p) {
    case FsmPhase::LeaveNest: return "leave-nest";
    case FsmPhase::EastScan: return "east-scan";
    case FsmPhase::NewbieEast: return "newbie-east";
    case FsmPhase::NewbieNorth: return "newbie-north";
    case FsmPhase::NewbieIdle: return "newbie-idle";
    case FsmPhase::NewbieRetry: return "newbie-retry";
    case FsmPhase::PairNorth: return "pair-north";
    case FsmPhase::ExtendDone: return "extend-done";
    case FsmPhase::WestHome: return "west-home";
    case FsmPhase::SouthScan: return "south-scan";
    case FsmPhase::NorthHome: return "north-home";
    case FsmPhase::WestScan: return "west-scan";
    case FsmPhase::EastHome: return "east-home";
    case FsmPhase::NorthClimb: return "north-climb";
    case FsmPhase::Q1Zig: return "q1-zig";
    case FsmPhase::Q1Zag: return "q1-zag";
    case FsmPhase::Q1Probe1: return "q1-probe1";
    case FsmPhase::Q1Probe2: return "q1-probe2";
    case FsmPhase::Q1RecoverA: return "q1-recover-a";
    case FsmPhase::Q1RecoverB: return "q1-recover-b";
    case FsmPhase::Q2Zig: return "q2-zig";
    case FsmPhase::Q2Zag: return "q2-zag";
    case FsmPhase::Q3Zig: return "q3-zig";
    case FsmPhase::Q3Zag: return "q3-zag";
    case FsmPhase::Q4Zig: return "q4-zig";
    case FsmPhase::Q4Zag: return "q4-zag";
    case FsmPhase::SouthHome: return "south-home";
    case FsmPhase::MarkEast: return "mark-east";
    case FsmPhase::DescSouth: return "desc-south";
    case FsmPhase::DescRay: return "desc-ray";
    case FsmPhase::DescCheck: return "desc-check";
    case FsmPhase::DescProbeW: return "desc-probe-w";
    case FsmPhase::DescProbeS: return "desc-probe-s";
    case FsmPhase::ReEnterUp: return "re-enter-up";
    case FsmPhase::ReEnter1: return "re-enter-1";
  }
  return "?";
}

}  // namespace antgrid
