#include "antgrid/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace antgrid {

namespace {

Direction leg_direction(TmLeg leg, bool zig) {
  switch (leg) {
    case TmLeg::NorthEast: return zig ? Direction::East : Direction::South;
    case TmLeg::SouthEast: return zig ? Direction::South : Direction::West;
    case TmLeg::SouthWest: return zig ? Direction::West : Direction::North;
    case TmLeg::NorthWest: return zig ? Direction::North : Direction::East;
  }
  return Direction::Hold;
}

std::pair<Action, TmState> out(bool emit, Direction dir, TmState next) {
  return {Action{emit, dir}, std::move(next)};
}

}  // namespace

TmState initial_tm_state(bool mutable_id) {
  TmState s;
  s.mutable_id = mutable_id;
  return s;
}

std::pair<Action, TmState> step_tm(const TmState& s, Observation o) {
  if (s.program != AntProgramId::Tm)
    throw std::invalid_argument("antgrid: state belongs to a different program");
  TmState n = s;
  const bool mark = o.pheromone_here;

  switch (s.phase) {
    case TmPhase::ClimbNorth: {
      if (!s.started) {  // at the nest, take the first northbound step
        n.started = true;
        n.counter = 1;  // height after the move
        return out(false, Direction::North, n);
      }
      if (mark) {  // cell already claimed, keep climbing
        n.counter = s.counter + 1;
        return out(false, Direction::North, n);
      }
      // First free ray cell: claim it. This is the ant's only emission.
      n.id = s.counter;
      n.total = s.counter;
      n.current_layer = s.counter;
      n.phase = TmPhase::ExploreLayer;
      n.leg = TmLeg::NorthEast;
      n.counter = 1;  // the eastbound step issued now
      return out(true, Direction::East, n);
    }

    case TmPhase::ExploreLayer: {
      const uint64_t leg_len = 2 * s.current_layer;
      if (s.counter < leg_len) {
        const bool zig = (s.counter % 2 == 0);
        n.counter = s.counter + 1;
        return out(false, leg_direction(s.leg, zig), n);
      }
      if (s.leg != TmLeg::NorthWest) {  // next quadrant, first (zig) step
        n.leg = static_cast<TmLeg>(static_cast<uint8_t>(s.leg) + 1);
        n.counter = 1;
        return out(false, leg_direction(n.leg, true), n);
      }
      // Back at (0, layer): walk down to the nest tallying claimed cells.
      n.phase = TmPhase::DescendVerify;
      n.counter = s.current_layer - 1;  // height after the move
      n.tally = mark ? 1 : 0;
      return out(false, Direction::South, n);
    }

    case TmPhase::DescendVerify: {
      if (s.counter > 0) {
        n.tally = s.tally + (mark ? 1 : 0);
        n.counter = s.counter - 1;
        return out(false, Direction::South, n);
      }
      // At the nest: fold the tally into the population estimate and pick
      // the next layer.
      const uint64_t new_total = std::max(s.total, s.tally);
      const bool updated = new_total > s.total;
      n.total = new_total;
      n.tally = 0;
      if (s.mutable_id) {
        // Ladder variant: the identity itself advances by the stride.
        n.current_layer = s.current_layer + new_total;
        n.id = n.current_layer;
      } else {
        n.current_layer = updated ? s.id + new_total : s.current_layer + new_total;
      }
      n.phase = TmPhase::ClimbOut;
      n.counter = n.current_layer - 1;  // cells left after the move
      return out(false, Direction::North, n);
    }

    case TmPhase::ClimbOut: {
      if (s.counter > 0) {
        n.counter = s.counter - 1;
        return out(false, Direction::North, n);
      }
      // At (0, layer): start the perimeter walk.
      n.phase = TmPhase::ExploreLayer;
      n.leg = TmLeg::NorthEast;
      n.counter = 1;
      return out(false, Direction::East, n);
    }
  }
  throw std::logic_error("antgrid: unhandled TM phase");
}

uint64_t tm_max_counter(const TmState& s) {
  return std::max({s.id, s.total, s.current_layer, s.counter, s.tally});
}

}  // namespace antgrid
