#include "doctest.h"

#include <algorithm>

#include "antgrid/agents.hpp"
#include "helpers.hpp"

using namespace antgrid;
using antgrid::test::SoloFsm;

TEST_CASE("fresh ant: east then emit-and-west") {
  SoloFsm ant(AntProgramId::AsyncFsm, {100, 100});

  Action a1 = ant.step();
  CHECK(a1.move == Direction::East);
  CHECK_FALSE(a1.emit_pheromone);
  CHECK(ant.pos == Position{1, 0});

  Action a2 = ant.step();
  CHECK(a2.move == Direction::West);
  CHECK(a2.emit_pheromone);
  CHECK(sense(ant.world, {1, 0}));
  CHECK(ant.pos == Position{0, 0});
}

TEST_CASE("first ray-extension cycle marks exactly the four unit rays") {
  SoloFsm ant(AntProgramId::AsyncFsm, {100, 100});
  ant.run_until([](const SoloFsm& s) { return !s.claims.empty(); }, 100);
  REQUIRE(ant.claims == std::vector<int64_t>{1});
  CHECK(ant.world.pheromones.cells ==
        PositionSet{{1, 0}, {0, -1}, {-1, 0}, {0, 1}});
  CHECK(ant.world.pheromones.emit_count == 4);
}

TEST_CASE("exploration path around layer 2 matches the reference circuit") {
  SoloFsm ant(AntProgramId::AsyncFsm, {100, 100});
  // Rays of length 2 on all axes except the north claim the ant is about to
  // make itself.
  for (Position p : {Position{1, 0}, Position{2, 0}, Position{0, -1}, Position{0, -2},
                     Position{-1, 0}, Position{-2, 0}, Position{0, 1}})
    emit(ant.world, p);
  ant.world.pheromones.emit_count = 0;
  ant.pos = {0, 2};
  ant.state.control.phase = FsmPhase::NorthClimb;

  Action claim = ant.step();
  CHECK(claim.emit_pheromone);
  CHECK(sense(ant.world, {0, 2}));
  CHECK(ant.pos == Position{1, 2});

  std::vector<Position> expected{{1, 1},  {2, 1},   {2, 0},   {2, -1},  {1, -1},
                                 {1, -2}, {0, -2},  {-1, -2}, {-1, -1}, {-2, -1},
                                 {-2, 0}, {-2, 1},  {-1, 1},  {-1, 2},  {0, 2}};
  ant.path.clear();
  for (size_t i = 0; i < expected.size(); ++i) ant.step();
  CHECK(ant.path == expected);

  // then back south to the nest
  ant.step();
  CHECK(ant.pos == Position{0, 1});
  ant.step();
  CHECK(ant.pos == Position{0, 0});
  CHECK(ant.completed == std::vector<int64_t>{2});
}

TEST_CASE("every explored layer is fully covered, layers 1..10") {
  SoloFsm ant(AntProgramId::AsyncFsm, {100, 100});
  ant.run_until([](const SoloFsm& s) { return s.completed.size() >= 10; }, 20000);
  REQUIRE(ant.completed.size() == 10);
  for (int64_t l = 1; l <= 10; ++l) {
    CAPTURE(l);
    for (Position cell : layer_cells(l)) CHECK(ant.world.visited.contains(cell));
  }
}

TEST_CASE("four emissions per explored layer") {
  SoloFsm ant(AntProgramId::AsyncFsm, {100, 100});
  ant.run_until([](const SoloFsm& s) { return s.claims.size() >= 8; }, 20000);
  for (size_t i = 0; i < ant.claims.size(); ++i) CHECK(ant.claims[i] == int64_t(i + 1));
  // at the moment layer l is claimed, all four rays reach l
  ant.run_until([](const SoloFsm& s) { return s.claims.size() >= 9; }, 20000);
  CHECK(ant.world.pheromones.emit_count == 4 * 9);
}

TEST_CASE("transitions are total and deterministic over the reachable set") {
  for (AntProgramId p : {AntProgramId::AsyncFsm, AntProgramId::SyncFsm,
                         AntProgramId::AsyncFtFsm, AntProgramId::SyncFtFsm}) {
    CAPTURE(program_name(p));
    auto states = enumerate_reachable_states(p);
    CHECK(states.size() > 10);
    CHECK(states.size() < 200);
    for (const FsmControl& c : states) {
      for (bool mark : {false, true}) {
        auto r1 = step_fsm(FsmState{p, c}, Observation{mark});
        auto r2 = step_fsm(FsmState{p, c}, Observation{mark});
        CHECK(r1.first.emit_pheromone == r2.first.emit_pheromone);
        CHECK(r1.first.move == r2.first.move);
        CHECK(r1.second.control == r2.second.control);
      }
    }
  }
}

TEST_CASE("reachable control-state counts are frozen") {
  // Constant by construction; a change here means the machines changed.
  CHECK(enumerate_reachable_states(AntProgramId::AsyncFsm).size() == 18);
  CHECK(enumerate_reachable_states(AntProgramId::SyncFsm).size() == 33);
  CHECK(enumerate_reachable_states(AntProgramId::AsyncFtFsm).size() == 31);
  CHECK(enumerate_reachable_states(AntProgramId::SyncFtFsm).size() == 45);
}

TEST_CASE("ray dominance holds throughout a long run") {
  SoloFsm ant(AntProgramId::AsyncFsm, {100, 100});
  for (int i = 0; i < 3000; ++i) {
    ant.step();
    const int64_t n = ray_length(ant.world, Direction::North);
    CHECK(n <= ray_length(ant.world, Direction::East));
    CHECK(n <= ray_length(ant.world, Direction::South));
    CHECK(n <= ray_length(ant.world, Direction::West));
  }
}

TEST_CASE("treasure on a ray ends the search during extension") {
  SoloFsm ant(AntProgramId::AsyncFsm, {0, -3});
  ant.run_until([](const SoloFsm& s) { return s.world.found; }, 1000);
  CHECK(ant.world.found);
  // found while extending the south ray: no layer-3 circuit was needed
  CHECK(std::find(ant.completed.begin(), ant.completed.end(), 3) == ant.completed.end());
}
