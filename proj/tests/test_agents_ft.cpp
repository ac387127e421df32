#include "doctest.h"

#include <algorithm>

#include "antgrid/agents.hpp"
#include "antgrid/scheduler.hpp"
#include "helpers.hpp"

using namespace antgrid;
using antgrid::test::SoloFsm;

namespace {

// Step count of `ant` at the moment it emits on (0, layer), plus an offset:
// a deterministic handle on "mid exploration of that layer".
uint64_t kill_step_mid_layer(const RunConfig& no_fault_cfg, uint32_t ant, int64_t layer,
                             uint64_t offset) {
  RunResult ref = run(no_fault_cfg);
  uint64_t own_steps = 0;
  for (const StepRecord& rec : ref.steps) {
    if (rec.ant_id != ant) continue;
    ++own_steps;
    if (rec.emitted && rec.pos_before == Position{0, layer}) return own_steps + offset;
  }
  FAIL("ant ", ant, " never claimed layer ", layer);
  return 0;
}

}  // namespace

TEST_CASE("clean descent costs three steps per verified layer") {
  SoloFsm ant(AntProgramId::AsyncFtFsm, {100, 100});
  ant.run_until([](const SoloFsm& s) { return s.completed.size() >= 5; }, 3000);
  // the completing step already heads east toward the marker cell
  REQUIRE(ant.pos == Position{1, 5});
  ant.step();  // emit the completion marker, back west
  CHECK(sense(ant.world, {1, 5}));
  CHECK(ant.pos == Position{0, 5});

  ant.path.clear();
  std::vector<Position> expected;
  expected.push_back({0, 4});
  for (int64_t m = 4; m >= 1; --m) {
    expected.push_back({1, m});      // east: check the marker
    expected.push_back({0, m});      // west: back to the ray
    expected.push_back({0, m - 1});  // south: next layer down
  }
  for (size_t i = 0; i < expected.size(); ++i) ant.step();
  CHECK(ant.path == expected);
  CHECK(ant.pos == Position{0, 0});
}

TEST_CASE("async-ft emissions: five per layer, four rays and a marker") {
  SoloFsm ant(AntProgramId::AsyncFtFsm, {100, 100});
  ant.run_until(
      [](const SoloFsm& s) {
        return s.completed.size() >= 4 && s.pos == Position{0, 0};
      },
      5000);
  CHECK(ant.world.pheromones.emit_count == 5 * 4);
}

TEST_CASE("sync-ft emissions: six per layer") {
  SoloFsm ant(AntProgramId::SyncFtFsm, {100, 100});
  ant.run_until(
      [](const SoloFsm& s) {
        return s.completed.size() >= 4 && s.pos == Position{0, 0};
      },
      5000);
  CHECK(ant.world.pheromones.emit_count == 6 * 4);
}

TEST_CASE("quadrant turns probe past stray marks") {
  // Rays of length 3, layers 1 and 2 complete: the walk around layer 3
  // meets the layer-2 marker head on and must not mistake it for the ray
  // end, with or without the layer-1 marker beneath it.
  auto set_up = [](bool layer1_marker) {
    SoloFsm ant(AntProgramId::AsyncFtFsm, {100, 100});
    for (Position p : {Position{1, 0}, Position{2, 0}, Position{3, 0},
                       Position{0, -1}, Position{0, -2}, Position{0, -3},
                       Position{-1, 0}, Position{-2, 0}, Position{-3, 0},
                       Position{0, 1}, Position{0, 2}, Position{1, 2}})
      emit(ant.world, p);
    if (layer1_marker) emit(ant.world, {1, 1});
    ant.pos = {0, 3};
    ant.state.control.phase = FsmPhase::NorthClimb;
    ant.step();  // claim layer 3, head east
    REQUIRE(ant.pos == Position{1, 3});
    ant.path.clear();
    return ant;
  };

  SUBCASE("the cell below the marker is marked too: one-step recovery") {
    SoloFsm ant = set_up(true);
    std::vector<Position> expected{
        {1, 2},   // zag arrival: the layer-2 marker
        {1, 1},   // probe south: the layer-1 marker answers
        {1, 2},   // back up, resume the zigzag
        {2, 2},  {2, 1}, {3, 1},
        {3, 0},   // the true ray end
        {3, -1},  // probe south: bare
        {2, -1},  // probe west: bare, so this is already the next quadrant
        {2, -2}, {1, -2}, {1, -3}, {0, -3},  // and on around
    };
    for (size_t i = 0; i < expected.size(); ++i) ant.step();
    CHECK(ant.path == expected);
  }

  SUBCASE("bare below, the north ray answers the second probe") {
    SoloFsm ant = set_up(false);
    std::vector<Position> expected{
        {1, 2},  // zag arrival: the layer-2 marker
        {1, 1},  // probe south: bare
        {0, 1},  // probe west: the north ray answers
        {0, 2}, {1, 2},  // two steps back onto the doubted cell
        {2, 2}, {2, 1}, {3, 1}, {3, 0},
    };
    for (size_t i = 0; i < expected.size(); ++i) ant.step();
    CHECK(ant.path == expected);
    CHECK(ant.state.control.phase == FsmPhase::Q1Zag);
  }
}

TEST_CASE("ray dominance holds for the fault-tolerant walk too") {
  SoloFsm ant(AntProgramId::AsyncFtFsm, {100, 100});
  for (int i = 0; i < 3000; ++i) {
    ant.step();
    const int64_t n = ray_length(ant.world, Direction::North);
    CHECK(n <= ray_length(ant.world, Direction::East));
    CHECK(n <= ray_length(ant.world, Direction::South));
    CHECK(n <= ray_length(ant.world, Direction::West));
  }
}

TEST_CASE("k=1 fault-free behaviour still finds every treasure up to distance 8") {
  for (int64_t d = 1; d <= 8; ++d) {
    for (Position treasure : layer_cells(d)) {
      RunConfig cfg;
      cfg.program = AntProgramId::AsyncFtFsm;
      cfg.k = 1;
      cfg.treasure = treasure;
      RunResult r = run_async(cfg);
      CHECK(r.metrics.found);
      CHECK(verify_layer_coverage(r));
      if (!r.metrics.found) return;
    }
  }
}

TEST_CASE("missing marker triggers a full re-exploration") {
  RunConfig cfg;
  cfg.program = AntProgramId::AsyncFtFsm;
  cfg.k = 2;
  cfg.treasure = {0, -6};

  // find who claims layer 3 in the fault-free run, kill it mid-exploration
  RunResult ref = run(cfg);
  REQUIRE(ref.metrics.layer_explorer_log.contains(3));
  const uint32_t victim = *ref.metrics.layer_explorer_log.at(3).begin();
  const uint64_t kill_at = kill_step_mid_layer(cfg, victim, 3, 5);

  cfg.faults.kills = {{victim, kill_at}};
  RunResult r = run(cfg);
  CHECK(r.metrics.found);
  CHECK(r.marked.contains(Position{1, 3}));  // marker placed by the verifier
  for (Position cell : layer_cells(3)) CHECK(r.visited.contains(cell));
  CHECK(verify_layer_coverage(r));
  // the re-exploration costs exactly one extra marker emission
  int markers_at_3 = 0;
  for (const StepRecord& rec : r.steps)
    if (rec.emitted && rec.pos_before == Position{1, 3}) ++markers_at_3;
  CHECK(markers_at_3 == 1);
}

TEST_CASE("survivor alone explores and verifies everything") {
  for (AntProgramId program : {AntProgramId::AsyncFtFsm, AntProgramId::SyncFtFsm}) {
    CAPTURE(program_name(program));
    for (int64_t d : {4, 6, 8}) {
      for (Position treasure : layer_cells(d)) {
        RunConfig cfg;
        cfg.program = program;
        cfg.synchronous = program == AntProgramId::SyncFtFsm;
        cfg.k = 3;
        cfg.treasure = treasure;
        if (cfg.synchronous) cfg.emission = EmissionMode::OnePerRound;
        cfg.faults.kills = {{1, 9}, {2, 23}};  // f = k-1
        RunResult r = run(cfg);
        CHECK(r.metrics.found);
        CHECK(verify_layer_coverage(r));
        if (!r.metrics.found) return;
      }
    }
  }
}

TEST_CASE("tie at the marker cell: the descender re-explores exactly when the mark is unseen") {
  // Layer-1 complete world with rays of length 2; ant A is one step from
  // marking layer 2, ant B checks that same cell in the same round.
  RunConfig cfg;
  cfg.program = AntProgramId::SyncFtFsm;
  cfg.synchronous = true;
  cfg.k = 2;
  cfg.treasure = {100, 100};

  auto craft_world = [] {
    WorldState w({100, 100});
    for (Position p : {Position{1, 0}, Position{1, 1}, Position{2, 0}, Position{2, 1},
                       Position{0, -1}, Position{0, -2}, Position{-1, 0}, Position{-2, 0},
                       Position{0, 1}, Position{0, 2}})
      emit(w, p);
    return w;
  };

  auto make_ft_ant = [&](uint32_t id, FsmPhase phase, Position pos) {
    Ant a = make_ant(id, cfg);
    auto& fs = std::get<FsmState>(a.state);
    fs.control.phase = phase;
    fs.control.veteran = true;
    a.pos = pos;
    a.departed = true;
    return a;
  };

  SUBCASE("same round: A emits, B senses the snapshot and heads into the layer") {
    WorldState w = craft_world();
    std::vector<Ant> ants;
    ants.push_back(make_ft_ant(1, FsmPhase::MarkEast, {1, 2}));
    ants.push_back(make_ft_ant(2, FsmPhase::DescCheck, {1, 2}));
    step_sync_round(w, ants);
    CHECK(sense(w, {1, 2}));  // A marked it
    CHECK(ants[0].pos == Position{0, 2});
    // B read the pre-emission snapshot and commits to redoing layer 2
    CHECK(std::get<FsmState>(ants[1].state).control.phase == FsmPhase::DescProbeW);
    for (int i = 0; i < 3; ++i) step_sync_round(w, ants);
    CHECK(ants[1].pos == Position{1, 2});
    CHECK(std::get<FsmState>(ants[1].state).control.phase == FsmPhase::Q1Zig);
  }

  SUBCASE("a round later: B sees the marker and skips the layer") {
    WorldState w = craft_world();
    std::vector<Ant> ants;
    ants.push_back(make_ft_ant(1, FsmPhase::MarkEast, {1, 2}));
    step_sync_round(w, ants);
    ants.push_back(make_ft_ant(2, FsmPhase::DescCheck, {1, 2}));
    step_sync_round(w, ants);
    CHECK(ants[1].pos == Position{0, 2});  // back west
    CHECK(std::get<FsmState>(ants[1].state).control.phase == FsmPhase::DescSouth);
  }
}
