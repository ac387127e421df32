#include "doctest.h"

#include <algorithm>

#include "antgrid/rng.hpp"
#include "antgrid/world.hpp"

using namespace antgrid;

TEST_CASE("manhattan distance") {
  CHECK(manhattan_distance({0, 0}) == 0);
  CHECK(manhattan_distance({2, -3}) == 5);
  CHECK(manhattan_distance({0, 4}) == 4);
}

TEST_CASE("layer cells") {
  auto l0 = layer_cells(0);
  REQUIRE(l0.size() == 1);
  CHECK(l0[0] == Position{0, 0});

  auto l1 = layer_cells(1);
  REQUIRE(l1.size() == 4);
  for (Position p : {Position{1, 0}, Position{0, 1}, Position{-1, 0}, Position{0, -1}})
    CHECK(std::find(l1.begin(), l1.end(), p) != l1.end());

  CHECK(layer_cells(7).size() == 28);
}

TEST_CASE("layers partition the disk") {
  PositionSet seen;
  for (int64_t l = 0; l <= 12; ++l) {
    for (Position p : layer_cells(l)) {
      CHECK(manhattan_distance(p) == l);
      CHECK(seen.insert(p).second);  // no cell appears in two layers
    }
  }
  // every cell within distance 12 is in exactly one layer
  for (int64_t x = -12; x <= 12; ++x)
    for (int64_t y = -12; y <= 12; ++y)
      if (std::abs(x) + std::abs(y) <= 12) CHECK(seen.contains(Position{x, y}));
}

TEST_CASE("sense and emit") {
  WorldState w({3, 0});
  CHECK_FALSE(sense(w, {3, 0}));
  emit(w, {0, 1});
  CHECK(sense(w, {0, 1}));

  SUBCASE("double emission keeps one cell but counts twice") {
    emit(w, {1, 0});
    emit(w, {1, 0});
    CHECK(w.pheromones.cells.size() == 2);
    CHECK(w.pheromones.emit_count == 3);
  }

  SUBCASE("the primitive allows emitting on the nest") {
    // programs never do it; the world itself does not care
    emit(w, {0, 0});
    CHECK(sense(w, {0, 0}));
  }

  SUBCASE("emit then sense round-trips everywhere") {
    Xoshiro256 rng(7);
    for (int i = 0; i < 200; ++i) {
      Position p{static_cast<int64_t>(rng.next_below(2001)) - 1000,
                 static_cast<int64_t>(rng.next_below(2001)) - 1000};
      emit(w, p);
      CHECK(sense(w, p));
    }
  }
}

TEST_CASE("figure-style ray prefix") {
  // rays of length 2 on all four axes
  WorldState w({50, 50});
  for (Position p : {Position{0, 1}, Position{0, 2}, Position{1, 0}, Position{2, 0},
                     Position{0, -1}, Position{0, -2}, Position{-1, 0}, Position{-2, 0}})
    emit(w, p);
  CHECK(sense(w, {0, 2}));
  CHECK_FALSE(sense(w, {1, 1}));
  CHECK(ray_length(w, Direction::North) == 2);
  CHECK(ray_length(w, Direction::East) == 2);
}

TEST_CASE("visit and found") {
  WorldState w({2, 1});
  visit(w, {1, 2});
  CHECK_FALSE(w.found);
  visit(w, {0, 0});
  CHECK_FALSE(w.found);  // treasure never sits on the nest
  visit(w, {2, 1});
  CHECK(w.found);
  visit(w, {1, 1});
  CHECK(w.found);  // found is monotone
}

TEST_CASE("treasure on nest is rejected") {
  CHECK_THROWS_AS(WorldState({0, 0}), std::invalid_argument);
}

TEST_CASE("pheromone cells grow monotonically") {
  WorldState w({9, 9});
  Xoshiro256 rng(11);
  size_t prev = 0;
  for (int i = 0; i < 500; ++i) {
    Position p{static_cast<int64_t>(rng.next_below(41)) - 20,
               static_cast<int64_t>(rng.next_below(41)) - 20};
    if (rng.next_below(2) == 0) emit(w, p);
    visit(w, p);
    CHECK(w.pheromones.cells.size() >= prev);
    prev = w.pheromones.cells.size();
    CHECK(w.pheromones.emit_count >= w.pheromones.cells.size());
  }
}

TEST_CASE("coordinate guard fails loudly") {
  Position p{kCoordinateGuard, 0};
  CHECK_THROWS_AS(moved(p, Direction::East), std::overflow_error);
}

TEST_CASE("emission budget drops once exhausted") {
  WorldState w({5, 5}, uint64_t{2});
  CHECK(emit(w, {1, 0}));
  CHECK(emit(w, {2, 0}));
  CHECK_FALSE(emit(w, {3, 0}));
  CHECK(w.pheromones.emit_count == 2);
  CHECK_FALSE(sense(w, {3, 0}));
  CHECK(budget_exhausted(w));
}
