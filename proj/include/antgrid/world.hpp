#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace antgrid {

// Grid coordinates. The grid is conceptually infinite; coordinates are
// guarded at |c| <= 2^31 and anything beyond fails loudly rather than
// wrapping silently.
struct Position {
  int64_t x = 0;
  int64_t y = 0;

  bool operator==(const Position&) const = default;
};

inline constexpr int64_t kCoordinateGuard = int64_t{1} << 31;

struct PositionHash {
  size_t operator()(const Position& p) const {
    uint64_t h = static_cast<uint64_t>(p.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<uint64_t>(p.y) + 0xbf58476d1ce4e5b9ULL + (h << 6) + (h >> 2);
    return static_cast<size_t>(h);
  }
};

using PositionSet = std::unordered_set<Position, PositionHash>;

enum class Direction : uint8_t { North, East, South, West, Hold };

inline Position offset(Direction d) {
  switch (d) {
    case Direction::North: return {0, 1};
    case Direction::East: return {1, 0};
    case Direction::South: return {0, -1};
    case Direction::West: return {-1, 0};
    case Direction::Hold: return {0, 0};
  }
  return {0, 0};
}

inline Position moved(Position p, Direction d) {
  Position o = offset(d);
  Position q{p.x + o.x, p.y + o.y};
  if (std::abs(q.x) > kCoordinateGuard || std::abs(q.y) > kCoordinateGuard)
    throw std::overflow_error("antgrid: coordinate exceeds 2^31 guard");
  return q;
}

inline int64_t manhattan_distance(Position p) {
  return std::abs(p.x) + std::abs(p.y);
}

// All cells at Manhattan distance l from the origin, clockwise from (0, l).
// |layer_cells(0)| == 1, |layer_cells(l)| == 4l otherwise.
std::vector<Position> layer_cells(int64_t l);

// The single pheromone type. Cells are append-only; emit_count tracks every
// performed emission, including ones landing on an already-marked cell.
struct PheromoneMap {
  PositionSet cells;
  uint64_t emit_count = 0;
};

struct WorldState {
  PheromoneMap pheromones;
  Position treasure;
  Position nest{0, 0};
  PositionSet visited;
  bool found = false;
  // Optional emission cap: once emit_count reaches it, further emissions are
  // dropped entirely (no mark, no count). Used by the lower-bound machinery.
  std::optional<uint64_t> budget;

  explicit WorldState(Position treasure_pos,
                      std::optional<uint64_t> emission_budget = std::nullopt)
      : treasure(treasure_pos), budget(emission_budget) {
    if (treasure == nest)
      throw std::invalid_argument("antgrid: treasure must not sit on the nest");
    visited.insert(nest);
  }
};

inline bool sense(const WorldState& w, Position p) {
  return w.pheromones.cells.contains(p);
}

// Returns false when the emission was dropped by an exhausted budget.
inline bool emit(WorldState& w, Position p) {
  if (w.budget && w.pheromones.emit_count >= *w.budget) return false;
  w.pheromones.emit_count += 1;
  w.pheromones.cells.insert(p);
  return true;
}

inline void visit(WorldState& w, Position p) {
  w.visited.insert(p);
  if (p == w.treasure) w.found = true;
}

inline bool budget_exhausted(const WorldState& w) {
  return w.budget && w.pheromones.emit_count >= *w.budget;
}

// Length of the contiguous marked run from (but excluding) the nest along
// one axis direction.
int64_t ray_length(const WorldState& w, Direction d);

}  // namespace antgrid
