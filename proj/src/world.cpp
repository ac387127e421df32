#include "antgrid/world.hpp"

namespace antgrid {

std::vector<Position> layer_cells(int64_t l) {
  if (l < 0) throw std::invalid_argument("antgrid: negative layer");
  if (l == 0) return {Position{0, 0}};
  std::vector<Position> cells;
  cells.reserve(static_cast<size_t>(4 * l));
  for (int64_t i = 0; i < l; ++i) cells.push_back({i, l - i});        // NE edge
  for (int64_t i = 0; i < l; ++i) cells.push_back({l - i, -i});       // SE edge
  for (int64_t i = 0; i < l; ++i) cells.push_back({-i, -(l - i)});    // SW edge
  for (int64_t i = 0; i < l; ++i) cells.push_back({-(l - i), i});     // NW edge
  return cells;
}

int64_t ray_length(const WorldState& w, Direction d) {
  int64_t len = 0;
  Position p = w.nest;
  for (;;) {
    p = moved(p, d);
    if (!sense(w, p)) break;
    ++len;
  }
  return len;
}

}  // namespace antgrid
