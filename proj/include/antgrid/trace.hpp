#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "antgrid/world.hpp"

namespace antgrid {

// One world mutation, as serialized to the JSON Lines trace file:
//   {"step_index":N,"ant_id":N,"action":"emit"|"move","position":[x,y]}
// Emissions that were dropped by a budget mutate nothing and are not traced.
struct TraceEvent {
  enum class Kind : uint8_t { Emit, Move };
  uint64_t step_index = 0;
  uint32_t ant_id = 0;
  Kind action = Kind::Move;
  Position position;

  bool operator==(const TraceEvent&) const = default;
};

std::string trace_line(const TraceEvent& e);
void write_trace(std::ostream& os, const std::vector<TraceEvent>& events);
void write_trace_file(const std::string& path, const std::vector<TraceEvent>& events);
std::vector<TraceEvent> parse_trace(std::istream& is);
std::vector<TraceEvent> read_trace_file(const std::string& path);

// Per-step record kept in memory for the analyzers (not part of the wire
// format): the ant's control fingerprint and cell at sense time, what it
// sensed, and where it ended up.
struct StepRecord {
  uint64_t step_index = 0;
  uint32_t ant_id = 0;
  uint64_t fingerprint = 0;
  Position pos_before;
  Position pos_after;
  bool sensed = false;
  bool emitted = false;
  bool completed_circuit = false;  // this step ended a full layer walk
};

}  // namespace antgrid
