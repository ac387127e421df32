#include "antgrid/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace antgrid {

std::string trace_line(const TraceEvent& e) {
  std::ostringstream os;
  os << "{\"step_index\":" << e.step_index << ",\"ant_id\":" << e.ant_id
     << ",\"action\":\"" << (e.action == TraceEvent::Kind::Emit ? "emit" : "move")
     << "\",\"position\":[" << e.position.x << "," << e.position.y << "]}";
  return os.str();
}

void write_trace(std::ostream& os, const std::vector<TraceEvent>& events) {
  for (const TraceEvent& e : events) os << trace_line(e) << '\n';
}

void write_trace_file(const std::string& path, const std::vector<TraceEvent>& events) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("antgrid: cannot open trace file " + path);
  write_trace(os, events);
}

std::vector<TraceEvent> parse_trace(std::istream& is) {
  std::vector<TraceEvent> events;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    TraceEvent e;
    e.step_index = j.at("step_index").get<uint64_t>();
    e.ant_id = j.at("ant_id").get<uint32_t>();
    const std::string action = j.at("action").get<std::string>();
    if (action == "emit")
      e.action = TraceEvent::Kind::Emit;
    else if (action == "move")
      e.action = TraceEvent::Kind::Move;
    else
      throw std::runtime_error("antgrid: unknown trace action '" + action + "'");
    e.position = {j.at("position").at(0).get<int64_t>(), j.at("position").at(1).get<int64_t>()};
    events.push_back(e);
  }
  return events;
}

std::vector<TraceEvent> read_trace_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("antgrid: cannot open trace file " + path);
  return parse_trace(is);
}

}  // namespace antgrid
