#include "antgrid/experiment.hpp"

#include <fstream>
#include <iostream>

#include "antgrid/trace.hpp"

namespace antgrid {

using nlohmann::json;
using nlohmann::ordered_json;

Position place_treasure(int64_t distance, uint64_t seed) {
  if (distance < 1) throw ConfigError("distance", "distance must be at least 1");
  auto cells = layer_cells(distance);
  SplitMix64 sm(seed * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(distance));
  return cells[sm.next() % cells.size()];
}

namespace {

template <typename T, typename F>
std::vector<T> axis(const json& doc, const char* key, std::vector<T> fallback, F parse_one) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  const json& v = doc[key];
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(parse_one(e));
  } else {
    out.push_back(parse_one(v));
  }
  if (out.empty()) throw ConfigError(key, "axis must not be empty");
  return out;
}

Position parse_position(const json& v) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigError("treasure", "expected a [x, y] pair");
  return {v[0].get<int64_t>(), v[1].get<int64_t>()};
}

FaultPlan parse_fault_plan(const json& v) {
  FaultPlan plan;
  if (v.is_null()) return plan;
  if (v.contains("kills")) {
    for (const auto& e : v["kills"]) {
      if (!e.is_array() || e.size() != 2)
        throw ConfigError("faults", "expected [antId, stepIndex] pairs");
      plan.kills.emplace_back(e[0].get<uint32_t>(), e[1].get<uint64_t>());
    }
  }
  if (v.contains("random")) {
    plan.random = true;
    plan.random_count = v["random"].get<uint32_t>();
    plan.random_seed = v.value("seed", uint64_t{0});
  }
  return plan;
}

json fault_plan_to_json(const FaultPlan& plan) {
  if (plan.empty()) return nullptr;
  json v = json::object();
  if (!plan.kills.empty()) {
    json kills = json::array();
    for (const auto& [a, s] : plan.kills) kills.push_back(json::array({a, s}));
    v["kills"] = kills;
  }
  if (plan.random) {
    v["random"] = plan.random_count;
    v["seed"] = plan.random_seed;
  }
  return v;
}

ScheduleKind parse_scheduler_kind(const std::string& s) {
  if (s == "round-robin") return ScheduleKind::RoundRobin;
  if (s == "random") return ScheduleKind::SeededRandom;
  if (s == "script") return ScheduleKind::Scripted;
  throw ConfigError("scheduler", "unknown scheduler '" + s + "'");
}

const char* scheduler_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::RoundRobin: return "round-robin";
    case ScheduleKind::SeededRandom: return "random";
    case ScheduleKind::Scripted: return "script";
  }
  return "?";
}

EmissionMode parse_emission(const std::string& s) {
  if (s == "one-per-round") return EmissionMode::OnePerRound;
  if (s == "on-first-schedule") return EmissionMode::OnFirstSchedule;
  throw ConfigError("emission", "unknown emission scheme '" + s + "'");
}

bool resolve_mode(const std::string& mode, AntProgramId program) {
  if (mode == "sync") return true;
  if (mode == "async") return false;
  if (mode == "auto") return program_is_synchronous(program);
  throw ConfigError("mode", "unknown mode '" + mode + "'");
}

}  // namespace

ExperimentSpec parse_experiment(const json& doc) {
  ExperimentSpec spec;
  spec.programs = axis<AntProgramId>(doc, "program", spec.programs, [](const json& v) {
    return parse_program(v.get<std::string>());
  });
  spec.modes = axis<std::string>(doc, "mode", spec.modes,
                                 [](const json& v) { return v.get<std::string>(); });
  spec.ks = axis<uint32_t>(doc, "k", spec.ks, [](const json& v) { return v.get<uint32_t>(); });
  if (doc.contains("treasure") && !doc["treasure"].is_null()) {
    const json& t = doc["treasure"];
    if (t.is_array() && t.size() == 2 && t[0].is_number())
      spec.treasures.push_back(parse_position(t));
    else
      for (const auto& e : t) spec.treasures.push_back(parse_position(e));
  }
  spec.distances = axis<int64_t>(doc, "distance", spec.distances,
                                 [](const json& v) { return v.get<int64_t>(); });
  if (!spec.treasures.empty() && !spec.distances.empty())
    throw ConfigError("treasure", "give either explicit treasures or distances, not both");
  if (spec.treasures.empty() && spec.distances.empty())
    throw ConfigError("treasure", "a treasure position or a distance is required");
  spec.seeds = axis<uint64_t>(doc, "seed", spec.seeds,
                              [](const json& v) { return v.get<uint64_t>(); });
  spec.fault_counts = axis<uint32_t>(doc, "f", spec.fault_counts,
                                     [](const json& v) { return v.get<uint32_t>(); });
  if (doc.contains("scheduler") && !doc["scheduler"].is_null()) {
    const json& s = doc["scheduler"];
    if (s.is_object()) {
      spec.scheduler = ScheduleKind::Scripted;
      for (const auto& e : s.at("script")) spec.script.push_back(e.get<uint32_t>());
    } else {
      spec.scheduler = parse_scheduler_kind(s.get<std::string>());
    }
  }
  if (doc.contains("faults") && !doc["faults"].is_null())
    spec.explicit_faults = parse_fault_plan(doc["faults"]);
  if (doc.contains("budget") && !doc["budget"].is_null())
    spec.budget = doc["budget"].get<uint64_t>();
  spec.max_steps = doc.value("max_steps", uint64_t{0});
  if (doc.contains("emission") && !doc["emission"].is_null())
    spec.emission = parse_emission(doc["emission"].get<std::string>());
  spec.repetitions = doc.value("repetitions", uint32_t{1});
  if (spec.repetitions < 1) throw ConfigError("repetitions", "must be at least 1");
  spec.tm_mutable_id = doc.value("tm_mutable_id", false);
  spec.trace_path = doc.value("trace", std::string{});
  spec.report_path = doc.value("report", std::string{});
  return spec;
}

RunConfig config_from_json(const json& doc) {
  RunConfig cfg;
  cfg.program = parse_program(doc.at("program").get<std::string>());
  cfg.synchronous = doc.at("mode").get<std::string>() == "sync";
  cfg.k = doc.at("k").get<uint32_t>();
  cfg.treasure = parse_position(doc.at("treasure"));
  const json& s = doc.at("scheduler");
  cfg.strategy.kind = parse_scheduler_kind(s.at("kind").get<std::string>());
  cfg.strategy.seed = s.value("seed", uint64_t{0});
  if (s.contains("script"))
    for (const auto& e : s["script"]) cfg.strategy.script.push_back(e.get<uint32_t>());
  cfg.emission = parse_emission(doc.at("emission").get<std::string>());
  if (doc.contains("faults") && !doc["faults"].is_null())
    cfg.faults = parse_fault_plan(doc["faults"]);
  if (doc.contains("budget") && !doc["budget"].is_null())
    cfg.pheromone_budget = doc["budget"].get<uint64_t>();
  cfg.max_steps = doc.value("max_steps", uint64_t{0});
  cfg.tm_mutable_id = doc.value("tm_mutable_id", false);
  return cfg;
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json doc;
  doc["program"] = program_name(cfg.program);
  doc["mode"] = cfg.synchronous ? "sync" : "async";
  doc["k"] = cfg.k;
  doc["treasure"] = json::array({cfg.treasure.x, cfg.treasure.y});
  ordered_json sched;
  sched["kind"] = scheduler_name(cfg.strategy.kind);
  sched["seed"] = cfg.strategy.seed;
  if (!cfg.strategy.script.empty()) sched["script"] = cfg.strategy.script;
  doc["scheduler"] = sched;
  doc["emission"] =
      cfg.emission == EmissionMode::OnePerRound ? "one-per-round" : "on-first-schedule";
  doc["faults"] = fault_plan_to_json(cfg.faults);
  doc["budget"] = cfg.pheromone_budget ? json(*cfg.pheromone_budget) : json(nullptr);
  doc["max_steps"] = cfg.max_steps;
  doc["tm_mutable_id"] = cfg.tm_mutable_id;
  return doc;
}

ordered_json metrics_to_json(const RunMetrics& m) {
  ordered_json doc;
  doc["rounds"] = m.rounds;
  doc["steps_per_ant"] = m.steps_per_ant;
  doc["pheromone_emissions"] = m.pheromone_emissions;
  doc["distinct_marked_cells"] = m.distinct_marked_cells;
  doc["found"] = m.found;
  doc["treasure_distance"] = m.treasure_distance;
  doc["visited_count"] = m.visited_count;
  ordered_json log = ordered_json::object();
  for (const auto& [layer, ants] : m.layer_explorer_log)
    log[std::to_string(layer)] = std::vector<uint32_t>(ants.begin(), ants.end());
  doc["layer_explorer_log"] = log;
  return doc;
}

ordered_json row_to_json(const ReportRow& row) {
  ordered_json doc;
  doc["cell"] = row.cell;
  doc["config"] = config_to_json(row.config);
  doc["metrics"] = metrics_to_json(row.metrics);
  ordered_json verdicts;
  verdicts["coverage"] = row.coverage_ok;
  verdicts["no_collision"] = row.collision_ok;
  verdicts["pheromone_audit"] = row.audit_ok;
  doc["verdicts"] = verdicts;
  doc["ants_departed"] = row.ants_departed;
  doc["error"] = row.error;
  return doc;
}

ReportRow row_from_json(const json& doc) {
  ReportRow row;
  row.cell = doc.at("cell").get<uint64_t>();
  row.config = config_from_json(doc.at("config"));
  const json& m = doc.at("metrics");
  row.metrics.rounds = m.at("rounds").get<uint64_t>();
  row.metrics.steps_per_ant = m.at("steps_per_ant").get<std::vector<uint64_t>>();
  row.metrics.pheromone_emissions = m.at("pheromone_emissions").get<uint64_t>();
  row.metrics.distinct_marked_cells = m.at("distinct_marked_cells").get<uint64_t>();
  row.metrics.found = m.at("found").get<bool>();
  row.metrics.treasure_distance = m.at("treasure_distance").get<int64_t>();
  row.metrics.visited_count = m.at("visited_count").get<uint64_t>();
  for (const auto& [key, ants] : m.at("layer_explorer_log").items()) {
    auto& entry = row.metrics.layer_explorer_log[std::stoll(key)];
    for (const auto& a : ants) entry.insert(a.get<uint32_t>());
  }
  row.coverage_ok = doc.at("verdicts").at("coverage").get<bool>();
  row.collision_ok = doc.at("verdicts").at("no_collision").get<bool>();
  row.audit_ok = doc.at("verdicts").at("pheromone_audit").get<bool>();
  row.ants_departed = doc.value("ants_departed", uint32_t{0});
  row.error = doc.value("error", std::string{});
  return row;
}

std::vector<RunConfig> expand_cells(const ExperimentSpec& spec) {
  std::vector<RunConfig> cells;
  for (AntProgramId program : spec.programs)
    for (const std::string& mode : spec.modes)
      for (uint32_t k : spec.ks)
        for (uint32_t f : spec.fault_counts)
          for (uint64_t seed : spec.seeds)
            for (uint32_t rep = 0; rep < spec.repetitions; ++rep) {
              const uint64_t eff_seed = seed + rep;
              std::vector<Position> targets = spec.treasures;
              if (targets.empty())
                for (int64_t d : spec.distances)
                  targets.push_back(place_treasure(d, eff_seed));
              for (Position treasure : targets) {
                RunConfig cfg;
                cfg.program = program;
                cfg.synchronous = resolve_mode(mode, program);
                cfg.k = k;
                cfg.treasure = treasure;
                cfg.strategy.kind = spec.scheduler;
                cfg.strategy.script = spec.script;
                cfg.strategy.seed = eff_seed;
                cfg.emission = spec.emission.value_or(cfg.synchronous
                                                          ? EmissionMode::OnePerRound
                                                          : EmissionMode::OnFirstSchedule);
                if (spec.explicit_faults) {
                  cfg.faults = *spec.explicit_faults;
                } else if (f > 0) {
                  cfg.faults.random = true;
                  cfg.faults.random_count = f;
                  cfg.faults.random_seed = eff_seed;
                }
                cfg.pheromone_budget = spec.budget;
                cfg.max_steps = spec.max_steps;
                cfg.tm_mutable_id = spec.tm_mutable_id;
                cells.push_back(cfg);
              }
            }
  return cells;
}

ReportRow run_cell(const RunConfig& cfg, uint64_t cell_index, const std::string& trace_path) {
  ReportRow row;
  row.cell = cell_index;
  row.config = cfg;
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    row.error = std::string("ConfigInvalid(") + e.field + "): " + e.what();
    return row;
  }
  if (cfg.distance() <= cfg.k)
    std::cerr << "antgrid: warning: cell " << cell_index << " has D <= k (D="
              << cfg.distance() << ", k=" << cfg.k << ")\n";
  RunResult result = run(cfg);
  row.metrics = result.metrics;
  row.coverage_ok = verify_layer_coverage(result);
  row.collision_ok = verify_no_collision(result.metrics);
  row.audit_ok = pheromone_audit(result.metrics, cfg.program, cfg.distance(), cfg.k,
                                 result.ants_departed);
  row.ants_departed = result.ants_departed;
  if (result.error != RunError::None) row.error = run_error_name(result.error);
  if (!trace_path.empty()) write_trace_file(trace_path, result.trace);
  return row;
}

std::vector<ReportRow> run_experiment(const ExperimentSpec& spec) {
  std::vector<RunConfig> cells = expand_cells(spec);
  std::vector<ReportRow> rows;
  rows.reserve(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    std::string trace;
    if (!spec.trace_path.empty())
      trace = cells.size() == 1 ? spec.trace_path
                                : spec.trace_path + ".cell" + std::to_string(i);
    rows.push_back(run_cell(cells[i], i, trace));
  }
  if (!spec.report_path.empty()) write_report_file(spec.report_path, rows);
  return rows;
}

void write_report_file(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("antgrid: cannot open report file " + path);
  for (const ReportRow& row : rows) os << row_to_json(row).dump() << '\n';
}

std::vector<ReportRow> read_report_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("antgrid: cannot open report file " + path);
  std::vector<ReportRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(row_from_json(json::parse(line)));
  }
  return rows;
}

Summary summarize_rows(const std::vector<ReportRow>& rows) {
  Summary summary;
  std::map<std::pair<std::string, bool>, std::vector<const ReportRow*>> groups;
  for (const ReportRow& row : rows)
    groups[{program_name(row.config.program), row.config.synchronous}].push_back(&row);

  bool pass = true;
  for (const auto& [key, group] : groups) {
    ProgramSummary ps;
    ps.program = key.first;
    ps.synchronous = key.second;
    ps.rows = group.size();
    std::vector<FitSample> samples;
    uint32_t max_f = 0;
    for (const ReportRow* row : group) {
      if (!row->error.empty()) {
        pass = false;
        continue;
      }
      if (row->metrics.found) ++ps.found;
      ps.all_coverage = ps.all_coverage && row->coverage_ok;
      ps.all_collision = ps.all_collision && row->collision_ok;
      ps.all_audit = ps.all_audit && row->audit_ok;
      uint32_t f = row->config.faults.random ? row->config.faults.random_count
                                             : static_cast<uint32_t>(row->config.faults.kills.size());
      max_f = std::max(max_f, f);
      samples.push_back({row->metrics.treasure_distance, row->config.k, f,
                         row->metrics.rounds});
    }
    const bool ft = ps.program == "async-ft-fsm" || ps.program == "sync-ft-fsm";
    const std::string model = (ft && max_f > 0) ? kModelFault : kModelBase;
    // Underdetermined reports (too few rows, degenerate axes) propagate.
    ps.fit = fit_complexity(samples, model);
    ps.fit_ok = ps.fit.max_relative_residual <= kFitResidualGate;
    for (const FitSample& s : samples) {
      const double bound = evaluate_model(ps.fit, s.distance, s.ants, s.faults);
      if (static_cast<double>(s.rounds) > bound * (1.0 + 1e-9)) ps.fit_ok = false;
    }
    pass = pass && ps.found == ps.rows && ps.all_coverage && ps.all_collision &&
           ps.all_audit && ps.fit_ok;
    summary.programs.push_back(std::move(ps));
  }
  summary.pass = pass && !rows.empty();
  return summary;
}

ordered_json summary_to_json(const Summary& s) {
  ordered_json doc;
  ordered_json programs = ordered_json::array();
  for (const ProgramSummary& ps : s.programs) {
    ordered_json p;
    p["program"] = ps.program;
    p["mode"] = ps.synchronous ? "sync" : "async";
    p["rows"] = ps.rows;
    p["found"] = ps.found;
    p["coverage"] = ps.all_coverage;
    p["no_collision"] = ps.all_collision;
    p["pheromone_audit"] = ps.all_audit;
    ordered_json fit;
    fit["model"] = ps.fit.model;
    fit["coefficients"] = ps.fit.coefficients;
    fit["max_relative_residual"] = ps.fit.max_relative_residual;
    p["fit"] = fit;
    p["fit_ok"] = ps.fit_ok;
    programs.push_back(p);
  }
  doc["programs"] = programs;
  doc["pass"] = s.pass;
  return doc;
}

}  // namespace antgrid
