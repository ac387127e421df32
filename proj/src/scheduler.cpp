#include "antgrid/scheduler.hpp"

#include <algorithm>
#include <unordered_map>

namespace antgrid {

const char* run_error_name(RunError e) {
  switch (e) {
    case RunError::None: return "none";
    case RunError::BudgetLoopDetected: return "BudgetLoopDetected";
    case RunError::StepCapExceeded: return "StepCapExceeded";
    case RunError::ScriptExhausted: return "ScriptExhausted";
  }
  return "?";
}

std::map<uint32_t, uint64_t> resolve_fault_plan(const FaultPlan& plan, uint32_t k,
                                                int64_t distance) {
  std::map<uint32_t, uint64_t> kills;
  for (const auto& [ant, step] : plan.kills) {
    auto it = kills.find(ant);
    if (it == kills.end())
      kills.emplace(ant, step);
    else
      it->second = std::min(it->second, step);  // an ant fails once, at the earliest point
  }
  if (plan.random) {
    Xoshiro256 rng(plan.random_seed);
    const uint64_t d = static_cast<uint64_t>(distance);
    // Kill steps are drawn at the per-ant work scale so that planned faults
    // actually strike before the search would naturally end.
    const uint64_t horizon = d + d * d / (k ? k : 1) + 64;
    while (kills.size() < plan.random_count) {
      uint32_t ant = static_cast<uint32_t>(rng.next_below(k)) + 1;
      if (kills.contains(ant)) continue;
      kills.emplace(ant, rng.next_below(horizon));
    }
  }
  return kills;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("k", "ant count must be at least 1");
  if (cfg.treasure == Position{0, 0})
    throw ConfigError("treasure", "TreasureAtNest: treasure must not sit on the nest");
  if (std::abs(cfg.treasure.x) > kCoordinateGuard || std::abs(cfg.treasure.y) > kCoordinateGuard)
    throw ConfigError("treasure", "coordinate exceeds the 2^31 guard");
  const bool sync_program = program_is_synchronous(cfg.program);
  const bool tm = cfg.program == AntProgramId::Tm;
  if (cfg.synchronous && !sync_program && !tm)
    throw ConfigError("program", std::string(program_name(cfg.program)) +
                                     " cannot run under the synchronous model");
  if (!cfg.synchronous && sync_program)
    throw ConfigError("program", std::string(program_name(cfg.program)) +
                                     " cannot run under the asynchronous model");
  if (!cfg.synchronous && cfg.emission == EmissionMode::OnePerRound)
    throw ConfigError("emission", "one-per-round release requires the synchronous model");
  if (cfg.strategy.kind == ScheduleKind::Scripted) {
    for (uint32_t id : cfg.strategy.script)
      if (id < 1 || id > cfg.k)
        throw ConfigError("strategy.script", "scripted ant id out of range");
  }
  for (const auto& [ant, step] : cfg.faults.kills) {
    (void)step;
    if (ant < 1 || ant > cfg.k) throw ConfigError("faults", "kill refers to an unknown ant id");
  }
  if (cfg.faults.random && cfg.faults.random_count >= cfg.k)
    throw ConfigError("faults", "AllDead: a fault plan must leave at least one ant alive (f < k)");
  auto kills = resolve_fault_plan(cfg.faults, cfg.k, cfg.distance());
  if (kills.size() >= cfg.k)
    throw ConfigError("faults", "AllDead: a fault plan must leave at least one ant alive (f < k)");
}

Ant make_ant(uint32_t id, const RunConfig& cfg) {
  Ant a;
  a.id = id;
  if (cfg.program == AntProgramId::Tm)
    a.state = initial_tm_state(cfg.tm_mutable_id);
  else
    a.state = initial_fsm_state(cfg.program);
  return a;
}

uint64_t state_fingerprint(const Ant& a) {
  if (const auto* fs = std::get_if<FsmState>(&a.state)) return FsmControlHash{}(fs->control);
  const auto& tm = std::get<TmState>(a.state);
  uint64_t h = 0x9e3779b97f4a7c15ULL * (static_cast<uint64_t>(tm.phase) + 1);
  auto mix = [&h](uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(static_cast<uint64_t>(tm.leg));
  mix(tm.id);
  mix(tm.total);
  mix(tm.current_layer);
  mix(tm.counter);
  mix(tm.tally);
  mix(tm.started ? 1 : 0);
  return h;
}

namespace {

struct Decision {
  Action action;
  std::variant<FsmState, TmState> next;
  bool completed_circuit = false;
};

Decision decide(const Ant& a, Observation o) {
  Decision d;
  if (const auto* fs = std::get_if<FsmState>(&a.state)) {
    auto [action, next] = step_fsm(*fs, o);
    d.action = action;
    d.completed_circuit = explore_completed(fs->control, next.control);
    d.next = next;
  } else {
    const auto& tm = std::get<TmState>(a.state);
    auto [action, next] = step_tm(tm, o);
    d.action = action;
    d.completed_circuit =
        tm.phase == TmPhase::ExploreLayer && next.phase == TmPhase::DescendVerify;
    d.next = next;
  }
  return d;
}

StepRecord apply(WorldState& w, Ant& a, const Decision& d, bool sensed) {
  StepRecord rec;
  rec.ant_id = a.id;
  rec.fingerprint = state_fingerprint(a);
  rec.pos_before = a.pos;
  rec.sensed = sensed;
  rec.completed_circuit = d.completed_circuit;
  if (d.action.emit_pheromone) rec.emitted = emit(w, a.pos);
  a.state = d.next;
  a.pos = moved(a.pos, d.action.move);
  visit(w, a.pos);
  rec.pos_after = a.pos;
  a.steps_taken += 1;
  a.departed = true;
  return rec;
}

void note_step(RunResult& out, const StepRecord& rec) {
  if (rec.emitted) {
    if (rec.pos_before.x == 0 && rec.pos_before.y >= 1)
      out.metrics.layer_explorer_log[rec.pos_before.y].insert(rec.ant_id);
    out.trace.push_back({rec.step_index, rec.ant_id, TraceEvent::Kind::Emit, rec.pos_before});
  }
  if (rec.completed_circuit) out.layers_completed.insert(rec.pos_before.y);
  out.trace.push_back({rec.step_index, rec.ant_id, TraceEvent::Kind::Move, rec.pos_after});
  out.steps.push_back(rec);
}

// Once the budget is spent, watches for a control-state revisit with no
// pheromone sensed in between. Such a pair pins a path that repeats forever,
// translated by a fixed displacement, unless a mark or the treasure lies on
// one of its translates.
class BudgetLoopScanner {
 public:
  bool doomed(const StepRecord& rec, const WorldState& w,
              const std::vector<StepRecord>& steps) {
    if (!budget_exhausted(w)) return false;
    if (rec.sensed) {
      seen_.clear();
      return false;
    }
    auto [it, fresh] = seen_.try_emplace(rec.fingerprint, rec.step_index);
    if (fresh) return false;
    const uint64_t t1 = it->second;
    const Position p1 = steps[t1].pos_before;
    const Position d{rec.pos_before.x - p1.x, rec.pos_before.y - p1.y};
    for (uint64_t t = t1; t < rec.step_index; ++t) {
      const Position c = steps[t].pos_before;
      if (lattice_hits(c, d, w.treasure)) return false;  // the loop will find it
      for (const Position& m : w.pheromones.cells)
        if (lattice_hits(c, d, m)) return false;  // a mark will break the loop
    }
    if (lattice_hits(rec.pos_before, d, w.treasure)) return false;
    return true;
  }

 private:
  std::unordered_map<uint64_t, uint64_t> seen_;
};

void finalize(RunResult& r, const WorldState& w, const std::vector<Ant>& ants,
              const RoundClock& clock, const RunConfig& cfg) {
  r.metrics.rounds = clock.rounds_completed();
  r.metrics.steps_per_ant.clear();
  for (const Ant& a : ants) r.metrics.steps_per_ant.push_back(a.steps_taken);
  r.metrics.pheromone_emissions = w.pheromones.emit_count;
  r.metrics.distinct_marked_cells = w.pheromones.cells.size();
  r.metrics.found = w.found;
  r.metrics.treasure_distance = cfg.distance();
  r.metrics.visited_count = w.visited.size();
  r.marked = w.pheromones.cells;
  r.visited = w.visited;
  r.budget_exhausted = budget_exhausted(w);
  r.ants_departed = 0;
  for (const Ant& a : ants)
    if (a.departed) ++r.ants_departed;
}

}  // namespace

StepRecord step_ant(WorldState& w, Ant& a) {
  Observation o{sense(w, a.pos)};
  Decision d = decide(a, o);
  return apply(w, a, d, o.pheromone_here);
}

std::vector<StepRecord> step_sync_round(WorldState& w, std::vector<Ant>& ants) {
  // All decisions are taken before any mutation lands, which is exactly the
  // frozen round-start snapshot: same-round emissions are invisible.
  struct Pending {
    Ant* ant;
    Decision decision;
    bool sensed;
  };
  std::vector<Pending> pending;
  for (Ant& a : ants) {
    if (!a.alive || !a.departed) continue;
    Observation o{sense(w, a.pos)};
    pending.push_back({&a, decide(a, o), o.pheromone_here});
  }
  std::vector<StepRecord> recs;
  recs.reserve(pending.size());
  // Emissions commit before any move.
  for (Pending& p : pending) {
    StepRecord rec;
    rec.ant_id = p.ant->id;
    rec.fingerprint = state_fingerprint(*p.ant);
    rec.pos_before = p.ant->pos;
    rec.sensed = p.sensed;
    rec.completed_circuit = p.decision.completed_circuit;
    if (p.decision.action.emit_pheromone) rec.emitted = emit(w, p.ant->pos);
    recs.push_back(rec);
  }
  for (size_t i = 0; i < pending.size(); ++i) {
    Ant& a = *pending[i].ant;
    a.state = pending[i].decision.next;
    a.pos = moved(a.pos, pending[i].decision.action.move);
    visit(w, a.pos);
    recs[i].pos_after = a.pos;
    a.steps_taken += 1;
  }
  return recs;
}

RunResult run_async(const RunConfig& cfg, const RunObserver* observer) {
  validate_config(cfg);
  if (cfg.synchronous) throw ConfigError("mode", "run_async requires an asynchronous config");

  WorldState w(cfg.treasure, cfg.pheromone_budget);
  const auto kills = resolve_fault_plan(cfg.faults, cfg.k, cfg.distance());
  std::vector<Ant> ants;
  for (uint32_t id = 1; id <= cfg.k; ++id) ants.push_back(make_ant(id, cfg));
  for (Ant& a : ants) {
    auto it = kills.find(a.id);
    if (it != kills.end() && it->second == 0) a.alive = false;
  }

  RunResult result;
  RoundClock clock;
  // The asynchronous round definition counts every live ant from the start;
  // release from the nest happens on first schedule but does not gate the
  // completion test.
  for (const Ant& a : ants)
    if (a.alive) clock.track(a.id);
  BudgetLoopScanner scanner;
  const bool scan_budget = cfg.pheromone_budget.has_value() && cfg.k == 1;

  Xoshiro256 rng(cfg.strategy.seed);
  size_t rr_cursor = 0;
  size_t script_cursor = 0;
  uint64_t total_steps = 0;
  const uint64_t cap = cfg.step_cap();

  while (true) {
    if (total_steps >= cap) {
      result.error = RunError::StepCapExceeded;
      break;
    }
    Ant* chosen = nullptr;
    switch (cfg.strategy.kind) {
      case ScheduleKind::RoundRobin:
        for (size_t tries = 0; tries < ants.size(); ++tries) {
          Ant& a = ants[rr_cursor];
          rr_cursor = (rr_cursor + 1) % ants.size();
          if (a.alive) {
            chosen = &a;
            break;
          }
        }
        break;
      case ScheduleKind::SeededRandom: {
        std::vector<Ant*> live;
        for (Ant& a : ants)
          if (a.alive) live.push_back(&a);
        chosen = live[static_cast<size_t>(rng.next_below(live.size()))];
        break;
      }
      case ScheduleKind::Scripted:
        if (script_cursor >= cfg.strategy.script.size()) {
          result.error = RunError::ScriptExhausted;
          break;
        } else {
          Ant& a = ants[cfg.strategy.script[script_cursor++] - 1];
          if (!a.alive) continue;  // scheduling a dead ant moves no counter
          chosen = &a;
        }
        break;
    }
    if (result.error != RunError::None || chosen == nullptr) break;

    Ant& a = *chosen;
    StepRecord rec = step_ant(w, a);
    rec.step_index = total_steps++;
    clock.on_step(a.id);
    note_step(result, rec);
    auto it = kills.find(a.id);
    if (it != kills.end() && a.steps_taken == it->second) {
      a.alive = false;
      clock.untrack(a.id);
    }
    if (observer && observer->on_step) observer->on_step(w, ants, rec);
    if (w.found) break;
    if (scan_budget && scanner.doomed(rec, w, result.steps)) {
      result.error = RunError::BudgetLoopDetected;
      break;
    }
  }

  finalize(result, w, ants, clock, cfg);
  return result;
}

RunResult run_sync(const RunConfig& cfg, const RunObserver* observer) {
  validate_config(cfg);
  if (!cfg.synchronous) throw ConfigError("mode", "run_sync requires a synchronous config");

  WorldState w(cfg.treasure, cfg.pheromone_budget);
  const auto kills = resolve_fault_plan(cfg.faults, cfg.k, cfg.distance());
  std::vector<Ant> ants;
  for (uint32_t id = 1; id <= cfg.k; ++id) ants.push_back(make_ant(id, cfg));
  for (Ant& a : ants) {
    auto it = kills.find(a.id);
    if (it != kills.end() && it->second == 0) a.alive = false;
  }

  RunResult result;
  RoundClock clock;
  BudgetLoopScanner scanner;
  const bool scan_budget = cfg.pheromone_budget.has_value() && cfg.k == 1;
  uint64_t total_steps = 0;
  const uint64_t cap = cfg.step_cap();

  for (uint64_t round = 1;; ++round) {
    // Gradual release: one ant per round in id order. The broken-release
    // mode lets everyone out in round 1.
    if (cfg.emission == EmissionMode::OnePerRound) {
      if (round <= cfg.k && ants[round - 1].alive) {
        ants[round - 1].departed = true;
        clock.track(ants[round - 1].id);
      }
    } else if (round == 1) {
      for (Ant& a : ants)
        if (a.alive) {
          a.departed = true;
          clock.track(a.id);
        }
    }

    std::vector<StepRecord> recs = step_sync_round(w, ants);
    for (StepRecord& rec : recs) rec.step_index = total_steps++;
    // File layout per round: every emission, then every move, in id order.
    for (const StepRecord& rec : recs)
      if (rec.emitted) {
        result.trace.push_back({rec.step_index, rec.ant_id, TraceEvent::Kind::Emit, rec.pos_before});
        if (rec.pos_before.x == 0 && rec.pos_before.y >= 1)
          result.metrics.layer_explorer_log[rec.pos_before.y].insert(rec.ant_id);
      }
    for (const StepRecord& rec : recs) {
      result.trace.push_back({rec.step_index, rec.ant_id, TraceEvent::Kind::Move, rec.pos_after});
      if (rec.completed_circuit) result.layers_completed.insert(rec.pos_before.y);
      result.steps.push_back(rec);
      clock.on_step(rec.ant_id);
    }
    for (Ant& a : ants) {
      auto it = kills.find(a.id);
      if (a.alive && it != kills.end() && it->second != 0 && a.steps_taken == it->second) {
        a.alive = false;
        clock.untrack(a.id);
      }
    }
    if (observer && observer->on_round) observer->on_round(w, ants, round);
    if (w.found) break;
    if (scan_budget && !result.steps.empty() &&
        scanner.doomed(result.steps.back(), w, result.steps)) {
      result.error = RunError::BudgetLoopDetected;
      break;
    }
    if (total_steps >= cap) {
      result.error = RunError::StepCapExceeded;
      break;
    }
  }

  finalize(result, w, ants, clock, cfg);
  return result;
}

RunResult run(const RunConfig& cfg, const RunObserver* observer) {
  return cfg.synchronous ? run_sync(cfg, observer) : run_async(cfg, observer);
}

RunMetrics recompute_metrics_from_trace(const std::vector<TraceEvent>& events,
                                        const RunConfig& cfg) {
  RunMetrics m;
  m.treasure_distance = cfg.distance();
  m.steps_per_ant.assign(cfg.k, 0);
  const auto kills = resolve_fault_plan(cfg.faults, cfg.k, cfg.distance());

  PositionSet marked;
  PositionSet visited;
  visited.insert(Position{0, 0});
  RoundClock clock;

  auto consume_emit = [&](const TraceEvent& e) {
    ++m.pheromone_emissions;
    marked.insert(e.position);
    if (e.position.x == 0 && e.position.y >= 1)
      m.layer_explorer_log[e.position.y].insert(e.ant_id);
  };
  auto consume_move = [&](const TraceEvent& e) {
    visited.insert(e.position);
    if (e.position == cfg.treasure) m.found = true;
    m.steps_per_ant[e.ant_id - 1] += 1;
    clock.on_step(e.ant_id);
  };

  if (cfg.synchronous) {
    // The synchronous actor schedule is closed form: ant i acts in rounds
    // i, i+1, ... until its kill step, so rounds replay without timing
    // hints in the file.
    std::vector<char> released(cfg.k + 1, 0);
    size_t cursor = 0;
    for (uint64_t round = 1; cursor < events.size(); ++round) {
      const uint32_t release_upto =
          cfg.emission == EmissionMode::OnePerRound
              ? static_cast<uint32_t>(std::min<uint64_t>(round, cfg.k))
              : cfg.k;
      std::vector<uint32_t> actors;
      for (uint32_t id = 1; id <= release_upto; ++id) {
        const uint64_t steps_before = cfg.emission == EmissionMode::OnePerRound
                                          ? (round >= id ? round - id : 0)
                                          : round - 1;
        auto it = kills.find(id);
        const bool alive = it == kills.end() || it->second > steps_before;
        if (!released[id]) {
          released[id] = 1;
          if (!(it != kills.end() && it->second == 0)) clock.track(id);
        }
        if (alive) actors.push_back(id);
      }
      // Per round the file holds this round's emissions, then its moves.
      while (cursor < events.size() && events[cursor].action == TraceEvent::Kind::Emit)
        consume_emit(events[cursor++]);
      for (size_t i = 0; i < actors.size() && cursor < events.size(); ++i)
        consume_move(events[cursor++]);
      for (uint32_t id : actors) {
        const uint64_t steps_now = cfg.emission == EmissionMode::OnePerRound
                                       ? round - id + 1
                                       : round;
        auto it = kills.find(id);
        if (it != kills.end() && it->second == steps_now) clock.untrack(id);
      }
    }
  } else {
    for (uint32_t id = 1; id <= cfg.k; ++id) {
      auto it = kills.find(id);
      if (it == kills.end() || it->second > 0) clock.track(id);
    }
    std::vector<uint64_t> steps(cfg.k + 1, 0);
    for (const TraceEvent& e : events) {
      if (e.action == TraceEvent::Kind::Emit) {
        consume_emit(e);
      } else {
        consume_move(e);
        steps[e.ant_id] += 1;
        auto it = kills.find(e.ant_id);
        if (it != kills.end() && it->second == steps[e.ant_id]) clock.untrack(e.ant_id);
      }
    }
  }

  m.rounds = clock.rounds_completed();
  m.distinct_marked_cells = marked.size();
  m.visited_count = visited.size();
  return m;
}

}  // namespace antgrid
