#include "antgrid/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "antgrid/scheduler.hpp"

namespace antgrid {

bool lattice_hits(Position base, Position step, Position target) {
  if (step.x == 0 && step.y == 0) return base == target;
  const int64_t rx = target.x - base.x;
  const int64_t ry = target.y - base.y;
  if (step.x != 0) {
    if (rx % step.x != 0) return false;
    const int64_t n = rx / step.x;
    return n >= 0 && base.y + n * step.y == target.y;
  }
  if (rx != 0) return false;
  if (ry % step.y != 0) return false;
  return ry / step.y >= 0;
}

CycleReport detect_cycle(const RunResult& run, AntProgramId program) {
  (void)program;
  if (!run.budget_exhausted) throw NoBudgetExhaustion();
  const auto& steps = run.steps;

  // Scan only after the last applied emission; the world is static there.
  size_t t0 = 0;
  for (size_t t = 0; t < steps.size(); ++t)
    if (steps[t].emitted) t0 = t + 1;

  CycleReport report;
  std::unordered_map<uint64_t, uint64_t> seen;
  for (size_t t = t0; t < steps.size(); ++t) {
    const StepRecord& rec = steps[t];
    if (rec.sensed) {
      seen.clear();
      continue;
    }
    auto [it, fresh] = seen.try_emplace(rec.fingerprint, t);
    if (fresh) continue;
    const uint64_t t1 = it->second;
    const Position d{rec.pos_before.x - steps[t1].pos_before.x,
                     rec.pos_before.y - steps[t1].pos_before.y};
    // A state revisit repeats forever only when the pheromone context stays
    // identical ahead: no mark may lie on any forward translate of the
    // window, or the walk will sense it and leave the would-be loop.
    bool context_clear = true;
    for (uint64_t u = t1; u < t && context_clear; ++u)
      for (const Position& m : run.marked)
        if (lattice_hits(steps[u].pos_before, d, m)) {
          context_clear = false;
          break;
        }
    if (!context_clear) {
      it->second = t;  // measure the next window from here
      continue;
    }
    report.cycle_found = true;
    report.cycle_start_step = t1;
    report.period = t - t1;
    report.displacement = d;
    int64_t radius = 0;
    for (size_t u = 0; u <= t; ++u) {
      radius = std::max(radius, manhattan_distance(steps[u].pos_before));
      radius = std::max(radius, manhattan_distance(steps[u].pos_after));
    }
    report.covered_radius = radius;
    return report;
  }
  return report;
}

bool cycle_band_contains(const CycleReport& report, const std::vector<StepRecord>& steps,
                         Position cell) {
  if (!report.cycle_found) throw AnalysisError("no cycle to take a band from");
  const uint64_t t1 = report.cycle_start_step;
  for (uint64_t t = 0; t < t1 && t < steps.size(); ++t)
    if (steps[t].pos_before == cell || steps[t].pos_after == cell) return true;
  for (uint64_t t = t1; t < t1 + report.period && t < steps.size(); ++t) {
    if (lattice_hits(steps[t].pos_before, report.displacement, cell)) return true;
    if (lattice_hits(steps[t].pos_after, report.displacement, cell)) return true;
  }
  return false;
}

bool verify_layer_coverage(const std::set<int64_t>& layers_completed,
                           const PositionSet& visited, int64_t treasure_distance) {
  for (int64_t l : layers_completed) {
    if (l > treasure_distance) continue;
    for (const Position& cell : layer_cells(l))
      if (!visited.contains(cell)) return false;
  }
  return true;
}

bool verify_layer_coverage(const RunResult& run) {
  return verify_layer_coverage(run.layers_completed, run.visited,
                               run.metrics.treasure_distance);
}

bool verify_no_collision(const RunMetrics& metrics) {
  for (const auto& [layer, ants] : metrics.layer_explorer_log) {
    (void)layer;
    if (ants.size() != 1) return false;
  }
  return true;
}

namespace {

std::vector<double> model_features(const std::string& model, int64_t D, uint32_t k,
                                   uint32_t f) {
  const double d = static_cast<double>(D);
  if (model == kModelBase) return {d, d * d / static_cast<double>(k)};
  if (model == kModelFault) {
    const uint32_t survivors = k > f ? k - f : 1;
    return {d, d * d / static_cast<double>(survivors), d * static_cast<double>(f)};
  }
  throw AnalysisError("unknown model tag '" + model + "'");
}

}  // namespace

FitResult fit_complexity(const std::vector<FitSample>& samples, const std::string& model) {
  const size_t m = model_features(model, 1, 1, 0).size();
  std::set<int64_t> distances;
  std::set<uint32_t> ks;
  for (const auto& s : samples) {
    distances.insert(s.distance);
    ks.insert(s.ants);
  }
  if (samples.size() < 6 || distances.size() < 3 || ks.size() < 2) throw Underdetermined();

  Eigen::MatrixXd A(samples.size(), m);
  Eigen::VectorXd b(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    auto feats = model_features(model, samples[i].distance, samples[i].ants, samples[i].faults);
    for (size_t j = 0; j < m; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feats[j];
    b(static_cast<Eigen::Index>(i)) = static_cast<double>(samples[i].rounds);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < static_cast<Eigen::Index>(m)) throw Underdetermined();

  // Non-negative coefficients: drop the most negative column and re-solve.
  std::vector<bool> active(m, true);
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (;;) {
    std::vector<size_t> idx;
    for (size_t j = 0; j < m; ++j)
      if (active[j]) idx.push_back(j);
    if (idx.empty()) throw Underdetermined();
    Eigen::MatrixXd As(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) As.col(static_cast<Eigen::Index>(j)) = A.col(static_cast<Eigen::Index>(idx[j]));
    Eigen::VectorXd cs = As.colPivHouseholderQr().solve(b);
    size_t worst = idx.size();
    for (size_t j = 0; j < idx.size(); ++j)
      if (cs(static_cast<Eigen::Index>(j)) < -1e-12 &&
          (worst == idx.size() || cs(static_cast<Eigen::Index>(j)) < cs(static_cast<Eigen::Index>(worst))))
        worst = j;
    if (worst == idx.size()) {
      coef.setZero();
      for (size_t j = 0; j < idx.size(); ++j)
        coef(static_cast<Eigen::Index>(idx[j])) = std::max(0.0, cs(static_cast<Eigen::Index>(j)));
      break;
    }
    active[idx[worst]] = false;
  }

  // Scale the fit up into a dominating envelope; the residual then reports
  // how loose that envelope is at its worst point.
  double scale = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double fit = A.row(i).dot(coef);
    if (fit <= 0.0) {
      if (b(i) > 0.0) throw Underdetermined();
      continue;
    }
    scale = std::max(scale, b(i) / fit);
  }
  if (scale <= 0.0) scale = 1.0;

  FitResult result;
  result.model = model;
  result.coefficients.resize(m);
  for (size_t j = 0; j < m; ++j) result.coefficients[j] = coef(static_cast<Eigen::Index>(j)) * scale;

  double worst_rel = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    auto feats = model_features(model, samples[i].distance, samples[i].ants, samples[i].faults);
    double bound = 0.0;
    for (size_t j = 0; j < m; ++j) bound += feats[j] * result.coefficients[j];
    if (bound <= 0.0) throw Underdetermined();
    worst_rel = std::max(worst_rel, (bound - static_cast<double>(samples[i].rounds)) / bound);
  }
  result.max_relative_residual = worst_rel;
  return result;
}

double evaluate_model(const FitResult& fit, int64_t distance, uint32_t ants, uint32_t faults) {
  auto feats = model_features(fit.model, distance, ants, faults);
  double v = 0.0;
  for (size_t j = 0; j < feats.size(); ++j) v += feats[j] * fit.coefficients[j];
  return v;
}

bool pheromone_audit(const RunMetrics& metrics, AntProgramId program, int64_t distance,
                     uint32_t ants, uint64_t ants_departed) {
  if (program == AntProgramId::Tm)
    return metrics.pheromone_emissions <= ants &&
           metrics.pheromone_emissions <= ants_departed;
  const uint64_t bound =
      kFsmEmissionSlopeBound * static_cast<uint64_t>(distance) + kFsmEmissionOffsetBound;
  return metrics.pheromone_emissions <= bound;
}

}  // namespace antgrid
