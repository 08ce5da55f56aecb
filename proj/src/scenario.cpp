#include "tse/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tse/parallel.hpp"
#include "tse/table_io.hpp"

namespace tse {

const char* to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::Attractive: return "attractive";
    case Scenario::Repulsive: return "repulsive";
    case Scenario::Dominant: return "dominant";
    case Scenario::Degenerate: return "degenerate";
  }
  return "unknown";
}

std::string BoundaryFlags::to_string() const {
  std::string out;
  if (v_zero) out = "v_zero";
  if (rho_boundary) out += out.empty() ? "rho_boundary" : ";rho_boundary";
  return out;
}

BoundaryFlags boundary_flags(double v_m, double rho_m) noexcept {
  BoundaryFlags f;
  f.v_zero = std::abs(v_m) <= kBoundaryTolerance;
  f.rho_boundary = std::abs(rho_m) <= kBoundaryTolerance ||
                   std::abs(rho_m - 1.0) <= kBoundaryTolerance;
  return f;
}

bool PredictedLimit::resolvable(double initial) const noexcept {
  return !conditional_ || std::abs(initial - value_) > kBoundaryTolerance;
}

double PredictedLimit::resolve(double initial) const {
  if (!conditional_) return value_;
  if (!resolvable(initial)) {
    throw Error(ErrorKind::UnresolvedPrediction,
                "repulsive limit undefined when the initial value equals "
                "rho_m = " + format_double(value_));
  }
  return initial > value_ ? 1.0 : 0.0;
}

Scenario scenario_for(double v_m, double rho_m) {
  const BoundaryFlags flags = boundary_flags(v_m, rho_m);
  if (flags.any()) {
    throw BoundaryCaseError("no scenario for v_m = " + format_double(v_m) +
                                ", rho_m = " + format_double(rho_m) + " (" +
                                flags.to_string() + ")",
                            flags);
  }
  const bool interior = rho_m > 0.0 && rho_m < 1.0;
  if (interior) return v_m > 0.0 ? Scenario::Attractive : Scenario::Repulsive;
  return v_m < 0.0 ? Scenario::Dominant : Scenario::Degenerate;
}

PredictedLimit predicted_limit_for(Scenario s, double rho_m) noexcept {
  switch (s) {
    case Scenario::Attractive: return PredictedLimit::fixed(rho_m);
    case Scenario::Repulsive: return PredictedLimit::conditional(rho_m);
    case Scenario::Dominant: return PredictedLimit::fixed(1.0);
    case Scenario::Degenerate: return PredictedLimit::fixed(0.0);
  }
  return PredictedLimit::fixed(rho_m);
}

namespace {

void check_coordinate(std::size_t coordinate) {
  if (coordinate > 2) {
    throw Error(ErrorKind::InvalidArgument,
                "coordinate must be 0, 1 or 2, got " +
                    std::to_string(coordinate));
  }
}

double sup_distance(const SimplexPoint& a, const SimplexPoint& b) {
  double d = 0.0;
  for (std::size_t m = 0; m < 3; ++m) d = std::max(d, std::abs(a[m] - b[m]));
  return d;
}

}  // namespace

ScenarioReport classify(const DirectingParams& params,
                        std::size_t coordinate) {
  check_coordinate(coordinate);
  const Equilibrium eq = compute_equilibrium(params);
  ScenarioReport r;
  r.coordinate = coordinate;
  r.v_m = params[coordinate];
  r.rho_m = eq[coordinate];
  r.scenario = scenario_for(r.v_m, r.rho_m);
  r.predicted_limit = predicted_limit_for(r.scenario, r.rho_m);
  r.contraction_factor = contraction_factor(params);
  return r;
}

LimitEstimate estimate_limit(const DirectingParams& params,
                             const SimplexPoint& init, std::size_t coordinate,
                             double tol, std::size_t max_steps,
                             std::size_t window) {
  check_coordinate(coordinate);
  if (!(tol > 0.0) || max_steps < 1 || window < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "estimate_limit needs tol > 0, max_steps >= 1, window >= 1");
  }

  LimitEstimate est;
  SimplexPoint state = init;
  std::size_t stable = 0;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    SimplexPoint next = state;
    try {
      next = step_clamped(params, state);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  std::string(e.what()) + " (step " + std::to_string(k) + ")",
                  k);
    }
    est.terminal_delta = sup_distance(next, state);
    est.steps_used = k;

    if (next.vertex() && next == state) {
      // Fixed vertex: nothing further can change.
      est.absorbed = true;
      est.converged = true;
      if (stable == 0) est.settled_at = k - 1;
      state = next;
      break;
    }
    if (est.terminal_delta <= tol) {
      if (stable == 0) est.settled_at = k - 1;
      ++stable;
    } else {
      stable = 0;
    }
    state = next;
    if (stable >= window) {
      est.converged = true;
      break;
    }
  }
  est.final_state = state;
  est.value = state[coordinate];
  return est;
}

Agreement check_agreement(const ScenarioReport& report,
                          const LimitEstimate& estimate,
                          const SimplexPoint& init, double tol) {
  Agreement a;
  a.predicted = report.predicted_limit.resolve(init[report.coordinate]);
  a.simulated = estimate.value;
  a.agree = std::abs(a.simulated - a.predicted) <= tol;
  return a;
}

// ---------------------------------------------------------------------------

ValueRange ValueRange::parse(const std::string& text) {
  std::vector<double> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find(':', begin);
    const auto piece = text.substr(begin, end == std::string::npos
                                              ? std::string::npos
                                              : end - begin);
    const auto v = parse_double(piece);
    if (!v) {
      throw Error(ErrorKind::InvalidArgument,
                  "malformed range '" + text + "'");
    }
    parts.push_back(*v);
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  if (parts.size() == 1) return single(parts[0]);
  if (parts.size() != 3) {
    throw Error(ErrorKind::InvalidArgument,
                "range must be 'value' or 'start:stop:step', got '" + text +
                    "'");
  }
  ValueRange r{parts[0], parts[1], parts[2]};
  r.values();  // validates
  return r;
}

std::vector<double> ValueRange::values() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidArgument, "range bounds must be finite");
  }
  if (start == stop) return {start};
  if (step == 0.0 || (stop - start) / step < 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "range step must be nonzero and point from start to stop");
  }
  const double span = (stop - start) / step;
  if (span > 1e7) {
    throw Error(ErrorKind::InvalidArgument, "range has too many points");
  }
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = start + static_cast<double>(i) * step;
    // Strip accumulated binary noise so grid points like 0 land exactly.
    if (std::abs(v) < 1e-9 * std::abs(step)) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

ParameterGrid ParameterGrid::explicit_cells(std::vector<Triple> cells) {
  return ParameterGrid(std::move(cells));
}

ParameterGrid ParameterGrid::cartesian(const ValueRange& v0,
                                       const ValueRange& v1,
                                       const ValueRange& v2) {
  const auto a = v0.values(), b = v1.values(), c = v2.values();
  std::vector<Triple> cells;
  cells.reserve(a.size() * b.size() * c.size());
  for (double x : a)
    for (double y : b)
      for (double z : c) cells.push_back({x, y, z});
  return ParameterGrid(std::move(cells));
}

ParameterGrid ParameterGrid::four_scenario_demo() {
  return ParameterGrid({{0.1, 0.1, 0.1},
                        {-0.2, 0.5, -0.4},
                        {-0.1, 0.3, 0.2},
                        {0.3, -0.1, 0.2}});
}

namespace {

SweepRow evaluate_cell(const Triple& cell, const SweepOptions& opt) {
  SweepRow row;
  row.params = cell;
  row.coordinate = opt.coordinate;
  row.v_m = cell[opt.coordinate];

  std::optional<DirectingParams> params;
  try {
    params.emplace(cell, opt.param_check);
  } catch (const Error&) {
    row.scenario = kMarkInvalidParams;
    return row;
  }
  if (params->exploratory()) row.flags.emplace_back("exploratory");
  row.contraction_factor = contraction_factor(*params);

  std::optional<Equilibrium> eq;
  try {
    eq.emplace(compute_equilibrium(*params));
  } catch (const Error&) {
    row.scenario = kMarkNoEquilibrium;
    return row;
  }
  row.rho_m = (*eq)[opt.coordinate];

  Scenario scenario;
  try {
    scenario = scenario_for(row.v_m, *row.rho_m);
  } catch (const BoundaryCaseError& e) {
    row.scenario = kMarkBoundary;
    if (e.flags().v_zero) row.flags.emplace_back("v_zero");
    if (e.flags().rho_boundary) row.flags.emplace_back("rho_boundary");
    return row;
  }
  row.scenario = to_string(scenario);

  const PredictedLimit predicted = predicted_limit_for(scenario, *row.rho_m);
  const double start = opt.init[opt.coordinate];
  const bool resolved = predicted.resolvable(start);
  row.predicted_limit =
      resolved ? format_double(predicted.resolve(start)) : "0|1";
  if (predicted.is_conditional()) row.flags.emplace_back("conditional");

  if (!opt.simulate) return row;
  try {
    const LimitEstimate est = estimate_limit(
        *params, opt.init, opt.coordinate, opt.limit_tol, opt.max_steps);
    row.simulated_limit = est.value;
    if (!est.converged) row.flags.emplace_back("not_converged");
    if (!resolved) {
      row.agreement = "unresolved";
    } else {
      row.agreement = std::abs(est.value - predicted.resolve(start)) <=
                              opt.agreement_tol
                          ? "agree"
                          : "disagree";
    }
  } catch (const Error& e) {
    row.agreement = "error";
    row.flags.emplace_back(e.kind() == ErrorKind::DegenerateClamp
                               ? "degenerate_clamp"
                               : "simulation_error");
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const ParameterGrid& grid,
                            const SweepOptions& options) {
  check_coordinate(options.coordinate);
  const auto& cells = grid.cells();
  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), options.max_threads, [&](std::size_t i) {
    rows[i] = evaluate_cell(cells[i], options);
  });
  return rows;
}

}  // namespace tse
