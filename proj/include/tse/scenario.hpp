#ifndef TSE_SCENARIO_HPP
#define TSE_SCENARIO_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tse/core.hpp"

namespace tse {

/// Limit behaviour of coordinate m, decided by the sign of v_m and whether
/// rho_m lies inside (0, 1):
///
///   Attractive   v_m > 0, 0 < rho_m < 1   P_m(k) -> rho_m
///   Repulsive    v_m < 0, 0 < rho_m < 1   P_m(k) -> 1 above rho_m, 0 below
///   Dominant     v_m < 0, rho_m outside   P_m(k) -> 1
///   Degenerate   v_m > 0, rho_m outside   P_m(k) -> 0
enum class Scenario { Attractive, Repulsive, Dominant, Degenerate };

const char* to_string(Scenario s) noexcept;

/// Closeness to v_m = 0 or rho_m in {0, 1} that counts as a boundary.
inline constexpr double kBoundaryTolerance = 1e-12;
/// Consecutive small increments required before a limit is accepted.
inline constexpr std::size_t kStabilizationWindow = 10;

struct BoundaryFlags {
  bool v_zero = false;
  bool rho_boundary = false;

  bool any() const noexcept { return v_zero || rho_boundary; }
  /// Semicolon-joined names, e.g. "v_zero;rho_boundary".
  std::string to_string() const;
};

BoundaryFlags boundary_flags(double v_m, double rho_m) noexcept;

/// Raised when no scenario applies: v_m = 0 or rho_m on {0, 1}.
class BoundaryCaseError : public Error {
 public:
  BoundaryCaseError(const std::string& what, BoundaryFlags flags)
      : Error(ErrorKind::BoundaryCase, what), flags_(flags) {}
  BoundaryFlags flags() const noexcept { return flags_; }

 private:
  BoundaryFlags flags_;
};

/// Either a fixed limit, or the repulsive split: 0 when the start is below
/// the threshold, 1 when above, undefined at equality.
class PredictedLimit {
 public:
  static PredictedLimit fixed(double value) { return {false, value}; }
  static PredictedLimit conditional(double threshold) {
    return {true, threshold};
  }

  bool is_conditional() const noexcept { return conditional_; }
  /// Fixed value, or the threshold when conditional.
  double value() const noexcept { return value_; }

  /// Throws UnresolvedPrediction when conditional and |initial - threshold|
  /// is within kBoundaryTolerance.
  double resolve(double initial) const;
  bool resolvable(double initial) const noexcept;

  friend bool operator==(const PredictedLimit&, const PredictedLimit&) = default;

 private:
  PredictedLimit(bool conditional, double value)
      : conditional_(conditional), value_(value) {}
  bool conditional_;
  double value_;
};

struct ScenarioReport {
  std::size_t coordinate = 0;
  Scenario scenario = Scenario::Attractive;
  double rho_m = 0.0;
  double v_m = 0.0;
  PredictedLimit predicted_limit = PredictedLimit::fixed(0.0);
  double contraction_factor = 0.0;
};

/// The four-way table on (v_m, rho_m) alone.
Scenario scenario_for(double v_m, double rho_m);
PredictedLimit predicted_limit_for(Scenario s, double rho_m) noexcept;

ScenarioReport classify(const DirectingParams& params, std::size_t coordinate);

struct LimitEstimate {
  double value = 0.0;
  bool converged = false;
  /// Clamped steps actually taken.
  std::size_t steps_used = 0;
  /// Index of the first state of the accepted stable run (or the vertex).
  std::size_t settled_at = 0;
  /// Infinity norm of the last increment.
  double terminal_delta = 0.0;
  bool absorbed = false;
  SimplexPoint final_state = SimplexPoint(1.0, 0.0, 0.0);
};

/// Iterates the clamped dynamics until `window` consecutive increments have
/// infinity norm <= tol, an absorbing vertex is reached, or max_steps runs
/// out (converged = false).
LimitEstimate estimate_limit(const DirectingParams& params,
                             const SimplexPoint& init, std::size_t coordinate,
                             double tol, std::size_t max_steps,
                             std::size_t window = kStabilizationWindow);

struct Agreement {
  bool agree = false;
  double predicted = 0.0;
  double simulated = 0.0;
};

Agreement check_agreement(const ScenarioReport& report,
                          const LimitEstimate& estimate,
                          const SimplexPoint& init, double tol);

// ---------------------------------------------------------------------------
// Parameter sweeps

/// Inclusive arithmetic range; a single value when start == stop.
struct ValueRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  static ValueRange single(double v) { return {v, v, 0.0}; }
  /// "a" or "start:stop:step".
  static ValueRange parse(const std::string& text);
  std::vector<double> values() const;
};

class ParameterGrid {
 public:
  ParameterGrid() = default;
  static ParameterGrid explicit_cells(std::vector<Triple> cells);
  /// v0 varies slowest, v2 fastest.
  static ParameterGrid cartesian(const ValueRange& v0, const ValueRange& v1,
                                 const ValueRange& v2);
  /// One triple from each scenario for coordinate 0.
  static ParameterGrid four_scenario_demo();

  const std::vector<Triple>& cells() const noexcept { return cells_; }

 private:
  explicit ParameterGrid(std::vector<Triple> cells)
      : cells_(std::move(cells)) {}
  std::vector<Triple> cells_;
};

struct SweepOptions {
  std::size_t coordinate = 0;
  SimplexPoint init = SimplexPoint(1.0 / 3, 1.0 / 3, 1.0 / 3);
  bool simulate = false;
  double limit_tol = 1e-12;
  std::size_t max_steps = 100000;
  double agreement_tol = 1e-6;
  ParamCheck param_check = ParamCheck::Strict;
  /// 0 = automatic (hardware concurrency, capped by TSE_MAX_THREADS).
  std::size_t max_threads = 0;
};

/// Row outcome markers that replace the scenario label.
inline constexpr const char* kMarkNoEquilibrium = "no_equilibrium";
inline constexpr const char* kMarkBoundary = "boundary";
inline constexpr const char* kMarkInvalidParams = "invalid_params";

struct SweepRow {
  Triple params{};
  std::size_t coordinate = 0;
  std::optional<double> rho_m;
  double v_m = 0.0;
  /// Scenario name or one of the kMark* markers.
  std::string scenario;
  /// Number, "0|1" for an unresolved repulsive split, or empty.
  std::string predicted_limit;
  std::optional<double> contraction_factor;
  std::optional<double> simulated_limit;
  /// agree, disagree, unresolved, error, or empty when not simulated.
  std::string agreement;
  std::vector<std::string> flags;
};

/// Classifies every cell; cell failures become row markers. Output order is
/// the grid order for any thread count.
std::vector<SweepRow> sweep(const ParameterGrid& grid,
                            const SweepOptions& options);

}  // namespace tse

#endif  // TSE_SCENARIO_HPP
