#include "tse/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace tse {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NoEquilibrium: return "no equilibrium";
    case ErrorKind::DegenerateClamp: return "degenerate clamp";
    case ErrorKind::BoundaryCase: return "boundary case";
    case ErrorKind::UnresolvedPrediction: return "unresolved prediction";
  }
  return "unknown";
}

namespace {

double sum(const Triple& x) { return x[0] + x[1] + x[2]; }

double max_abs(const Triple& x) {
  return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
}

bool all_finite(const Triple& x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string describe(const Triple& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(' << x[0] << ", " << x[1] << ", " << x[2] << ')';
  return os.str();
}

// Balance tolerance scaled for states whose components grew large.
bool balanced(const Triple& x, double target) {
  return std::abs(sum(x) - target) <=
         kBalanceTolerance * std::max(1.0, max_abs(x));
}

}  // namespace

DirectingParams::DirectingParams(double v0, double v1, double v2,
                                 ParamCheck check)
    : v_{v0, v1, v2} {
  if (!all_finite(v_)) {
    throw Error(ErrorKind::InvalidArgument,
                "directing parameters must be finite: " + describe(v_));
  }
  exploratory_ = max_abs(v_) > 1.0;
  if (exploratory_ && check == ParamCheck::Strict) {
    throw Error(ErrorKind::InvalidArgument,
                "directing parameters must satisfy |v_m| <= 1: " +
                    describe(v_));
  }
}

RawState::RawState(const Triple& p) : p_(p) {
  if (!all_finite(p_) || !balanced(p_, 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "state must be finite and sum to 1: " + describe(p_));
  }
}

bool RawState::in_unit_cube() const noexcept {
  return std::all_of(p_.begin(), p_.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

SimplexPoint::SimplexPoint(const Triple& p) : p_(p) {
  const bool in_range = std::all_of(
      p_.begin(), p_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
  if (!in_range || !balanced(p_, 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "probabilities must lie in [0, 1] and sum to 1: " +
                    describe(p_));
  }
}

std::optional<std::size_t> SimplexPoint::vertex() const noexcept {
  for (std::size_t m = 0; m < 3; ++m) {
    if (p_[m] == 1.0) return m;
  }
  return std::nullopt;
}

FluctuationVector::FluctuationVector(const Triple& f) : f_(f) {
  if (!all_finite(f_) || !balanced(f_, 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "fluctuations must be finite and sum to 0: " + describe(f_));
  }
}

Triple RegressionMatrix::apply(const Triple& x) const noexcept {
  Triple y{};
  for (std::size_t m = 0; m < 3; ++m) {
    y[m] = e_[m][0] * x[0] + e_[m][1] * x[1] + e_[m][2] * x[2];
  }
  return y;
}

double RegressionMatrix::column_sum(std::size_t col) const noexcept {
  return e_[0][col] + e_[1][col] + e_[2][col];
}

bool Equilibrium::has_v_bar() const noexcept {
  const auto& v = params_.values();
  return std::none_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double Equilibrium::v_bar() const {
  if (!has_v_bar()) {
    throw Error(ErrorKind::InvalidArgument,
                "inverse-parameter sum undefined when some v_m = 0");
  }
  const auto& v = params_.values();
  return 1.0 / v[0] + 1.0 / v[1] + 1.0 / v[2];
}

bool Equilibrium::in_simplex() const noexcept {
  return std::all_of(rho_.begin(), rho_.end(),
                     [](double r) { return r >= 0.0 && r <= 1.0; });
}

RegressionMatrix build_regression_matrix(const DirectingParams& params) {
  RegressionMatrix::Entries e{};
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t n = 0; n < 3; ++n) {
      e[m][n] = (m == n) ? 2.0 * params[n] : -params[n];
    }
  }
  return RegressionMatrix(e);
}

Equilibrium compute_equilibrium(const DirectingParams& params) {
  const auto& v = params.values();
  const Triple products{v[1] * v[2], v[0] * v[2], v[0] * v[1]};
  const double denom = sum(products);
  const double scale = max_abs(products);
  if (std::abs(denom) <= kSingularTolerance * scale || scale == 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "no equilibrium: V = 0 within tolerance (computed V = " << denom
       << ") for parameters " << describe(v);
    throw Error(ErrorKind::NoEquilibrium, os.str());
  }
  return Equilibrium(
      {products[0] / denom, products[1] / denom, products[2] / denom}, denom,
      params);
}

FluctuationVector to_fluctuation(const RawState& state,
                                 const Equilibrium& eq) {
  Triple f{};
  for (std::size_t m = 0; m < 3; ++m) f[m] = state[m] - eq[m];
  return FluctuationVector(f, detail::Trusted{});
}

RawState step_raw(const DirectingParams& params, const RawState& state) {
  const Triple drift = build_regression_matrix(params).apply(state.values());
  Triple next{};
  for (std::size_t m = 0; m < 3; ++m) next[m] = state[m] - drift[m];
  return RawState(next, detail::Trusted{});
}

FluctuationVector step_fluctuation(const DirectingParams& params,
                                   const FluctuationVector& f) {
  // delta f_m = sum_{n != m} v_n f_n - 2 v_m f_m
  Triple next{};
  for (std::size_t m = 0; m < 3; ++m) {
    double delta = -2.0 * params[m] * f[m];
    for (std::size_t n = 0; n < 3; ++n) {
      if (n != m) delta += params[n] * f[n];
    }
    next[m] = f[m] + delta;
  }
  return FluctuationVector(next, detail::Trusted{});
}

SimplexPoint step_clamped(const DirectingParams& params,
                          const SimplexPoint& state) {
  Triple q = step_raw(params, state.raw()).values();
  for (double& x : q) x = std::clamp(x, 0.0, 1.0);
  const double total = sum(q);
  if (!(total > 0.0)) {
    throw Error(ErrorKind::DegenerateClamp,
                "clamping removed all probability mass from " +
                    describe(state.values()));
  }
  for (double& x : q) x /= total;
  for (std::size_t m = 0; m < 3; ++m) {
    if (q[m] >= 1.0 - kAbsorbTolerance) {
      Triple unit{};
      unit[m] = 1.0;
      return SimplexPoint(unit, detail::Trusted{});
    }
  }
  return SimplexPoint(q, detail::Trusted{});
}

namespace {

template <typename State, typename Step>
std::vector<State> iterate(const State& init, std::size_t steps, Step step) {
  std::vector<State> out;
  out.reserve(steps + 1);
  out.push_back(init);
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      out.push_back(step(out.back()));
    } catch (const Error& e) {
      throw Error(e.kind(),
                  std::string(e.what()) + " (step " + std::to_string(k) + ")",
                  k);
    }
  }
  return out;
}

}  // namespace

std::vector<SimplexPoint> trajectory_clamped(const DirectingParams& params,
                                             const SimplexPoint& init,
                                             std::size_t steps) {
  return iterate(init, steps, [&](const SimplexPoint& s) {
    return step_clamped(params, s);
  });
}

std::vector<RawState> trajectory(const DirectingParams& params,
                                 const RawState& init, std::size_t steps,
                                 StepMode mode) {
  if (mode == StepMode::Raw) {
    return iterate(init, steps,
                   [&](const RawState& s) { return step_raw(params, s); });
  }
  const auto clamped =
      trajectory_clamped(params, SimplexPoint(init.values()), steps);
  std::vector<RawState> out;
  out.reserve(clamped.size());
  for (const auto& s : clamped) out.push_back(s.raw());
  return out;
}

Matrix2 reduced_matrix(const DirectingParams& params) {
  const double v0 = params[0], v1 = params[1], v2 = params[2];
  return {{{-(2.0 * v0 + v2), v1 - v2}, {v0 - v2, -(2.0 * v1 + v2)}}};
}

std::array<double, 2> apply(const Matrix2& a,
                            const std::array<double, 2>& x) {
  return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]};
}

double contraction_factor(const DirectingParams& params) {
  const Matrix2 a = reduced_matrix(params);
  const double b00 = 1.0 + a[0][0], b11 = 1.0 + a[1][1];
  const double half_trace = 0.5 * (b00 + b11);
  const double det = b00 * b11 - a[0][1] * a[1][0];
  const double disc = half_trace * half_trace - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    return std::max(std::abs(half_trace + root), std::abs(half_trace - root));
  }
  // Complex pair: |lambda|^2 = det.
  return std::sqrt(det);
}

}  // namespace tse
