#ifndef TSE_CORE_HPP
#define TSE_CORE_HPP

// Ternary statistical experiment: three alternatives whose probabilities
// P = (P0, P1, P2) evolve by persistent linear regression
//
//   P(k+1) = P(k) - V P(k),     V[m][m] = 2 v_m,  V[m][n] = -v_n  (n != m)
//
// around the equilibrium rho solving V rho = 0 with sum(rho) = 1.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "tse/error.hpp"

namespace tse {

using Triple = std::array<double, 3>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Absolute tolerance for the balance conditions (sum 1 / sum 0).
inline constexpr double kBalanceTolerance = 1e-12;
/// Relative threshold below which the equilibrium denominator counts as zero.
inline constexpr double kSingularTolerance = 1e-14;
/// A clamped coordinate this close to 1 snaps to the unit vector.
inline constexpr double kAbsorbTolerance = 1e-9;

namespace detail {
// Passkey for states produced by the dynamics itself, which conserves the
// sum algebraically and must not be rejected for roundoff on divergent runs.
struct Trusted {};
}  // namespace detail

enum class ParamCheck { Strict, AllowExploratory };

/// Directing action parameters (v0, v1, v2). Strict construction requires
/// |v_m| <= 1; AllowExploratory accepts any finite value and marks the
/// triple as exploratory.
class DirectingParams {
 public:
  DirectingParams(double v0, double v1, double v2,
                  ParamCheck check = ParamCheck::Strict);
  explicit DirectingParams(const Triple& v,
                           ParamCheck check = ParamCheck::Strict)
      : DirectingParams(v[0], v[1], v[2], check) {}

  double operator[](std::size_t m) const { return v_[m]; }
  const Triple& values() const noexcept { return v_; }
  bool exploratory() const noexcept { return exploratory_; }

  friend bool operator==(const DirectingParams& a, const DirectingParams& b) {
    return a.v_ == b.v_;
  }

 private:
  Triple v_;
  bool exploratory_ = false;
};

/// A state of the raw linear dynamics: sums to 1, components unconstrained.
class RawState {
 public:
  explicit RawState(const Triple& p);
  RawState(double p0, double p1, double p2) : RawState(Triple{p0, p1, p2}) {}
  RawState(const Triple& p, detail::Trusted) noexcept : p_(p) {}

  double operator[](std::size_t m) const { return p_[m]; }
  const Triple& values() const noexcept { return p_; }
  bool in_unit_cube() const noexcept;

 private:
  Triple p_;
};

/// A probability triple on the closed simplex.
class SimplexPoint {
 public:
  explicit SimplexPoint(const Triple& p);
  SimplexPoint(double p0, double p1, double p2)
      : SimplexPoint(Triple{p0, p1, p2}) {}
  SimplexPoint(const Triple& p, detail::Trusted) noexcept : p_(p) {}

  double operator[](std::size_t m) const { return p_[m]; }
  const Triple& values() const noexcept { return p_; }
  RawState raw() const noexcept { return RawState(p_, detail::Trusted{}); }

  /// Index of the unit coordinate when the point is a vertex.
  std::optional<std::size_t> vertex() const noexcept;

  friend bool operator==(const SimplexPoint& a, const SimplexPoint& b) {
    return a.p_ == b.p_;
  }

 private:
  Triple p_;
};

/// Deviation from equilibrium, P - rho. Sums to 0.
class FluctuationVector {
 public:
  explicit FluctuationVector(const Triple& f);
  FluctuationVector(const Triple& f, detail::Trusted) noexcept : f_(f) {}

  double operator[](std::size_t m) const { return f_[m]; }
  const Triple& values() const noexcept { return f_; }

 private:
  Triple f_;
};

/// The 3x3 regression matrix. Every column sums to zero.
class RegressionMatrix {
 public:
  using Entries = std::array<Triple, 3>;

  explicit RegressionMatrix(const Entries& e) noexcept : e_(e) {}

  double operator()(std::size_t row, std::size_t col) const {
    return e_[row][col];
  }
  const Entries& entries() const noexcept { return e_; }

  Triple apply(const Triple& x) const noexcept;
  double column_sum(std::size_t col) const noexcept;

 private:
  Entries e_;
};

class Equilibrium {
 public:
  Equilibrium(const Triple& rho, double v_denominator,
              const DirectingParams& params) noexcept
      : rho_(rho), v_(v_denominator), params_(params) {}

  double operator[](std::size_t m) const { return rho_[m]; }
  const Triple& rho() const noexcept { return rho_; }

  /// V = v1 v2 + v0 v2 + v0 v1.
  double v_denominator() const noexcept { return v_; }

  /// 1/v0 + 1/v1 + 1/v2; throws InvalidArgument when some v_m is zero.
  double v_bar() const;
  bool has_v_bar() const noexcept;

  bool in_simplex() const noexcept;
  RawState state() const noexcept { return RawState(rho_, detail::Trusted{}); }

 private:
  Triple rho_;
  double v_;
  DirectingParams params_;
};

enum class StepMode { Raw, Clamped };

RegressionMatrix build_regression_matrix(const DirectingParams& params);

/// Closed-form equilibrium rho_m = (product of the other two v) / V.
/// Throws NoEquilibrium when |V| <= kSingularTolerance * max |v_i v_j|.
Equilibrium compute_equilibrium(const DirectingParams& params);

FluctuationVector to_fluctuation(const RawState& state, const Equilibrium& eq);

/// One step of the linear dynamics, P - V P.
RawState step_raw(const DirectingParams& params, const RawState& state);

/// Same increment applied to a fluctuation vector (the scalar difference
/// equations). Agrees with step_raw because V rho = 0.
FluctuationVector step_fluctuation(const DirectingParams& params,
                                   const FluctuationVector& f);

/// Linear step projected back onto the simplex: clamp each coordinate to
/// [0, 1], renormalize, then snap to a vertex when a coordinate reaches
/// 1 - kAbsorbTolerance. Throws DegenerateClamp if all mass is clipped.
SimplexPoint step_clamped(const DirectingParams& params,
                          const SimplexPoint& state);

/// States 0..steps. Clamped mode requires init to lie on the simplex.
/// Step failures are rethrown with the index of the failing step.
std::vector<RawState> trajectory(const DirectingParams& params,
                                 const RawState& init, std::size_t steps,
                                 StepMode mode);

std::vector<SimplexPoint> trajectory_clamped(const DirectingParams& params,
                                             const SimplexPoint& init,
                                             std::size_t steps);

/// Dynamics of (f0, f1) after eliminating f2 = -(f0 + f1):
/// delta f = A f with
///   A = [[-(2 v0 + v2), v1 - v2], [v0 - v2, -(2 v1 + v2)]].
Matrix2 reduced_matrix(const DirectingParams& params);

std::array<double, 2> apply(const Matrix2& a, const std::array<double, 2>& x);

/// Spectral radius of I + A; below 1 exactly when the raw iteration
/// converges to rho from every start.
double contraction_factor(const DirectingParams& params);

}  // namespace tse

#endif  // TSE_CORE_HPP
