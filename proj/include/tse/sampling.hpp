#ifndef TSE_SAMPLING_HPP
#define TSE_SAMPLING_HPP

// Finite sample volume layer. Each stage computes the clamped regression
// target q and replaces it by the empirical frequencies of N multinomial
// draws from q, so that N -> infinity recovers the deterministic clamped
// trajectory.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tse/core.hpp"

namespace tse {

using SampleStream = std::mt19937_64;
using Counts = std::array<std::uint64_t, 3>;

struct SampleConfig {
  std::uint64_t sample_volume = 1;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  std::size_t steps = 0;

  /// Throws InvalidArgument unless sample_volume >= 1 and replications >= 1.
  void validate() const;
};

/// Seed of stream `index` under master `seed`: a SplitMix64 finalizer over
/// the pair, so streams are independent of evaluation order.
std::uint64_t derive_stream_seed(std::uint64_t seed,
                                 std::uint64_t index) noexcept;
SampleStream make_stream(std::uint64_t seed, std::uint64_t index);

/// Multinomial(n, q) by sequential conditional binomials.
Counts draw_multinomial(const Triple& q, std::uint64_t n,
                        SampleStream& stream);

SimplexPoint stochastic_step(const DirectingParams& params,
                             const SimplexPoint& freq, std::uint64_t n,
                             SampleStream& stream);

struct EmpiricalTrajectory {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_seed = 0;
  std::uint64_t sample_volume = 0;
  /// states[0] is the initial point; states[k] = counts[k - 1] / N.
  std::vector<SimplexPoint> states;
  std::vector<Counts> counts;
  /// Set when the replication stopped early; states holds what was reached.
  std::optional<std::string> error;

  bool ok() const noexcept { return !error.has_value(); }
};

/// cfg.replications independent runs of cfg.steps stochastic steps each.
/// Replication r draws from make_stream(cfg.seed, r); output is ordered by r
/// and bit-identical for a given cfg regardless of `threads`.
std::vector<EmpiricalTrajectory> run_replications(const DirectingParams& params,
                                                  const SimplexPoint& init,
                                                  const SampleConfig& cfg,
                                                  std::size_t threads = 0);

/// max over k and m of |empirical P_m(k) - reference P_m(k)|.
double max_deviation(const EmpiricalTrajectory& run,
                     const std::vector<SimplexPoint>& reference);

struct DeviationRow {
  std::uint64_t n = 0;
  double median_max_deviation = 0.0;
  /// Successful replications entering the median.
  std::size_t replications = 0;
};

/// For each sample volume (nonempty, strictly increasing) runs the
/// replications of `base` at that volume and reports the median max
/// deviation from the deterministic clamped trajectory.
std::vector<DeviationRow> lln_diagnostic(const DirectingParams& params,
                                         const SimplexPoint& init,
                                         const std::vector<std::uint64_t>& volumes,
                                         const SampleConfig& base,
                                         std::size_t threads = 0);

}  // namespace tse

#endif  // TSE_SAMPLING_HPP
