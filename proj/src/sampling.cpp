#include "tse/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tse/parallel.hpp"

namespace tse {

void SampleConfig::validate() const {
  if (sample_volume < 1) {
    throw Error(ErrorKind::InvalidArgument, "sample volume must be >= 1");
  }
  if (replications < 1) {
    throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
  }
}

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t draw_binomial(std::uint64_t trials, double p,
                            SampleStream& stream) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<long long> dist(static_cast<long long>(trials),
                                             p);
  return static_cast<std::uint64_t>(dist(stream));
}

SimplexPoint frequencies(const Counts& c, std::uint64_t n) {
  const double dn = static_cast<double>(n);
  return SimplexPoint({static_cast<double>(c[0]) / dn,
                       static_cast<double>(c[1]) / dn,
                       static_cast<double>(c[2]) / dn},
                      detail::Trusted{});
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed,
                                 std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(~index));
}

SampleStream make_stream(std::uint64_t seed, std::uint64_t index) {
  return SampleStream(derive_stream_seed(seed, index));
}

Counts draw_multinomial(const Triple& q, std::uint64_t n,
                        SampleStream& stream) {
  Counts c{};
  c[0] = draw_binomial(n, q[0], stream);
  const std::uint64_t rest = n - c[0];
  const double tail = q[1] + q[2];
  c[1] = draw_binomial(rest, tail > 0.0 ? q[1] / tail : 0.0, stream);
  c[2] = rest - c[1];
  return c;
}

SimplexPoint stochastic_step(const DirectingParams& params,
                             const SimplexPoint& freq, std::uint64_t n,
                             SampleStream& stream) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidArgument, "sample volume must be >= 1");
  }
  const SimplexPoint target = step_clamped(params, freq);
  return frequencies(draw_multinomial(target.values(), n, stream), n);
}

std::vector<EmpiricalTrajectory> run_replications(const DirectingParams& params,
                                                  const SimplexPoint& init,
                                                  const SampleConfig& cfg,
                                                  std::size_t threads) {
  cfg.validate();
  std::vector<EmpiricalTrajectory> runs(cfg.replications);
  parallel_for(cfg.replications, threads, [&](std::size_t r) {
    EmpiricalTrajectory& run = runs[r];
    run.replication = r;
    run.seed = cfg.seed;
    run.stream_seed = derive_stream_seed(cfg.seed, r);
    run.sample_volume = cfg.sample_volume;
    run.states.reserve(cfg.steps + 1);
    run.counts.reserve(cfg.steps);
    run.states.push_back(init);

    SampleStream stream(run.stream_seed);
    for (std::size_t k = 1; k <= cfg.steps; ++k) {
      try {
        const SimplexPoint target = step_clamped(params, run.states.back());
        run.counts.push_back(
            draw_multinomial(target.values(), cfg.sample_volume, stream));
      } catch (const Error& e) {
        run.error = std::string(e.what()) + " (step " + std::to_string(k) + ")";
        return;
      }
      run.states.push_back(frequencies(run.counts.back(), cfg.sample_volume));
    }
  });
  return runs;
}

double max_deviation(const EmpiricalTrajectory& run,
                     const std::vector<SimplexPoint>& reference) {
  const std::size_t len = std::min(run.states.size(), reference.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t m = 0; m < 3; ++m) {
      worst = std::max(worst, std::abs(run.states[k][m] - reference[k][m]));
    }
  }
  return worst;
}

std::vector<DeviationRow> lln_diagnostic(const DirectingParams& params,
                                         const SimplexPoint& init,
                                         const std::vector<std::uint64_t>& volumes,
                                         const SampleConfig& base,
                                         std::size_t threads) {
  if (volumes.empty()) {
    throw Error(ErrorKind::InvalidArgument, "no sample volumes given");
  }
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (volumes[i] < 1 || (i > 0 && volumes[i] <= volumes[i - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  "sample volumes must be positive and strictly increasing");
    }
  }
  const auto reference = trajectory_clamped(params, init, base.steps);

  std::vector<DeviationRow> table;
  table.reserve(volumes.size());
  for (const std::uint64_t n : volumes) {
    SampleConfig cfg = base;
    cfg.sample_volume = n;
    const auto runs = run_replications(params, init, cfg, threads);

    std::vector<double> devs;
    devs.reserve(runs.size());
    for (const auto& run : runs) {
      if (run.ok()) devs.push_back(max_deviation(run, reference));
    }
    DeviationRow row;
    row.n = n;
    row.replications = devs.size();
    if (devs.empty()) {
      row.median_max_deviation = std::numeric_limits<double>::quiet_NaN();
    } else {
      std::sort(devs.begin(), devs.end());
      const std::size_t mid = devs.size() / 2;
      row.median_max_deviation = devs.size() % 2 == 1
                                     ? devs[mid]
                                     : 0.5 * (devs[mid - 1] + devs[mid]);
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace tse
