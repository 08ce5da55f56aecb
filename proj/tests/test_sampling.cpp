#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tse/sampling.hpp"
#include "tse/table_io.hpp"

using namespace tse;

namespace {

const DirectingParams kSymmetric(0.1, 0.1, 0.1);
const SimplexPoint kInit(0.5, 0.3, 0.2);

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected tse::Error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(StochasticStep, DegenerateTargetIsReproducedExactly) {
  // (1,0,0) maps to itself under the clamped step when v0 < 0.
  const DirectingParams p(-0.2, 0.5, -0.4);
  auto stream = make_stream(1, 0);
  for (std::uint64_t n : {1u, 7u, 1000u}) {
    EXPECT_EQ(stochastic_step(p, SimplexPoint(1, 0, 0), n, stream),
              SimplexPoint(1, 0, 0));
  }
}

TEST(StochasticStep, SingleTrialGivesVertexDistributedAsTarget) {
  auto stream = make_stream(2, 0);
  const Triple q{0.45, 0.31, 0.24};
  std::array<int, 3> hits{};
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const auto s = stochastic_step(kSymmetric, kInit, 1, stream);
    const auto v = s.vertex();
    ASSERT_TRUE(v.has_value());
    ++hits[*v];
  }
  for (std::size_t m = 0; m < 3; ++m) {
    const double se = std::sqrt(q[m] * (1 - q[m]) / draws);
    EXPECT_NEAR(hits[m] / double(draws), q[m], 4 * se) << "m = " << m;
  }
}

TEST(StochasticStep, LargeVolumeStaysCloseToTarget) {
  auto stream = make_stream(3, 0);
  for (int i = 0; i < 50; ++i) {
    const auto s = stochastic_step(kSymmetric, kInit, 1000000, stream);
    EXPECT_NEAR(s[0], 0.45, 0.005);
    EXPECT_NEAR(s[1], 0.31, 0.005);
    EXPECT_NEAR(s[2], 0.24, 0.005);
  }
}

TEST(StochasticStep, UnbiasedAtModerateVolume) {
  auto stream = make_stream(4, 0);
  const Triple q{0.45, 0.31, 0.24};
  const int draws = 10000;
  const std::uint64_t n = 100;
  Triple mean{};
  for (int i = 0; i < draws; ++i) {
    const auto s = stochastic_step(kSymmetric, kInit, n, stream);
    for (std::size_t m = 0; m < 3; ++m) mean[m] += s[m] / draws;
  }
  for (std::size_t m = 0; m < 3; ++m) {
    const double se = std::sqrt(q[m] * (1 - q[m]) / (double(n) * draws));
    EXPECT_NEAR(mean[m], q[m], 4 * se) << "m = " << m;
  }
}

TEST(StochasticStep, RejectsZeroVolume) {
  auto stream = make_stream(5, 0);
  EXPECT_EQ(kind_of([&] { stochastic_step(kSymmetric, kInit, 0, stream); }),
            ErrorKind::InvalidArgument);
}

TEST(Multinomial, CountsAlwaysSumToVolume) {
  auto stream = make_stream(6, 0);
  for (std::uint64_t n : {1u, 2u, 3u, 99u, 12345u}) {
    for (const Triple q : {Triple{0.2, 0.3, 0.5}, Triple{0, 0.5, 0.5},
                           Triple{0, 0, 1}, Triple{1, 0, 0}}) {
      const auto c = draw_multinomial(q, n, stream);
      EXPECT_EQ(c[0] + c[1] + c[2], n);
      for (std::size_t m = 0; m < 3; ++m) {
        if (q[m] == 0.0) EXPECT_EQ(c[m], 0u);
      }
    }
  }
}

TEST(Streams, DerivedSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    for (std::uint64_t r = 0; r < 100; ++r) {
      EXPECT_TRUE(seen.insert(derive_stream_seed(seed, r)).second);
    }
  }
  EXPECT_EQ(derive_stream_seed(42, 7), derive_stream_seed(42, 7));
}

TEST(Replications, ShapeAndExactBalance) {
  SampleConfig cfg{.sample_volume = 37, .replications = 3, .seed = 9,
                   .steps = 25};
  const auto runs = run_replications(kSymmetric, kInit, cfg);
  ASSERT_EQ(runs.size(), 3u);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    EXPECT_TRUE(run.ok());
    EXPECT_EQ(run.replication, r);
    EXPECT_EQ(run.stream_seed, derive_stream_seed(9, r));
    ASSERT_EQ(run.states.size(), 26u);
    ASSERT_EQ(run.counts.size(), 25u);
    EXPECT_EQ(run.states[0], kInit);
    for (std::size_t k = 0; k < run.counts.size(); ++k) {
      const auto& c = run.counts[k];
      ASSERT_EQ(c[0] + c[1] + c[2], 37u);
      for (std::size_t m = 0; m < 3; ++m) {
        ASSERT_EQ(run.states[k + 1][m], double(c[m]) / 37.0);
      }
    }
  }
}

TEST(Replications, SeedDeterminismAndIndependence) {
  SampleConfig cfg{.sample_volume = 1000, .replications = 2, .seed = 42,
                   .steps = 10};
  const auto a = run_replications(kSymmetric, kInit, cfg, 1);
  const auto b = run_replications(kSymmetric, kInit, cfg, 4);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_NE(a[0].counts, a[1].counts);
  EXPECT_EQ(to_csv(replication_table(a)), to_csv(replication_table(b)));

  cfg.seed = 43;
  const auto c = run_replications(kSymmetric, kInit, cfg);
  EXPECT_NE(a[0].counts, c[0].counts);
}

TEST(Replications, ZeroStepsKeepInit) {
  SampleConfig cfg{.sample_volume = 10, .replications = 4, .seed = 1,
                   .steps = 0};
  for (const auto& run : run_replications(kSymmetric, kInit, cfg)) {
    ASSERT_EQ(run.states.size(), 1u);
    EXPECT_EQ(run.states[0], kInit);
  }
}

TEST(Replications, InvalidConfig) {
  SampleConfig cfg{.sample_volume = 0, .replications = 1, .seed = 0,
                   .steps = 1};
  EXPECT_EQ(kind_of([&] { run_replications(kSymmetric, kInit, cfg); }),
            ErrorKind::InvalidArgument);
  cfg.sample_volume = 1;
  cfg.replications = 0;
  EXPECT_EQ(kind_of([&] { run_replications(kSymmetric, kInit, cfg); }),
            ErrorKind::InvalidArgument);
}

TEST(LlnDiagnostic, DeterministicTargetsGiveZeroDeviation) {
  const DirectingParams p(-0.2, 0.5, -0.4);
  SampleConfig cfg{.sample_volume = 1, .replications = 5, .seed = 3,
                   .steps = 20};
  const auto table = lln_diagnostic(p, SimplexPoint(1, 0, 0), {1, 10, 100}, cfg);
  ASSERT_EQ(table.size(), 3u);
  for (const auto& row : table) {
    EXPECT_EQ(row.median_max_deviation, 0.0);
    EXPECT_EQ(row.replications, 5u);
  }
}

TEST(LlnDiagnostic, SingleVolumeGivesSingleRow) {
  SampleConfig cfg{.sample_volume = 1, .replications = 3, .seed = 1,
                   .steps = 5};
  const auto table = lln_diagnostic(kSymmetric, kInit, {500}, cfg);
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table[0].n, 500u);
}

TEST(LlnDiagnostic, DeviationShrinksWithVolume) {
  SampleConfig cfg{.sample_volume = 1, .replications = 30, .seed = 2024,
                   .steps = 50};
  const auto table = lln_diagnostic(kSymmetric, kInit, {100, 1000, 10000}, cfg);
  ASSERT_EQ(table.size(), 3u);
  EXPECT_GE(table[0].median_max_deviation, table[1].median_max_deviation);
  EXPECT_GE(table[1].median_max_deviation, table[2].median_max_deviation);
  EXPECT_LT(table[2].median_max_deviation, table[0].median_max_deviation);
}

TEST(LlnDiagnostic, VolumesMustIncrease) {
  SampleConfig cfg;
  EXPECT_EQ(kind_of([&] { lln_diagnostic(kSymmetric, kInit, {}, cfg); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { lln_diagnostic(kSymmetric, kInit, {100, 100}, cfg); }),
            ErrorKind::InvalidArgument);
}

TEST(MaxDeviation, TakesWorstCoordinateAndStage) {
  EmpiricalTrajectory run;
  run.states = {SimplexPoint(0.5, 0.3, 0.2), SimplexPoint(0.4, 0.4, 0.2)};
  const std::vector<SimplexPoint> ref{SimplexPoint(0.5, 0.3, 0.2),
                                      SimplexPoint(0.45, 0.31, 0.24)};
  EXPECT_NEAR(max_deviation(run, ref), 0.09, 1e-15);
}
