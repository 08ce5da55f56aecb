#include <gtest/gtest.h>

#include <cstring>
#include <json.hpp>

#include "support/oracles.hpp"
#include "tse/table_io.hpp"

using namespace tse;

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.45), "0.45");
  EXPECT_EQ(format_double(1.0 / 3), "0.3333333333333333");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(format_double(0.0), "0");

  tse::testing::Gen gen(41);
  for (int i = 0; i < 5000; ++i) {
    const double x = gen.uniform(-1, 1) * std::pow(10.0, gen.uniform(-20, 20));
    const std::string text = format_double(x);
    const auto back = parse_double(text);
    ASSERT_TRUE(back.has_value()) << text;
    ASSERT_EQ(std::memcmp(&x, &*back, sizeof x), 0) << text;
    ASSERT_EQ(format_double(*back), text);
  }
}

TEST(ParseDouble, RejectsTrailingGarbage) {
  EXPECT_FALSE(parse_double("").has_value());
  EXPECT_FALSE(parse_double("1.0x").has_value());
  EXPECT_FALSE(parse_double("abc").has_value());
  EXPECT_EQ(*parse_double("+0.5"), 0.5);
  EXPECT_EQ(*parse_double("-1e-3"), -1e-3);
}

TEST(Csv, QuotesOnlyWhenNeeded) {
  CsvTable t{{"a", "b"}, {{"x,y", "say \"hi\""}, {"plain", ""}}};
  const std::string text = to_csv(t);
  EXPECT_EQ(text, "a,b\n\"x,y\",\"say \"\"hi\"\"\"\nplain,\n");
  EXPECT_EQ(parse_csv(text), t);
}

TEST(Csv, LibraryTablesRoundTripByteForByte) {
  const auto traj = trajectory(DirectingParams(-0.2, 0.5, -0.4),
                               RawState(0.5, 0.25, 0.25), 40, StepMode::Raw);
  SweepOptions opt;
  opt.simulate = true;
  const auto rows = sweep(
      ParameterGrid::cartesian(ValueRange::parse("-1:1:0.5"),
                               ValueRange::parse("-1:1:0.5"),
                               ValueRange::single(0.3)),
      opt);
  for (const CsvTable& t : {trajectory_table(traj), sweep_table(rows)}) {
    const std::string text = to_csv(t);
    const CsvTable parsed = parse_csv(text);
    EXPECT_EQ(to_csv(parsed), text);
    // Numeric cells survive a value round trip as well.
    for (const auto& row : parsed.rows) {
      for (const auto& cell : row) {
        if (const auto d = parse_double(cell)) {
          EXPECT_EQ(format_double(*d), cell);
        }
      }
    }
  }
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv(""), Error);
  EXPECT_THROW(parse_csv("a,b\n1\n"), Error);
  EXPECT_THROW(parse_csv("a\n\"open\n"), Error);
}

TEST(Csv, AcceptsMissingFinalNewline) {
  const auto t = parse_csv("k,p0\n0,0.5");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "0.5");
}

TEST(Json, FieldsKeepColumnOrderAndTypes) {
  CsvTable t{{"n", "x", "label", "missing"}, {{"100", "0.25", "agree", ""}}};
  const auto j = nlohmann::ordered_json::parse(to_json(t));
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 1u);
  const auto& row = j[0];
  EXPECT_EQ(row.begin().key(), "n");
  EXPECT_TRUE(row["n"].is_number_integer());
  EXPECT_EQ(row["x"].get<double>(), 0.25);
  EXPECT_EQ(row["label"], "agree");
  EXPECT_TRUE(row["missing"].is_null());
}

TEST(Tables, ColumnSets) {
  EXPECT_EQ(trajectory_table({}).header,
            (std::vector<std::string>{"k", "p0", "p1", "p2"}));
  EXPECT_EQ(sweep_table({}).header,
            (std::vector<std::string>{"v0", "v1", "v2", "coordinate", "rho_m",
                                      "v_m", "scenario", "predicted_limit",
                                      "contraction_factor", "simulated_limit",
                                      "agreement", "flags"}));
  EXPECT_EQ(replication_table({}).header,
            (std::vector<std::string>{"replication", "k", "p0", "p1", "p2"}));
  EXPECT_EQ(deviation_table({}).header,
            (std::vector<std::string>{"n", "median_max_deviation",
                                      "replications"}));
}
