#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "fibertrap/errors.hpp"
#include "fibertrap/figures.hpp"

using namespace fibertrap;
using namespace fibertrap::figures;

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(num(1.0), "1");
  EXPECT_EQ(num(0.1234567), "0.123457");
  EXPECT_EQ(num(1.5e-9), "1.5e-09");
  EXPECT_EQ(num(NAN), "nan");
  EXPECT_EQ(num(INFINITY), "inf");
}

TEST(Csv, CommentsHeaderRows) {
  Table t;
  t.name = "t";
  t.comments = {"a=1"};
  t.columns = {"x", "y"};
  t.add_row({"1", "2"});
  EXPECT_EQ(to_csv(t), "# a=1\nx,y\n1,2\n");
}

TEST(Figures, UnknownIdListsValidIds) {
  try {
    (void)reproduce("9z", config::Config{});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("9z"), std::string::npos);
    for (const auto& id : figure_ids()) EXPECT_NE(msg.find(id), std::string::npos) << id;
  }
  EXPECT_TRUE(is_figure_id("6d"));
  EXPECT_FALSE(is_figure_id("6g"));
}

TEST(Figures, LumpedPanelsAreDeterministic) {
  const config::Config cfg;
  for (const char* id : {"2c", "2d", "3f", "4c", "5", "7a", "7b", "7c"}) {
    const auto a = to_csv(reproduce(id, cfg));
    const auto b = to_csv(reproduce(id, cfg, {.jobs = 4}));
    EXPECT_EQ(a, b) << id;
    EXPECT_GT(a.size(), 20u) << id;
  }
}

TEST(Figures, CombPanelHasOneColumnPerWidth) {
  const auto t = reproduce("3f", config::Config{});
  EXPECT_EQ(t.columns.size(), 5u);
  EXPECT_EQ(t.rows.size(), 61u);
  EXPECT_EQ(t.rows.front()[0], "0");
}

TEST(Figures, CavityPanelDefaultsSpanLengths) {
  const auto t = reproduce("7c", config::Config{});
  EXPECT_EQ(t.rows.size(), default_cavity_lengths().size());
}

TEST(Figures, CompensationDeltasAreSingleAxis) {
  const auto d = compensation_deltas({-1.0, 1.0});
  ASSERT_EQ(d.size(), 6u);
  for (const auto& v : d) {
    int nonzero = 0;
    for (double x : v) nonzero += x != 0.0;
    EXPECT_EQ(nonzero, 1);
  }
}

TEST(Figures, CompensationZeroRowsKeepTheirAxis) {
  std::vector<trap::CompensationPoint> pts;
  for (const auto& d : compensation_deltas({-1.0, 0.0, 1.0})) {
    trap::CompensationPoint p;
    p.delta = d;
    for (int a = 0; a < 3; ++a) p.displacement[a] = 2e-6 * d[a];
    pts.push_back(p);
  }
  const auto t = compensation_table(pts, "comp");
  ASSERT_EQ(t.rows.size(), 9u);
  for (std::size_t n = 0; n < 9; ++n) EXPECT_EQ(t.rows[n][0], std::string(1, "xyz"[n / 3])) << n;
  const auto fit = trap::fit_compensation(pts);
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(fit.sensitivity[a], 2e-6, 1e-18);
    EXPECT_DOUBLE_EQ(fit.r_squared[a], 1.0);
  }
}
