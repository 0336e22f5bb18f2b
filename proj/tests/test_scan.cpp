#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "geomphase/export.hpp"
#include "geomphase/scan.hpp"

namespace gp = geomphase;

namespace {

gp::SweepSpec css_igp_spec(double theta_f = 0.75 * gp::pi) {
  gp::SweepSpec s;
  s.quantity = gp::Quantity::igp;
  s.family = gp::Family::css;
  s.method = gp::Method::closed_form;
  s.theta_f = theta_f;
  s.range = {0.05, 5.0, 120, gp::Spacing::linear};
  return s;
}

std::string csv_of(const gp::PhaseScan& scan) {
  std::ostringstream os;
  gp::write(scan, gp::Format::csv, os);
  return os.str();
}

}  // namespace

TEST(AxisRange, EndpointsAreExact) {
  const auto lin = gp::AxisRange{0.1, 0.7, 7, gp::Spacing::linear}.values();
  EXPECT_EQ(lin.front(), 0.1);
  EXPECT_EQ(lin.back(), 0.7);
  EXPECT_NEAR(lin[3], 0.4, 1e-15);
  const auto lg = gp::AxisRange{0.05, 20.0, 5, gp::Spacing::log}.values();
  EXPECT_EQ(lg.front(), 0.05);
  EXPECT_EQ(lg.back(), 20.0);
  EXPECT_NEAR(lg[2], 1.0, 1e-12);
}

TEST(Validate, RejectsBadSpecs) {
  auto s = css_igp_spec();
  s.range = {1.0, 0.5, 10, gp::Spacing::linear};
  EXPECT_THROW(gp::sweep(s), gp::invalid_spec_error);
  s.range = {0.1, 0.5, 1, gp::Spacing::linear};
  EXPECT_THROW(gp::sweep(s), gp::invalid_spec_error);
  s.range = {0.0, 0.5, 4, gp::Spacing::log};
  EXPECT_THROW(gp::sweep(s), gp::invalid_spec_error);
  s.range = {1e-4, 0.5, 4, gp::Spacing::linear};
  EXPECT_THROW(gp::sweep(s), gp::invalid_spec_error);

  gp::SweepSpec u;
  u.family = gp::Family::one_axis;
  u.j = gp::SpinJ(2);
  u.method = gp::Method::closed_form;
  EXPECT_THROW(gp::sweep(u), gp::invalid_spec_error);

  auto e = css_igp_spec();
  e.axis = gp::Axis::endpoint;
  e.range = {0.0, gp::pi, 5, gp::Spacing::linear};
  EXPECT_THROW(gp::sweep(e), gp::invalid_spec_error);
}

TEST(Validate, RankFloorAndPoleAreNumericalFailures) {
  gp::SweepSpec s;
  s.range = {0.002, 0.1, 2, gp::Spacing::linear};
  EXPECT_THROW(gp::sweep(s), gp::numerical_error);
  s.range = {0.5, 1.0, 2, gp::Spacing::linear};
  s.theta = gp::pi;
  EXPECT_THROW(gp::sweep(s), gp::numerical_error);
}

TEST(Sweep, CoherentIgpHasOneJumpAtKnownTemperature) {
  const auto scan = gp::sweep(css_igp_spec());
  ASSERT_EQ(scan.jumps.size(), 1u);
  const auto& j = scan.jumps.front();
  const double tc = 0.408421;
  EXPECT_LE(j.axis_value_lo, tc);
  EXPECT_GE(j.axis_value_hi, tc);
  EXPECT_NEAR(j.magnitude, gp::pi, 1e-9);
  EXPECT_TRUE(gp::sweep(css_igp_spec(0.25 * gp::pi)).jumps.empty());
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  auto s = css_igp_spec();
  s.solver.threads = 1;
  const std::string one = csv_of(gp::sweep(s));
  s.solver.threads = 4;
  EXPECT_EQ(one, csv_of(gp::sweep(s)));
  EXPECT_EQ(one, csv_of(gp::sweep(s)));

  gp::SweepSpec u;
  u.range = {0.2, 0.6, 6, gp::Spacing::linear};
  u.solver.n_steps = 256;
  u.solver.threads = 1;
  const std::string a = csv_of(gp::sweep(u));
  u.solver.threads = 3;
  EXPECT_EQ(a, csv_of(gp::sweep(u)));
}

TEST(Sweep, VanishingTraceIsFlaggedCritical) {
  auto s = css_igp_spec();
  s.axis = gp::Axis::endpoint;
  s.temperature = 1.0;
  const double root = 2.0 * std::atan(std::sqrt(std::cosh(1.0)));
  s.range = {root, 2.5, 2, gp::Spacing::linear};
  const auto scan = gp::sweep(s);
  EXPECT_EQ(scan.rows[0].flag, gp::Flag::critical);
  EXPECT_TRUE(std::isnan(scan.rows[0].phase));
  EXPECT_EQ(scan.rows[1].flag, gp::Flag::ok);
  const std::string csv = csv_of(scan);
  EXPECT_NE(csv.find(",nan,"), std::string::npos);
  EXPECT_NE(csv.find(",critical\n"), std::string::npos);
}

TEST(Sweep, UnconvergedTrotterRowsAreFlagged) {
  gp::SweepSpec s;
  s.theta = 1.0;
  s.range = {0.3, 0.4, 2, gp::Spacing::linear};
  s.solver.n_steps = 16;
  s.solver.tolerance = 1e-14;
  const auto scan = gp::sweep(s);
  for (const auto& r : scan.rows) {
    EXPECT_EQ(r.flag, gp::Flag::unconverged);
    EXPECT_FALSE(std::isnan(r.phase));
  }
}

TEST(JumpDetection, BracketsSpanFlaggedRows) {
  std::vector<gp::PointResult> rows(4);
  rows[0] = {0.0, 0.1, 1.0, gp::Flag::ok};
  rows[1] = {1.0, std::nan(""), 0.0, gp::Flag::critical};
  rows[2] = {2.0, 0.1 - gp::pi, 1.0, gp::Flag::ok};
  rows[3] = {3.0, 0.2 - gp::pi, 1.0, gp::Flag::ok};
  const auto jumps = gp::detect_jumps(rows, 0.5 * gp::pi);
  ASSERT_EQ(jumps.size(), 1u);
  EXPECT_EQ(jumps[0].axis_value_lo, 0.0);
  EXPECT_EQ(jumps[0].axis_value_hi, 2.0);
  // A wrap across the branch cut is not a jump.
  std::vector<gp::PointResult> wrap = {{0.0, gp::pi - 0.01, 1.0, gp::Flag::ok},
                                       {1.0, -gp::pi + 0.01, 1.0, gp::Flag::ok}};
  EXPECT_TRUE(gp::detect_jumps(wrap, 0.5 * gp::pi).empty());
}

TEST(FindCritical, IndependentOfBracket) {
  const auto s = css_igp_spec();
  const auto a = gp::find_critical(s, 0.3, 0.5);
  const auto b = gp::find_critical(s, 0.38, 0.9);
  EXPECT_LE(a.hi - a.lo, 1e-4);
  EXPECT_NEAR(a.estimate(), b.estimate(), 1e-4);
  EXPECT_NEAR(a.estimate(), 0.408421, 1e-4);
  EXPECT_THROW(gp::find_critical(s, 0.5, 0.9), gp::invalid_spec_error);
}

TEST(FindCritical, OneAxisIgpAlongEndpoint) {
  gp::SweepSpec s;
  s.quantity = gp::Quantity::igp;
  s.family = gp::Family::one_axis;
  s.j = gp::SpinJ(2);
  s.method = gp::Method::closed_form;
  s.axis = gp::Axis::endpoint;
  for (double t : {0.2, 0.8, 3.0}) {
    s.temperature = t;
    const auto r = gp::find_critical(s, 5.0, 9.0, 1e-8);
    EXPECT_NEAR(r.estimate(), gp::critical_theta_one_axis(t), 1e-7);
  }
}

TEST(Grid, RowMatchesSweep) {
  gp::GridSpec g;
  g.base.quantity = gp::Quantity::igp;
  g.base.family = gp::Family::one_axis;
  g.base.j = gp::SpinJ(2);
  g.base.method = gp::Method::closed_form;
  g.temperatures = {0.2, 2.0, 4, gp::Spacing::linear};
  g.endpoints = {0.0, 4.0 * gp::pi, 9, gp::Spacing::linear};
  const auto grid = gp::grid(g);
  ASSERT_EQ(grid.cells.size(), 36u);
  for (std::size_t ti = 0; ti < grid.temperatures.size(); ++ti) {
    const auto scan = gp::sweep(gp::grid_row_spec(g, grid.temperatures[ti]));
    for (std::size_t ei = 0; ei < grid.endpoints.size(); ++ei) {
      const auto& a = grid.at(ti, ei);
      const auto& b = scan.rows[ei];
      EXPECT_EQ(a.flag, b.flag);
      EXPECT_EQ(gp::format_phase(a.phase), gp::format_phase(b.phase));
    }
  }
}

TEST(Grid, CoherentIgpJumpsOnlyPastQuarterTurn) {
  gp::GridSpec g;
  g.base = css_igp_spec();
  g.temperatures = {0.05, 5.0, 30, gp::Spacing::linear};
  g.endpoints = {0.05, 0.95 * gp::pi, 24, gp::Spacing::linear};
  const auto grid = gp::grid(g);
  bool any = false;
  for (const auto& j : grid.jumps) {
    if (j.along == gp::Axis::temperature) {
      EXPECT_GT(j.fixed, 0.5 * gp::pi);
      any = true;
    }
  }
  EXPECT_TRUE(any);
}

TEST(Export, CsvLayout) {
  auto s = css_igp_spec();
  s.range = {0.1, 1.0, 3, gp::Spacing::linear};
  const std::string csv = csv_of(gp::sweep(s));
  EXPECT_EQ(csv.rfind("# geomphase-scan v1\naxis,phase,trace_mag,flag\n", 0), 0u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double phase = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(phase, 0.0);
    EXPECT_LT(phase, gp::two_pi);
  }
  EXPECT_EQ(rows, 3);
}

TEST(Export, NumberFormatting) {
  EXPECT_EQ(gp::format_number(0.1), "0.1");
  EXPECT_EQ(gp::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(gp::format_number(-0.0), "0");
  EXPECT_EQ(gp::format_phase(-gp::pi / 2), "4.71238898038");
  EXPECT_EQ(gp::format_phase(-1e-14), "0");
  EXPECT_EQ(gp::format_phase(std::nan("")), "nan");
}

TEST(Export, JsonLayout) {
  auto s = css_igp_spec();
  s.range = {0.1, 1.0, 4, gp::Spacing::linear};
  const auto j = gp::to_json(gp::sweep(s));
  EXPECT_EQ(j["axis"].size(), 4u);
  EXPECT_EQ(j["phase"].size(), 4u);
  EXPECT_EQ(j["flags"].size(), 4u);
  EXPECT_EQ(j["spec"]["family"], "css");
  ASSERT_EQ(j["jumps"].size(), 1u);
  EXPECT_TRUE(j["jumps"][0].contains("lo"));
  EXPECT_TRUE(j["jumps"][0].contains("magnitude"));

  gp::GridSpec g;
  g.base = css_igp_spec();
  g.temperatures = {0.2, 1.0, 2, gp::Spacing::linear};
  g.endpoints = {0.5, 2.5, 2, gp::Spacing::linear};
  const auto gj = gp::to_json(gp::grid(g));
  EXPECT_EQ(gj["axis"][0].size(), 2u);
  EXPECT_EQ(gj["axis"][1].size(), 2u);
  EXPECT_EQ(gj["phase"].size(), 4u);
}

TEST(Export, NanEncodedAsString) {
  auto s = css_igp_spec();
  s.axis = gp::Axis::endpoint;
  s.temperature = 1.0;
  s.range = {2.0 * std::atan(std::sqrt(std::cosh(1.0))), 2.5, 2, gp::Spacing::linear};
  const auto j = gp::to_json(gp::sweep(s));
  EXPECT_EQ(j["phase"][0], "nan");
  EXPECT_EQ(j["flags"][0], "critical");
}

TEST(Export, UnwritablePathIsIoError) {
  auto s = css_igp_spec();
  s.range = {0.1, 1.0, 2, gp::Spacing::linear};
  EXPECT_THROW(gp::write(gp::sweep(s), gp::Format::csv, std::string("/nonexistent/dir/x.csv")), gp::io_error);
}
