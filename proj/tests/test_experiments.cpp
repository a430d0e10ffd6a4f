#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hlab/experiments.hpp"
#include "hlab/special_fn.hpp"

using namespace hlab;

TEST(Table, FormattingAndCsv) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(-kInf), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  Table t;
  t.columns = {"a", "b"};
  t.add_row({"1", "x"});
  t.add_row({format_number(2.5), "y"});
  std::ostringstream os;
  t.write_csv(os);
  EXPECT_EQ(os.str(), "a,b\n1,x\n2.5,y\n");
  EXPECT_THROW(t.add_row({"only one"}), std::exception);
}

TEST(Checks, PassRule) {
  EXPECT_TRUE(make_check("eq", 1.0, 1.0).pass);
  EXPECT_TRUE(make_check("lt", 0.5, 1.0).pass);
  EXPECT_FALSE(make_check("gt", 1.5, 1.0).pass);
  EXPECT_FALSE(make_check("nan", std::nan(""), 1.0).pass);
  EXPECT_FALSE(make_check("inf", kInf, kInf).pass);
}

TEST(Checks, MergeAndPassed) {
  ExperimentResult a;
  a.kind = "a";
  a.checks.push_back(make_check("x", 0.0, 1.0));
  EXPECT_TRUE(a.passed());
  ExperimentResult b;
  b.kind = "b";
  b.checks.push_back(make_check("y", 2.0, 1.0));
  b.metrics.emplace_back("m", 3.0);
  a.merge(b);
  EXPECT_EQ(a.checks.size(), 2u);
  EXPECT_EQ(a.metrics.size(), 1u);
  EXPECT_FALSE(a.passed());
}

TEST(FiniteDifferences, HeisenbergSublaplacianOnAPolynomial) {
  // (X^2 + Y^2)(x^2 + y t) = 2 + x, so L f = -(2 + x).
  const Grid hz = Grid::uniform(2, 2.0, 16);
  const Grid ct = Grid::uniform(1, 2.0, 16);
  std::vector<cd> v(hz.size() * ct.size());
  for (std::size_t c = 0; c < ct.size(); ++c) {
    const double t = ct.node(0, static_cast<int>(c));
    for (std::size_t i = 0; i < hz.size(); ++i) {
      const auto z = hz.coords(i);
      v[c * hz.size() + i] = z[0] * z[0] + z[1] * t;
    }
  }
  const CylinderField f = CylinderField::dense(hz, ct, v);
  const CylinderField lf = heisenberg_sublaplacian_fd(f);
  double worst = 0.0;
  for (int c = 2; c < 14; ++c) {
    for (int a = 2; a < 14; ++a) {
      for (int b = 2; b < 14; ++b) {
        const std::size_t i = static_cast<std::size_t>(a) * 16 + b;
        worst = std::max(worst, std::abs(lf.at(c, i) + 2.0 + hz.node(0, a)));
      }
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(FiniteDifferences, MetivierStencilReducesToHeisenberg) {
  const auto st = MetivierStructure::heisenberg_1();
  auto u = [](std::span<const double> v, std::span<const double> z) { return cd(v[0] * v[0] + v[1] * z[0]); };
  for (auto [x, y, t] : {std::tuple{0.3, -0.7, 0.2}, {1.5, 0.4, -2.0}}) {
    const double v[2] = {x, y};
    const double z[1] = {t};
    EXPECT_NEAR(std::abs(metivier_sublaplacian_fd(st, u, v, z, 0.1) + 2.0 + x), 0.0, 1e-9);
  }
}

TEST(Series, ThresholdMatchesLemma) {
  for (double p : {1.0, 1.1, 1.2, 1.5, 2.0}) {
    for (double q : {2.0, 3.0, 6.0, 10.0, kInf}) {
      for (int n : {1, 2}) {
        const double a = series_threshold(p, q, n);
        EXPECT_TRUE(series_converges(p, q, n, a - 1e-6)) << p << " " << q << " " << n;
        EXPECT_FALSE(series_converges(p, q, n, a + 1e-6)) << p << " " << q << " " << n;
      }
    }
  }
}

TEST(Runners, SeriesTableIsDeterministic) {
  SeriesConfig cfg;
  cfg.samples = 20;
  const ExperimentResult a = run_series_table(cfg);
  const ExperimentResult b = run_series_table(cfg);
  EXPECT_TRUE(a.passed());
  std::ostringstream sa;
  std::ostringstream sb;
  a.table.write_csv(sa);
  b.table.write_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(a.table.rows.empty());
}

TEST(Runners, D1Equivalence) {
  EquivalenceConfig cfg;
  cfg.points = 24;
  cfg.half_extent = 8.0;
  cfg.central_points = 32;
  EXPECT_TRUE(check_d1_equivalence(cfg).passed());
}

TEST(Runners, RestrictionRangeIsCheckedFirst) {
  MetivierRestrictionConfig cfg = MetivierRestrictionConfig::defaults();
  MetivierRestrictionCase bad;
  bad.structure = "heisenberg_1";
  bad.exps = {2.0, 1.0, 2.0};
  cfg.cases.push_back(bad);
  EXPECT_THROW(run_metivier_restriction(cfg), RangeError);
  EXPECT_THROW(resolve_structure("/nonexistent/structure.json"), std::exception);
  EXPECT_EQ(resolve_structure("complex_heisenberg").d, 2);
}
