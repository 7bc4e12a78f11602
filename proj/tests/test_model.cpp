#include <gtest/gtest.h>

#include <cmath>

#include "lorenz/model.hpp"
#include "oracles.hpp"

using namespace lorenz;

TEST(LorenzMap, BranchValues) {
  const LorenzMap1D f(1.0, 1.7);
  EXPECT_NEAR(f(0.5), -0.15, 1e-15);
  EXPECT_NEAR(f(-0.5), 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(f(1.0), 0.7);
  EXPECT_DOUBLE_EQ(f(-1.0), -0.7);
}

TEST(LorenzMap, FractionalExponentAgreesWithHighPrecision) {
  const LorenzMap1D f(0.75, 1.9);
  for (double x : {1e-4, 0.3, -0.7, -1e-6, 0.999}) {
    const double ref = static_cast<double>(oracle::f_big(oracle::Big(x), 0.75, 1.9));
    EXPECT_NEAR(f(x), ref, 1e-14) << x;
  }
  EXPECT_NEAR(f(1e-4), -1.0 + 1.9 * std::pow(1e-4, 0.75), 1e-15);
  EXPECT_NEAR(f(1e-4), -0.998, 1e-3);
}

TEST(LorenzMap, DomainErrors) {
  const LorenzMap1D f;
  for (double x : {0.0, 1.5, -1.0000001, static_cast<double>(NAN)}) {
    try {
      f(x);
      FAIL() << "accepted x = " << x;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
  }
}

TEST(LorenzMap, StrictlyIncreasingOnEachBranch) {
  for (auto [a, b] : {std::pair{1.0, 1.7}, {0.75, 1.9}, {0.9, 1.99}}) {
    const LorenzMap1D f(a, b);
    for (Symbol s : {Symbol::L, Symbol::R}) {
      const Interval d = LorenzMap1D::branch_domain(s);
      double prev = -INFINITY;
      for (int i = 1; i < 10000; ++i) {
        const double x = d.lo + d.length() * i / 10000.0;
        const double y = f(x);
        ASSERT_GT(y, prev) << "alpha=" << a << " x=" << x;
        prev = y;
      }
    }
  }
}

TEST(LorenzMap, InversesCompose) {
  for (auto [a, b] : {std::pair{1.0, 1.7}, {0.75, 1.9}}) {
    const LorenzMap1D f(a, b);
    for (Symbol s : {Symbol::L, Symbol::R}) {
      const Interval img = f.branch_image(s);
      for (int i = 1; i < 1000; ++i) {
        const double y = img.lo + img.length() * i / 1000.0;
        const double x = f.inverse(s, y);
        ASSERT_NEAR(f(x), y, 1e-12);
        ASSERT_EQ(x < 0.0, s == Symbol::L);
      }
    }
  }
}

TEST(LorenzMap, Derivative) {
  const LorenzMap1D f(0.75, 1.9);
  for (double x : {0.1, 0.5, -0.3, 0.99}) {
    const double h = 1e-7;
    EXPECT_NEAR(f.derivative(x), (f(x + h) - f(x - h)) / (2 * h), 1e-6);
    EXPECT_GE(f.derivative(x), f.min_expansion() - 1e-12);
  }
}

TEST(ReturnMap, FiberIsAffineContraction) {
  const SkewProductReturnMap P(LorenzMap1D(1.0, 1.7), 0.3, 0.5);
  for (double x : {-0.9, -0.2, 0.01, 0.6}) {
    for (double y1 : {-1.0, -0.3, 0.4}) {
      for (double y2 : {-0.8, 0.0, 1.0}) {
        const double d = std::abs(P.fiber(x, y1) - P.fiber(x, y2));
        EXPECT_LE(d, 0.3 * std::abs(y1 - y2) + 1e-15);
        EXPECT_NEAR(d, 0.3 * std::abs(x) * std::abs(y1 - y2), 1e-15);
      }
      EXPECT_LT(P.fiber(x, y1) * x, 0.0);  // sign axiom
    }
  }
}

TEST(Validate, DefaultModelPasses) {
  const auto rep = validate_model(SkewProductReturnMap(LorenzMap1D(1.0, 1.7), 0.3, 0.5), 2000);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass()) << c.name;
  EXPECT_TRUE(rep.all_pass());
}

TEST(Validate, SlowExpansionFails) {
  const auto rep = validate_model(SkewProductReturnMap(LorenzMap1D(1.0, 1.3), 0.3, 0.5), 1000);
  EXPECT_FALSE(rep.all_pass());
  ASSERT_NE(rep.find("expansion"), nullptr);
  EXPECT_FALSE(rep.find("expansion")->pass());
  EXPECT_TRUE(rep.find("range")->pass());
}

TEST(Validate, SmallAlphaFailsAtTheEndpoint) {
  const auto rep = validate_model(SkewProductReturnMap(LorenzMap1D(0.5, 1.9), 0.3, 0.5), 1000);
  const auto* e = rep.find("expansion");
  ASSERT_NE(e, nullptr);
  EXPECT_FALSE(e->analytic_pass);
  EXPECT_NEAR(e->measured, 0.95, 1e-9);
}

TEST(Validate, FiberSignNeedsCHAboveRho) {
  const auto rep = validate_model(SkewProductReturnMap(LorenzMap1D(1.0, 1.7), 0.3, 0.2), 1000);
  EXPECT_FALSE(rep.find("fiber_sign")->pass());
}

TEST(Validate, StableUnderRefinement) {
  for (auto beta : {1.3, 1.5, 1.7, 1.95, 2.05}) {
    for (auto alpha : {0.5, 0.8, 1.0}) {
      const SkewProductReturnMap P(LorenzMap1D(alpha, beta), 0.3, 0.5);
      const auto a = validate_model(P, 100), b = validate_model(P, 10000);
      ASSERT_EQ(a.checks.size(), b.checks.size());
      for (std::size_t i = 0; i < a.checks.size(); ++i)
        EXPECT_EQ(a.checks[i].pass(), b.checks[i].pass()) << a.checks[i].name << " alpha=" << alpha << " beta=" << beta;
    }
  }
}

TEST(Roof, ClosedForms) {
  EXPECT_DOUBLE_EQ(RoofFunction(1, 0, 0.5)(0.0001), 1.0);
  EXPECT_DOUBLE_EQ(RoofFunction(1, 0, 0.5)(-0.9), 1.0);
  EXPECT_DOUBLE_EQ(RoofFunction(1, 1, 0.5)(0.5), 1.0);
  EXPECT_NEAR(RoofFunction(1, 1, 0.5)(0.05), 1.0 + std::log(10.0), 1e-14);
  EXPECT_NEAR(RoofFunction(1, 1, 0.5)(0.05), 3.3026, 1e-4);
}

TEST(Roof, DwellBoundedByRoof) {
  const RoofFunction r(1.0, 1.0, 0.05);
  for (double x : {1e-9, 1e-4, 0.01, 0.049, 0.2, -0.003}) {
    for (double b : {0.05, 0.1, 0.2, 0.5}) {
      const double d = r.dwell(x, b);
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, r(x) - r.c0() + 1e-15);
      if (b >= r.eta0()) {
        EXPECT_NEAR(d, std::clamp(std::max(0.0, -std::log(std::abs(x) / b)), 0.0, r(x) - 1.0), 1e-14);
      }
    }
  }
}

TEST(Roof, DwellLogIntegralMatchesQuadrature) {
  const RoofFunction r(1.0, 1.5, 0.05);
  for (double x : {1e-6, 0.003, 0.04, 0.07, -0.12}) {
    const double b1 = 0.1, b2 = 0.2;
    const int n = 20000;
    double q = 0.0;
    const double u1 = std::log(b1), u2 = std::log(b2), h = (u2 - u1) / n;
    for (int i = 0; i < n; ++i) q += r.dwell(x, std::exp(u1 + (i + 0.5) * h)) * h;
    EXPECT_NEAR(r.dwell_log_integral(x, b1, b2), q, 1e-8) << x;
  }
}

TEST(Roof, SingularLineRejected) {
  const RoofFunction r;
  EXPECT_THROW(r(0.0), Error);
  EXPECT_THROW(r.dwell(0.0, 0.1), Error);
}
