// Seeded randomized checks of the invariants. Each test draws its cases
// from a fixed mt19937_64 seed so failures replay exactly.

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "lorenz/lorenz.hpp"
#include "oracles.hpp"

using namespace lorenz;

namespace {

const LorenzMap1D kMap(1.0, 1.7);

double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

std::shared_ptr<const SFTHorseshoe> hs10() {
  static const auto hs = std::make_shared<const SFTHorseshoe>(build_horseshoe(kMap, 10, 0.01));
  return hs;
}

MeasureRep random_markov(std::mt19937_64& g) {
  std::vector<double> w(static_cast<std::size_t>(hs10()->size()));
  for (auto& x : w) x = uniform(g, -2.0, 2.0);
  return MeasureRep(equilibrium_state(hs10(), w));
}

const std::vector<CatalogEntry>& catalog() {
  static const auto c = build_catalog(kMap, CatalogRecipe{});
  return c;
}

}  // namespace

TEST(Properties, BranchMonotoneAndInvertibleForRandomParameters) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 12; ++trial) {
    const double alpha = uniform(g, 0.75, 1.0), beta = uniform(g, 1.45, 2.0);
    const LorenzMap1D f(alpha, beta);
    for (Symbol s : {Symbol::L, Symbol::R}) {
      const Interval d = LorenzMap1D::branch_domain(s);
      double prev = -INFINITY;
      for (int i = 1; i < 10000; ++i) {
        const double x = d.lo + d.length() * i / 10000.0;
        ASSERT_GT(f(x), prev) << alpha << " " << beta;
        prev = f(x);
      }
      const Interval img = f.branch_image(s);
      for (int i = 0; i < 50; ++i) {
        const double y = uniform(g, img.lo, img.hi);
        ASSERT_NEAR(f(f.inverse(s, y)), y, 1e-12);
      }
    }
  }
}

TEST(Properties, CodingConsistencyForRandomSlopes) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 6; ++trial) {
    const LorenzMap1D f(1.0, uniform(g, 1.5, 1.98));
    for (const auto& o : enumerate_periodic(f, 11)) ASSERT_EQ(itinerary_of(f, o.point, o.period()), o.word);
  }
}

TEST(Properties, RandomWordsNest) {
  std::mt19937_64 g(3);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    SymbolWord w = SymbolWord::parse(bit(g) ? "R" : "L");
    CylinderInterval prev = cylinder_interval(kMap, w);
    for (int k = 0; k < 18 && prev.nonempty; ++k) {
      w = w.appended(bit(g) ? Symbol::R : Symbol::L);
      const CylinderInterval c = cylinder_interval(kMap, w);
      if (c.nonempty) {
        ASSERT_TRUE(prev.interval.contains(c.interval)) << w.str();
      }
      prev = c;
    }
  }
}

TEST(Properties, AffinityOverRandomMixtures) {
  std::mt19937_64 g(4);
  const Potential phi = oracle::random_grid_potential(44);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<MeasureRep> parts{random_markov(g), random_markov(g),
                                  MeasureRep(AtomicMeasure{find_periodic_point(kMap, SymbolWord::parse("LLR"))})};
    double w0 = uniform(g, 0.05, 0.9), w1 = uniform(g, 0.05, 1.0 - w0 - 0.01);
    const double w[3] = {w0, w1, 1.0 - w0 - w1};
    const MeasureRep mix = convex_combine({{w[0], parts[0]}, {w[1], parts[1]}, {w[2], parts[2]}});
    double h = 0.0, i = 0.0;
    for (int k = 0; k < 3; ++k) {
      h += w[k] * entropy_map(parts[k]);
      i += w[k] * integrate_map(phi, parts[k], 12).value;
    }
    EXPECT_NEAR(entropy_map(mix), h, 1e-10);
    EXPECT_NEAR(integrate_map(phi, mix, 12).value, i, 1e-10);
    EXPECT_EQ(measure_distance(mix, mix, 10), 0.0);
  }
}

TEST(Properties, AbramovScalingRandomRoofs) {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const MeasureRep m = random_markov(g);
    const RoofFunction r(uniform(g, 0.5, 2.0), uniform(g, 0.0, 2.0), uniform(g, 0.01, 0.2));
    const double k = uniform(g, 0.2, 5.0);
    const auto a = suspend(m, r, Potential::constant(0.0), 12);
    const auto b = suspend(m, RoofFunction(k * r.c0(), k * r.c1(), r.eta0()), Potential::constant(0.0), 12);
    EXPECT_NEAR(b.h_flow * k, a.h_flow, 1e-12 * a.h_flow);
  }
}

TEST(Properties, BallFractionMonotoneRandom) {
  std::mt19937_64 g(6);
  const RoofFunction r(1.0, 1.0, 0.05);
  for (int trial = 0; trial < 15; ++trial) {
    const MeasureRep m = random_markov(g);
    std::vector<double> bs(8);
    for (auto& b : bs) b = uniform(g, 1e-3, 1.0);
    std::sort(bs.begin(), bs.end());
    for (std::size_t i = 1; i < bs.size(); ++i)
      EXPECT_LE(ball_fraction(m, r, bs[i - 1], 14), ball_fraction(m, r, bs[i], 14) + 1e-15);
  }
}

TEST(Properties, VariationalInequalityTwentyPotentials) {
  const auto ms = measures_of(catalog());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Potential phi = oracle::random_grid_potential(9000 + seed);
    const double top = pressure_transfer(kMap, phi, 12).value;
    for (const auto& m : ms) ASSERT_LE(pressure_measure(m, phi, Level::Map), top + 0.02) << seed;
  }
}

TEST(Properties, TransferMonotoneInPotential) {
  std::mt19937_64 g(7);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Potential phi = oracle::random_grid_potential(seed);
    const auto* grid = std::get_if<GridPotential>(&phi.variant());
    std::vector<double> vs = grid->v;
    for (auto& v : vs) v += uniform(g, 0.0, 0.3);
    const Potential psi(GridPotential::from_knots(grid->x, vs));
    EXPECT_LE(pressure_transfer(kMap, phi, 10).value, pressure_transfer(kMap, psi, 10).value + 1e-9);
    const RoofFunction r(1.0, 1.0, 0.05);
    EXPECT_LE(pressure_transfer_flow(kMap, r, phi, 8).value, pressure_transfer_flow(kMap, r, psi, 8).value + 1e-9);
  }
}

TEST(Properties, GapCertificationMonotoneInLevel) {
  const RoofFunction roof(1.0, 1.0, 0.05);
  bool seen = false;
  for (double L : {0.8, 1.2, 1.6, 2.0, 2.4, 3.2, 4.8}) {
    const GapReport g = verify_gap(roof, Potential::bump(L, 0.1), catalog());
    if (seen) {
      EXPECT_TRUE(g.certified) << L;
    }
    seen = seen || g.certified;
  }
  EXPECT_TRUE(seen);
}

TEST(Properties, SpectrumShiftRandomConstants) {
  std::mt19937_64 g(8);
  const Potential phi = oracle::random_grid_potential(808);
  const auto* grid = std::get_if<GridPotential>(&phi.variant());
  const auto base = spectrum_scan(catalog(), phi, Level::Map);
  for (int trial = 0; trial < 5; ++trial) {
    const double c = uniform(g, -3.0, 3.0);
    std::vector<double> vs = grid->v;
    for (auto& v : vs) v += c;
    const auto s = spectrum_scan(catalog(), Potential(GridPotential::from_knots(grid->x, vs)), Level::Map);
    EXPECT_EQ(s.gap_lo_id, base.gap_lo_id);
    EXPECT_EQ(s.gap_hi_id, base.gap_hi_id);
    EXPECT_NEAR(s.gap, base.gap, 1e-9);
    EXPECT_NEAR(s.P_top_est, base.P_top_est + c, 1e-9);
  }
}

TEST(Properties, CatalogIndependentOfWorkers) {
  const auto a = catalog_to_json(build_catalog(kMap, CatalogRecipe{}, 1)).dump();
  const auto b = catalog_to_json(build_catalog(kMap, CatalogRecipe{}, 5)).dump();
  EXPECT_EQ(a, b);
}
