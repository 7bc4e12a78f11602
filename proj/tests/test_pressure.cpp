#include <gtest/gtest.h>

#include <cmath>

#include "lorenz/catalog.hpp"
#include "lorenz/pressure.hpp"
#include "oracles.hpp"

using namespace lorenz;

namespace {

const LorenzMap1D kMap(1.0, 1.7);
const double kLog17 = std::log(1.7);

// log Z_n - log Z_{n-1} of the brute-force cylinder sum
double brute_trend(const Potential& phi, int n) {
  auto g = [&](double x) { return phi.section_value(x); };
  return oracle::log_cylinder_sum(kMap, g, n) - oracle::log_cylinder_sum(kMap, g, n - 1);
}

Potential shifted(const Potential& phi, double c) {
  const auto* grid = std::get_if<GridPotential>(&phi.variant());
  if (!grid) return Potential::constant(c);
  std::vector<double> vs = grid->v;
  for (double& v : vs) v += c;
  return Potential(GridPotential::from_knots(grid->x, vs));
}

}  // namespace

TEST(Entropy, TransferIsLogBeta) {
  const auto e = pressure_transfer(kMap, Potential::constant(0.0), 12);
  EXPECT_NEAR(e.value, kLog17, 0.01 * kLog17);
  EXPECT_EQ(e.method, "transfer");
  EXPECT_LE(std::abs(e.value - kLog17), e.slack);
}

TEST(Entropy, SeparatedIsLogBeta) {
  const auto e = pressure_separated(kMap, Potential::constant(0.0), 18, 1e-3);
  EXPECT_NEAR(e.value, kLog17, 0.05 * kLog17);
}

TEST(Entropy, TransferAgreesWithLapGrowth) {
  const double laps = std::log(static_cast<double>(oracle::big_lap_number(1.0, 1.7, 22))) -
                      std::log(static_cast<double>(oracle::big_lap_number(1.0, 1.7, 21)));
  EXPECT_NEAR(pressure_transfer(kMap, Potential::constant(0.0), 12).value, laps, 5e-3);
}

TEST(Entropy, OtherSlopes) {
  for (double beta : {1.5, 1.9}) {
    const LorenzMap1D f(1.0, beta);
    EXPECT_NEAR(pressure_transfer(f, Potential::constant(0.0), 12).value, std::log(beta), 0.01 * std::log(beta)) << beta;
  }
}

TEST(OracleEquivalence, TransferMatchesCylinderSumTrend) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Potential phi = oracle::random_grid_potential(seed);
    const double trend = brute_trend(phi, 14);
    for (int d = 3; d <= 6; ++d) {
      const auto e = pressure_transfer(kMap, phi, d);
      EXPECT_LE(std::abs(e.value - trend), e.slack) << "seed " << seed << " depth " << d;
    }
  }
}

TEST(OracleEquivalence, SpectralRadiusMatchesHighPrecision) {
  const Potential phi = oracle::random_grid_potential(3);
  const auto t = detail::transfer_pieces(kMap, phi.section(), 4);
  const int n = t.cg.graph.size();
  std::vector<std::vector<double>> m(static_cast<std::size_t>(n), std::vector<double>(n, 0.0));
  for (const auto& [u, v] : t.cg.graph.edges()) m[u][v] = std::exp(t.g[v]);
  EXPECT_NEAR(detail::transfer_radius(t).log_radius, oracle::big_log_spectral_radius(m), 1e-10);
}

TEST(Equivariance, ConstantShiftAllEstimators) {
  const RoofFunction roof(1.0, 1.0, 0.05);
  const auto catalog = measures_of(build_catalog(kMap, CatalogRecipe{}));
  for (std::uint64_t seed : {1u, 2u}) {
    const Potential phi = oracle::random_grid_potential(seed);
    for (double c : {-0.7, 0.3, 1.9}) {
      const Potential psi = shifted(phi, c);
      EXPECT_NEAR(pressure_transfer(kMap, psi, 8).value, pressure_transfer(kMap, phi, 8).value + c, 1e-9);
      EXPECT_NEAR(pressure_separated(kMap, psi, 12, 1e-2).value, pressure_separated(kMap, phi, 12, 1e-2).value + c, 1e-9);
      EXPECT_NEAR(pressure_transfer_flow(kMap, roof, psi, 8).value,
                  pressure_transfer_flow(kMap, roof, phi, 8).value + c, 1e-9);
      const BoundsOptions opt{0, 0.02, 1};
      const auto a = estimate_P_bounds(catalog, phi, Level::Map, kMap, nullptr, opt);
      const auto b = estimate_P_bounds(catalog, psi, Level::Map, kMap, nullptr, opt);
      EXPECT_NEAR(b.P_top_est, a.P_top_est + c, 1e-9);
      EXPECT_NEAR(b.P_inf_est, a.P_inf_est + c, 1e-9);
      EXPECT_EQ(a.argmax, b.argmax);
      const auto fa = estimate_P_bounds(catalog, phi, Level::Flow, kMap, &roof, opt);
      const auto fb = estimate_P_bounds(catalog, psi, Level::Flow, kMap, &roof, opt);
      EXPECT_NEAR(fb.P_top_est, fa.P_top_est + c, 1e-9);
    }
  }
}

TEST(Monotonicity, LargerPotentialLargerPressure) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Potential phi = oracle::random_grid_potential(seed);
    const auto* g = std::get_if<GridPotential>(&phi.variant());
    std::vector<double> vs = g->v;
    for (std::size_t i = 0; i < vs.size(); ++i) vs[i] += 0.05 * static_cast<double>(i % 3);
    const Potential psi(GridPotential::from_knots(g->x, vs));
    EXPECT_LE(pressure_transfer(kMap, phi, 10).value, pressure_transfer(kMap, psi, 10).value + 1e-12);
    EXPECT_LE(pressure_separated(kMap, phi, 12, 1e-2).value, pressure_separated(kMap, psi, 12, 1e-2).value + 0.02);
  }
}

TEST(Variational, CatalogBelowTransfer) {
  const auto catalog = measures_of(build_catalog(kMap, CatalogRecipe{}));
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    const Potential phi = oracle::random_grid_potential(seed);
    const auto b = estimate_P_bounds(catalog, phi, Level::Map, kMap);
    ASSERT_TRUE(b.transfer.has_value());
    EXPECT_LE(b.P_top_est, b.transfer->value + 0.02) << seed;
    EXPECT_LE(b.P_inf_est, b.P_top_est);
    for (double v : b.values) EXPECT_LE(v, b.P_top_est);
  }
}

TEST(Bounds, SingletonCatalog) {
  const std::vector<MeasureRep> one{MeasureRep(AtomicMeasure{find_periodic_point(kMap, SymbolWord::parse("LR"))})};
  const auto b = estimate_P_bounds(one, Potential::constant(0.0), Level::Map, kMap, nullptr, {0, 0.02, 1});
  EXPECT_EQ(b.P_inf_est, 0.0);
  EXPECT_EQ(b.P_top_est, 0.0);
  EXPECT_THROW(estimate_P_bounds({}, Potential::constant(0.0), Level::Map, kMap), Error);
}

TEST(Bounds, DefaultCatalogReachesEntropy) {
  const auto catalog = measures_of(build_catalog(kMap, CatalogRecipe{}));
  const auto b = estimate_P_bounds(catalog, Potential::constant(0.0), Level::Map, kMap);
  EXPECT_NEAR(b.P_top_est, kLog17, 0.02);
  EXPECT_FALSE(b.catalog_insufficient);
  EXPECT_EQ(b.P_inf_est, 0.0);  // periodic orbits
}

TEST(Bounds, SparseCatalogIsFlagged) {
  CatalogRecipe r;
  r.horseshoes.clear();
  r.probes = false;
  r.max_period = 4;
  const auto b = estimate_P_bounds(measures_of(build_catalog(kMap, r)), Potential::constant(0.0), Level::Map, kMap);
  EXPECT_TRUE(b.catalog_insufficient);
  EXPECT_NEAR(b.shortfall, b.transfer->value, 1e-12);
}

TEST(Flow, ConstantRoofDividesEntropy) {
  const RoofFunction roof(2.0, 0.0, 0.05);
  const auto e = pressure_transfer_flow(kMap, roof, Potential::constant(0.0), 12);
  EXPECT_NEAR(e.value, pressure_transfer(kMap, Potential::constant(0.0), 12).value / 2.0, 1e-9);
}

TEST(Flow, LogRoofLowersEntropyRate) {
  const RoofFunction roof(1.0, 1.0, 0.05);
  const double hf = pressure_transfer_flow(kMap, roof, Potential::constant(0.0), 12).value;
  EXPECT_GT(hf, 0.0);
  EXPECT_LT(hf, kLog17);
  // every catalog measure sits below
  const auto catalog = measures_of(build_catalog(kMap, CatalogRecipe{}));
  for (const auto& m : catalog) EXPECT_LE(pressure_measure(m, Potential::constant(0.0), Level::Flow, &roof), hf + 0.02);
}

TEST(Errors, Preconditions) {
  EXPECT_THROW(pressure_separated(kMap, Potential::constant(0.0), 0, 1e-3), Error);
  EXPECT_THROW(pressure_separated(kMap, Potential::constant(0.0), 10, 0.0), Error);
  EXPECT_THROW(pressure_transfer(kMap, Potential::constant(0.0), kMaxTransferDepth + 1), Error);
  EXPECT_THROW(pressure_measure(MeasureRep(bernoulli_measure(0.5)), Potential::constant(0.0), Level::Flow, nullptr), Error);
}
