#include <gtest/gtest.h>

#include <cmath>

#include "qasat/fixtures.hpp"
#include "qasat/ising.hpp"

using namespace qasat;

namespace {

// Pascal's triangle, kept apart from any library binomial.
std::uint64_t choose(int n, int k) {
  std::vector<std::vector<std::uint64_t>> c(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    c[i].assign(static_cast<std::size_t>(i + 1), 1);
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c[n][k];
}

}  // namespace

TEST(Bits, ConventionLeftmostIsMostSignificant) {
  const auto b = BitString::parse("1000");
  EXPECT_EQ(b.index(), 8u);
  EXPECT_TRUE(b[0]);
  EXPECT_EQ(b.spin(0), 1);
  EXPECT_EQ(b.spin(3), -1);
  EXPECT_EQ(b.str(), "1000");
  EXPECT_EQ(hamming_distance(b, BitString::parse("0001")), 2);
  EXPECT_THROW(BitString::parse("10x"), InputError);
}

TEST(MapTwoSat, EnergyIsFourTimesViolations) {
  Rng rng(5);
  GenerationConfig cfg;
  cfg.n_vars = 8;
  cfg.clause_offset_c = 3;
  for (int i = 0; i < 40; ++i) {
    const auto p = generate_problem(cfg, rng);
    const auto m = map_2sat(p);
    const auto e = diagonal_energies(m);
    for (std::uint64_t x = 0; x < e.size(); ++x) {
      const BasisState s(p.n_vars, x);
      ASSERT_DOUBLE_EQ(e[x], 4.0 * count_violated(p, s));
      ASSERT_DOUBLE_EQ(energy(m, s), e[x]);
    }
  }
}

TEST(MapTwoSat, SingleClauseCoefficients) {
  TwoSatProblem p{2, {{Literal::from_signed(1), Literal::from_signed(-2)}}, ""};
  const auto m = map_2sat(p);
  EXPECT_DOUBLE_EQ(m.h[0], 1.0);
  EXPECT_DOUBLE_EQ(m.h[1], -1.0);
  EXPECT_DOUBLE_EQ(m.coupling(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.offset, 1.0);
  // violated only by x1 = 0, x2 = 1
  EXPECT_DOUBLE_EQ(energy(m, BitString::parse("01")), 4.0);
  EXPECT_DOUBLE_EQ(energy(m, BitString::parse("10")), 0.0);
}

TEST(Histogram, FixturesHaveFourfoldGround) {
  for (const auto& name : fixtures::names()) {
    const auto h = energy_histogram(map_2sat(fixtures::by_name(name).problem));
    EXPECT_DOUBLE_EQ(h.ground_energy(), 0.0);
    EXPECT_EQ(h.ground_degeneracy(), 4u);
    EXPECT_DOUBLE_EQ(h.gap(), 4.0);
    EXPECT_EQ(h.total(), 1u << 14);
  }
}

TEST(Chain, LevelsAreBinomial) {
  for (int n = 2; n <= 14; ++n) {
    const auto h = energy_histogram(ferro_chain({n, 0.5, {}}));
    ASSERT_EQ(h.levels.size(), static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      EXPECT_EQ(h.levels[k].degeneracy, 2 * choose(n - 1, k)) << "n=" << n << " k=" << k;
      EXPECT_NEAR(h.levels[k].energy, -(n - 1) * 0.5 + k * 1.0, 1e-12);
    }
  }
}

TEST(Gauge, SpectrumInvariantUnderRandomGauges) {
  Rng rng(99);
  const auto base = map_2sat(fixtures::problem_230().problem);
  const auto ref = energy_histogram(base);
  const auto energies = diagonal_energies(base);
  for (int g = 0; g < 100; ++g) {
    const auto gauge = random_gauge(base.n_spins, rng);
    const auto m = spin_reversal(base, gauge);
    ASSERT_TRUE(same_spectrum(energy_histogram(m), ref));
    // states map to states of equal energy
    const BasisState s(14, static_cast<std::uint64_t>(uniform_index(rng, 1u << 14)));
    EXPECT_DOUBLE_EQ(energy(m, spin_reversal(s, gauge)), energies[s.index()]);
  }
}

TEST(Gauge, ChainWithFlipsKeepsDegeneracies) {
  Rng rng(1);
  const auto ref = energy_histogram(ferro_chain({12, 0.5, {}}));
  for (int g = 0; g < 20; ++g) EXPECT_TRUE(same_spectrum(energy_histogram(ferro_chain({12, 0.5, random_gauge(12, rng)})), ref));
}

TEST(Rescale, ScalesEnergies) {
  const auto m = map_2sat(fixtures::problem_1().problem);
  const auto e = diagonal_energies(m);
  const auto r = diagonal_energies(rescale(m, 0.25));
  for (std::size_t i = 0; i < e.size(); i += 97) EXPECT_DOUBLE_EQ(r[i], 0.25 * e[i]);
  EXPECT_THROW(rescale(m, 0.0), InputError);
}

TEST(Resources, CapIsEnforced) {
  EXPECT_THROW(diagonal_energies(IsingModel(30)), ResourceError);
}

TEST(Stats, SolutionAndFesCounts) {
  const auto f = fixtures::problem_230();
  const auto s = degeneracy_stats({f.problem});
  EXPECT_EQ(s.solution_counts.at(0), 4);
  std::uint64_t one_violation = 0;
  for (std::uint64_t x = 0; x < (1u << 14); ++x) one_violation += count_violated(f.problem, BasisState(14, x)) == 1;
  EXPECT_EQ(s.fes_degeneracies.at(0), one_violation);
}
