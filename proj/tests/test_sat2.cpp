#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qasat/fixtures.hpp"
#include "qasat/sat2.hpp"

using namespace qasat;

namespace {

TwoSatProblem make(int n, std::initializer_list<std::pair<int, int>> cs) {
  TwoSatProblem p{n, {}, ""};
  for (auto [a, b] : cs) p.clauses.push_back({Literal::from_signed(a), Literal::from_signed(b)});
  return p;
}

// Plain evaluation of every assignment, with no shared code paths.
std::vector<std::uint64_t> brute_solutions(const TwoSatProblem& p) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << p.n_vars); ++x) {
    bool ok = true;
    for (const Clause& c : p.clauses) {
      auto val = [&](const Literal& l) {
        const bool bit = (x >> (p.n_vars - l.variable)) & 1U;
        return l.negated ? !bit : bit;
      };
      if (!val(c.first) && !val(c.second)) ok = false;
    }
    if (ok) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST(Literal, SignedRoundTrip) {
  EXPECT_EQ(Literal::from_signed(-3).to_signed(), -3);
  EXPECT_EQ(Literal::from_signed(5).sign(), 1);
  EXPECT_THROW(Literal::from_signed(0), InputError);
}

TEST(Problem, ValidateRejectsBrokenProblems) {
  EXPECT_NO_THROW(make(2, {{1, 2}}).validate());
  EXPECT_THROW(make(3, {{1, 2}}).validate(), InputError);            // x3 unused
  EXPECT_THROW(make(2, {{1, 1}, {1, 2}}).validate(), InputError);    // same variable twice
  EXPECT_THROW(make(2, {{1, 2}, {2, 1}}).validate(), InputError);    // repeated clause
  EXPECT_THROW(make(2, {{1, 3}}).validate(), InputError);            // out of range
}

TEST(Satisfiability, ContradictionIsUnsat) {
  // x1 forced true and false
  EXPECT_FALSE(is_satisfiable_scc(make(2, {{1, 2}, {1, -2}, {-1, 2}, {-1, -2}})));
  EXPECT_TRUE(is_satisfiable_scc(make(2, {{1, 2}, {1, -2}, {-1, 2}})));
}

TEST(Satisfiability, SccMatchesBruteForceOnRandomInstances) {
  Rng rng(42);
  GenerationConfig cfg;
  cfg.n_vars = 8;
  cfg.clause_offset_c = 4;
  int unsat = 0;
  for (int i = 0; i < 1000; ++i) {
    const TwoSatProblem p = generate_problem(cfg, rng);
    const bool brute = !brute_solutions(p).empty();
    ASSERT_EQ(is_satisfiable_scc(p), brute) << "instance " << i;
    unsat += brute ? 0 : 1;
  }
  EXPECT_GT(unsat, 0);  // both outcomes exercised
}

TEST(Enumerate, MatchesBruteForceAndIsAscending) {
  Rng rng(7);
  GenerationConfig cfg;
  cfg.n_vars = 9;
  for (int i = 0; i < 50; ++i) {
    const TwoSatProblem p = generate_problem(cfg, rng);
    const auto sols = enumerate_solutions(p);
    const auto ref = brute_solutions(p);
    ASSERT_EQ(sols.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_EQ(sols[k].index(), ref[k]);
  }
}

TEST(Enumerate, CapIsEnforced) {
  const auto f = fixtures::problem_1();
  EXPECT_THROW(enumerate_solutions(f.problem, 10), ResourceError);
}

TEST(Enumerate, CountViolatedAgreesWithClauses) {
  const auto p = make(3, {{1, 2}, {-1, 3}, {-2, -3}});
  EXPECT_EQ(count_violated(p, BitString::parse("000")), 1);
  EXPECT_EQ(count_violated(p, BitString::parse("111")), 1);
  EXPECT_EQ(count_violated(p, BitString::parse("101")), 0);
  EXPECT_THROW(count_violated(p, BitString::parse("10")), InputError);
}

TEST(Generate, RespectsConstraintsAndSeed) {
  GenerationConfig cfg;
  cfg.n_vars = 7;
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) {
    const auto p = generate_problem(cfg, a);
    EXPECT_EQ(static_cast<int>(p.clauses.size()), cfg.n_clauses());
    EXPECT_NO_THROW(p.validate());
    const auto q = generate_problem(cfg, b);
    ASSERT_EQ(p.clauses.size(), q.clauses.size());
    for (std::size_t k = 0; k < p.clauses.size(); ++k) EXPECT_EQ(p.clauses[k].key(), q.clauses[k].key());
  }
}

TEST(Generate, ImpossibleClauseCountFails) {
  GenerationConfig cfg;
  cfg.n_vars = 3;
  cfg.clause_offset_c = 20;  // only 12 distinct clauses exist
  Rng rng(1);
  EXPECT_THROW(generate_problem(cfg, rng), GenerationError);
  EXPECT_EQ(clause_universe_size(3), 12);
}

TEST(ExpectedDegeneracy, KnownValues) {
  EXPECT_NEAR(expected_degeneracy(2, 7, 6), 64.0 * std::pow(0.75, 7), 1e-12);
  EXPECT_NEAR(expected_degeneracy(2, 7, 6), 8.5430, 1e-4);
  EXPECT_DOUBLE_EQ(expected_degeneracy(1, 1, 1), 1.0);
  EXPECT_THROW(expected_degeneracy(0, 1, 1), InputError);
}

TEST(Ensemble, BucketsFillAndAreDeterministic) {
  GenerationConfig cfg;
  cfg.n_vars = 6;
  cfg.seed = 11;
  const Ensemble e = generate_ensemble(cfg, 5);
  const Ensemble f = generate_ensemble(cfg, 5);
  for (int d : {1, 2, 4}) {
    ASSERT_EQ(e.buckets.at(d).size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& p = e.buckets.at(d)[i];
      EXPECT_EQ(static_cast<int>(enumerate_solutions(p).size()), d);
      EXPECT_EQ(p.label, f.buckets.at(d)[i].label);
    }
  }
  EXPECT_EQ(e.satisfiable_counts.size(), e.satisfiable);
}

TEST(Ensemble, BudgetExhaustionIsReported) {
  GenerationConfig cfg;
  cfg.n_vars = 6;
  cfg.target_degeneracies = {63};  // unreachable with 7 clauses
  cfg.ensemble_budget = 200;
  EXPECT_THROW(generate_ensemble(cfg, 1), GenerationError);
}

TEST(Fixtures, FourSolutionsEach) {
  for (const auto& name : fixtures::names()) {
    const auto f = fixtures::by_name(name);
    EXPECT_NO_THROW(f.problem.validate());
    const auto sols = enumerate_solutions(f.problem);
    ASSERT_EQ(sols.size(), 4u) << name;
    std::set<BasisState> a(sols.begin(), sols.end()), b(f.ground_states.begin(), f.ground_states.end());
    EXPECT_EQ(a, b) << name;
  }
  EXPECT_THROW(fixtures::by_name("2"), InputError);
}
