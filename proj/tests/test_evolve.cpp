#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "qasat/evolve.hpp"
#include "qasat/fixtures.hpp"

using namespace qasat;

namespace {

IsingModel small_model(int n, std::uint64_t seed) {
  Rng rng(seed);
  GenerationConfig cfg;
  cfg.n_vars = n;
  return map_2sat(generate_problem(cfg, rng));
}

Eigen::VectorXcd to_eigen(const StateVector& psi) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.dim()));
  for (std::size_t i = 0; i < psi.dim(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
  return v;
}

double distance(const StateVector& a, const StateVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d += std::norm(a[i] - b[i]);
  return std::sqrt(d);
}

}  // namespace

TEST(Schedule, LinearAndTabulated) {
  const auto lin = Schedule::linear();
  EXPECT_DOUBLE_EQ(lin.a(0.25), 0.75);
  EXPECT_DOUBLE_EQ(lin.b(0.25), 0.25);
  const auto tab = Schedule::tabulated({{0.0, 2.0, 0.0}, {0.5, 1.0, 1.0}, {1.0, 0.0, 3.0}});
  EXPECT_DOUBLE_EQ(tab.a(0.25), 1.5);
  EXPECT_DOUBLE_EQ(tab.b(0.75), 2.0);
  EXPECT_THROW(Schedule::tabulated({{0.0, 1.0, 0.0}}), InputError);
  EXPECT_THROW(Schedule::tabulated({{0.0, 1.0, 0.0}, {0.9, 0.0, 1.0}}), InputError);
  EXPECT_THROW(Schedule::tabulated({{0.0, 1.0, 0.5}, {1.0, 0.0, 1.0}}), InputError);
}

TEST(State, UniformInitialStateIsGroundOfTransverseTerm) {
  const auto psi = initial_state_uniform(5);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-14);
  EXPECT_NEAR(transverse_expectation(psi), -5.0, 1e-12);
  EXPECT_THROW(StateVector(30), ResourceError);
}

TEST(Kernels, TransverseRotationMatchesDenseExponential) {
  const int n = 4;
  IsingModel zero(n);
  const Eigen::MatrixXd hi = oracle::dense_hamiltonian(zero, 1.0, 0.0);
  StateVector psi = basis_state(BitString::parse("1010"));
  const auto ref = oracle::propagate(hi, to_eigen(psi), 0.37);
  kernels::rotate_transverse(psi.amplitudes(), n, 0.37);
  EXPECT_LT((to_eigen(psi) - ref).norm(), 1e-12);
}

TEST(Kernels, PhaseTableMatchesDirectPhases) {
  const auto m = map_2sat(fixtures::problem_1().problem);
  const DiagonalHamiltonian h(m);
  StateVector a = initial_state_uniform(14), b = a;
  h.apply_phase(a.amplitudes(), 0.731);
  const auto e = diagonal_energies(m);
  for (std::size_t i = 0; i < b.dim(); ++i) b[i] *= std::polar(1.0, -0.731 * e[i]);
  EXPECT_LT(distance(a, b), 1e-12);
  EXPECT_NEAR(h.expectation(initial_state_uniform(14)), 15.0, 1e-9);  // each clause violated with prob 1/4
}

TEST(Propagator, WaitSegmentMatchesDenseExponential) {
  const auto m = small_model(5, 3);
  const double s = 0.4, t = 3.0;
  StateVector psi = initial_state_uniform(5);
  const auto ref = oracle::propagate(oracle::dense_hamiltonian(m, 1.0 - s, s), to_eigen(psi), t);
  Propagator(m, Schedule::linear(), 0.001).evolve(psi, {s, s, t});
  EXPECT_LT((to_eigen(psi) - ref).norm(), 1e-5);
}

TEST(Propagator, SecondOrderConvergence) {
  const auto m = small_model(6, 8);
  auto run = [&](double tau) { return run_standard({m, Schedule::linear(), 5.0, tau}); };
  const auto a = run(0.1), b = run(0.05), c = run(0.025);
  const double factor = distance(a, b) / distance(b, c);
  EXPECT_GE(factor, 3.0);
  EXPECT_LE(factor, 5.0);
}

TEST(Propagator, NormIsPreserved) {
  const auto f = fixtures::problem_230();
  const auto m = map_2sat(f.problem);
  const auto psi = run_standard({m, Schedule::linear(), 20.0, 0.02});
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-10);
  const auto rev = run_reverse({{m, Schedule::linear(), 10.0, 0.02}, 0.6, 2.0, f.ground_states[0]});
  EXPECT_NEAR(rev.norm_squared(), 1.0, 1e-10);
}

TEST(Propagator, StepCountAndObserver) {
  const auto m = small_model(4, 1);
  const Propagator p(m, Schedule::linear(), 0.3);
  EXPECT_EQ(p.steps_for({0.0, 1.0, 1.0}), 3u);
  EXPECT_EQ(p.total_steps(reverse_segments(1.0, 0.5, 0.6)), 3u + 2u + 3u);
  StateVector psi = initial_state_uniform(4);
  std::vector<double> ts, ss;
  p.run(psi, reverse_segments(1.0, 0.5, 0.6), {0, 3, 5, 8}, [&](const StateVector& st, double t, double s) {
    EXPECT_NEAR(st.norm_squared(), 1.0, 1e-12);
    ts.push_back(t);
    ss.push_back(s);
  });
  ASSERT_EQ(ts.size(), 4u);
  EXPECT_DOUBLE_EQ(ts[1], 1.0);
  EXPECT_DOUBLE_EQ(ss[1], 0.5);
  EXPECT_DOUBLE_EQ(ts[2], 1.6);
  EXPECT_DOUBLE_EQ(ss[2], 0.5);
  EXPECT_DOUBLE_EQ(ts[3], 2.6);
  EXPECT_DOUBLE_EQ(ss[3], 1.0);
  EXPECT_THROW(p.evolve(psi, {0.0, 1.0, 0.1}), InputError);  // tau longer than the segment
}

TEST(Propagator, ObservationDoesNotPerturbTheRun) {
  const auto m = small_model(6, 4);
  const Propagator p(m, Schedule::linear(), 0.05);
  StateVector a = initial_state_uniform(6), b = a;
  p.run(a, standard_segments(5.0));
  p.run(b, standard_segments(5.0), {10, 40, 77}, [](const StateVector&, double, double) {});
  EXPECT_LT(distance(a, b), 1e-12);
}

TEST(Reverse, StaysInGroundStateWhenFarFromTransition) {
  const auto f = fixtures::problem_1();
  ReverseAnnealSpec spec{{map_2sat(f.problem), Schedule::linear(), 5.0, 0.02}, 0.98, 0.0, f.ground_states[0]};
  const auto r = measure_probabilities(run_reverse(spec), f.ground_states);
  EXPECT_GT(r.total_success, 0.99);
  spec.s_r = 1.0;
  EXPECT_THROW(spec.validate(), InputError);
}

TEST(Measure, DuplicateTargetsRejected) {
  const auto psi = initial_state_uniform(3);
  const auto t = BitString::parse("011");
  EXPECT_THROW(measure_probabilities(psi, {t, t}), InputError);
  EXPECT_NEAR(measure_probabilities(psi, {t}).total_success, 0.125, 1e-15);
}

TEST(Gate, HalvesUntilStable) {
  int calls = 0;
  auto fake = [&](double tau) {
    ++calls;
    SamplingResult r;
    r.probabilities = {0.5 + tau * tau};
    return r;
  };
  const auto g = converge_tau(fake, 0.04, 1e-4);
  EXPECT_TRUE(g.converged);
  EXPECT_DOUBLE_EQ(g.tau, 0.005);  // changes 1.2e-3, 3e-4, then 7.5e-5
  EXPECT_EQ(calls, 4);
  const auto never = converge_tau([](double) { static double v = 0; v += 1; return SamplingResult{{}, {v}, v, "", 0, 0}; }, 1.0, 1e-4, 2);
  EXPECT_FALSE(never.converged);
}
