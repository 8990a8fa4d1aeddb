#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "ising.hpp"
#include "schedule.hpp"
#include "state.hpp"

namespace qasat {

/// Piece of a protocol: s moves linearly from s_start to s_end over `duration`.
/// s_start == s_end is a waiting segment.
struct Segment {
  double s_start;
  double s_end;
  double duration;
};

struct AnnealSpec {
  IsingModel model;
  Schedule schedule = Schedule::linear();
  double T_A = 100.0;
  double tau = 0.02;

  void validate() const {
    model.validate();
    if (!(T_A > 0.0)) throw InputError("annealing time must be positive");
    if (!(tau > 0.0) || tau > T_A) throw InputError("time step must lie in (0, T_A]");
  }
};

struct ReverseAnnealSpec {
  AnnealSpec base;
  double s_r = 0.7;
  double T_W = 0.0;
  BasisState initial;

  void validate() const {
    base.validate();
    if (!(s_r > 0.0 && s_r < 1.0)) throw InputError("reversal distance must lie in (0, 1)");
    if (!(T_W >= 0.0)) throw InputError("waiting time must be non-negative");
    if (T_W > 0.0 && base.tau > T_W) throw InputError("time step exceeds waiting time");
    if (initial.size() != base.model.n_spins) throw InputError("initial state length does not match model");
  }
  double total_duration() const { return 2.0 * base.T_A + T_W; }
};

inline std::vector<Segment> standard_segments(double T_A) { return {{0.0, 1.0, T_A}}; }

inline std::vector<Segment> reverse_segments(double T_A, double s_r, double T_W) {
  std::vector<Segment> out{{1.0, s_r, T_A}};
  if (T_W > 0.0) out.push_back({s_r, s_r, T_W});
  out.push_back({s_r, 1.0, T_A});
  return out;
}

/// Second-order product-formula integrator for H(s) = A(s) H_I + B(s) H_P.
/// Step k of a segment with n steps evaluates the schedule at the midpoint
/// s_k = s_start + (s_end - s_start)(k - 1/2)/n and applies
///   exp(-i dt A H_I / 2) exp(-i dt B H_P) exp(-i dt A H_I / 2),  dt = duration/n.
/// Adjacent transverse half-steps commute and are fused into one rotation.
class Propagator {
 public:
  /// Called with the state, the protocol time and the current s.
  using Observer = std::function<void(const StateVector&, double, double)>;

  Propagator(const IsingModel& model, Schedule schedule, double tau)
      : problem_(model), schedule_(std::move(schedule)), tau_(tau) {
    if (!(tau > 0.0)) throw InputError("time step must be positive");
    schedule_.validate();
  }

  const DiagonalHamiltonian& problem() const noexcept { return problem_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  double tau() const noexcept { return tau_; }

  std::size_t steps_for(const Segment& seg) const {
    check(seg);
    return static_cast<std::size_t>(std::max(1.0, std::round(seg.duration / tau_)));
  }

  std::size_t total_steps(const std::vector<Segment>& segs) const {
    std::size_t n = 0;
    for (const auto& seg : segs) n += steps_for(seg);
    return n;
  }

  void evolve(StateVector& psi, const Segment& seg) const { run(psi, {seg}); }

  /// Runs the segments back to back. When an observer is given it fires after
  /// every global step index listed in `observe_at` (0 = before the first step).
  void run(StateVector& psi, const std::vector<Segment>& segs, const std::vector<std::size_t>& observe_at = {},
           const Observer& observer = {}) const {
    if (psi.n_qubits() != problem_.n_qubits()) throw InputError("state and model sizes differ");
    const std::set<std::size_t> marks(observe_at.begin(), observe_at.end());
    std::size_t global = 0;
    double t = 0.0;
    if (observer && marks.count(0)) observer(psi, 0.0, segs.empty() ? 0.0 : segs.front().s_start);
    for (const Segment& seg : segs) {
      const std::size_t n = steps_for(seg);
      const double dt = seg.duration / static_cast<double>(n);
      double pending = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double s = seg.s_start + (seg.s_end - seg.s_start) * (static_cast<double>(k) - 0.5) / static_cast<double>(n);
        const double half = 0.5 * dt * schedule_.a(s);
        kernels::rotate_transverse(psi.amplitudes(), psi.n_qubits(), pending + half);
        problem_.apply_phase(psi.amplitudes(), dt * schedule_.b(s));
        pending = half;
        ++global;
        if (observer && marks.count(global)) {
          kernels::rotate_transverse(psi.amplitudes(), psi.n_qubits(), pending);
          pending = 0.0;
          const double frac = static_cast<double>(k) / static_cast<double>(n);
          observer(psi, t + seg.duration * frac, seg.s_start + (seg.s_end - seg.s_start) * frac);
        }
      }
      kernels::rotate_transverse(psi.amplitudes(), psi.n_qubits(), pending);
      t += seg.duration;
    }
  }

 private:
  void check(const Segment& seg) const {
    if (!(seg.duration > 0.0)) throw InputError("segment duration must be positive");
    if (tau_ > seg.duration) throw InputError("time step exceeds segment duration");
    if (seg.s_start < 0.0 || seg.s_start > 1.0 || seg.s_end < 0.0 || seg.s_end > 1.0)
      throw InputError("segment s range must lie in [0, 1]");
  }

  DiagonalHamiltonian problem_;
  Schedule schedule_;
  double tau_;
};

inline StateVector evolve_segment(StateVector state, const IsingModel& model, const Schedule& schedule,
                                  double s_start, double s_end, double duration, double tau) {
  Propagator(model, schedule, tau).evolve(state, {s_start, s_end, duration});
  return state;
}

inline StateVector run_standard(const AnnealSpec& spec) {
  spec.validate();
  StateVector psi = initial_state_uniform(spec.model.n_spins);
  Propagator(spec.model, spec.schedule, spec.tau).run(psi, standard_segments(spec.T_A));
  return psi;
}

inline StateVector run_reverse(const ReverseAnnealSpec& spec) {
  spec.validate();
  StateVector psi = basis_state(spec.initial);
  Propagator(spec.base.model, spec.base.schedule, spec.base.tau)
      .run(psi, reverse_segments(spec.base.T_A, spec.s_r, spec.T_W));
  return psi;
}

struct SamplingResult {
  std::vector<BasisState> targets;
  std::vector<double> probabilities;
  double total_success = 0.0;
  std::string protocol;
  double T_A = 0.0;
  double tau = 0.0;
};

inline SamplingResult measure_probabilities(const StateVector& psi, const std::vector<BasisState>& targets) {
  std::set<BasisState> seen;
  SamplingResult r;
  for (const auto& t : targets) {
    if (!seen.insert(t).second) throw InputError("duplicate target state " + t.str());
    const double p = psi.probability(t);
    r.targets.push_back(t);
    r.probabilities.push_back(p);
    r.total_success += p;
  }
  return r;
}

struct GatedResult {
  SamplingResult result;
  double tau = 0.0;
  double max_change = 0.0;  // between the last two step sizes
  bool converged = false;
};

/// Halves the time step until every reported probability moves by less than
/// `tol`, returning the finer of the last pair of runs.
template <class RunAtTau>
GatedResult converge_tau(RunAtTau&& run_at, double tau0, double tol = 1e-4, int max_halvings = 4) {
  double tau = tau0;
  SamplingResult coarse = run_at(tau);
  GatedResult g;
  for (int h = 0; h < max_halvings; ++h) {
    tau *= 0.5;
    SamplingResult fine = run_at(tau);
    double change = 0.0;
    for (std::size_t i = 0; i < fine.probabilities.size(); ++i)
      change = std::max(change, std::abs(fine.probabilities[i] - coarse.probabilities[i]));
    g = {fine, tau, change, change < tol};
    if (g.converged) return g;
    coarse = std::move(fine);
  }
  return g;
}

/// Standard anneal measured on `targets`, with the step size convergence gate.
inline GatedResult run_standard_gated(AnnealSpec spec, const std::vector<BasisState>& targets, double tol = 1e-4,
                                      int max_halvings = 4) {
  const double tau0 = spec.tau;
  return converge_tau(
      [&](double tau) {
        spec.tau = tau;
        auto r = measure_probabilities(run_standard(spec), targets);
        r.protocol = "standard";
        r.T_A = spec.T_A;
        r.tau = tau;
        return r;
      },
      tau0, tol, max_halvings);
}

inline GatedResult run_reverse_gated(ReverseAnnealSpec spec, const std::vector<BasisState>& targets,
                                     double tol = 1e-4, int max_halvings = 4) {
  const double tau0 = spec.base.tau;
  return converge_tau(
      [&](double tau) {
        spec.base.tau = tau;
        auto r = measure_probabilities(run_reverse(spec), targets);
        r.protocol = "reverse";
        r.T_A = spec.base.T_A;
        r.tau = tau;
        return r;
      },
      tau0, tol, max_halvings);
}

}  // namespace qasat
