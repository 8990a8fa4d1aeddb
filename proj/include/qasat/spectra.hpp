#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eigensolver.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "ising.hpp"
#include "schedule.hpp"
#include "state.hpp"

namespace qasat {

/// Eigenvalues closer than this are treated as one degenerate cluster.
inline constexpr double kClusterWindow = 1e-7;

struct SpectrumSlice {
  double s = 0.0;
  std::vector<double> eigenvalues;  // ascending, offset included
  Eigen::MatrixXd eigenvectors;     // empty unless retained
  std::vector<double> residuals;
};

/// Contiguous runs of eigenvalues within `window` of their neighbour, as
/// (first index, size) pairs.
inline std::vector<std::pair<int, int>> degenerate_clusters(const std::vector<double>& values,
                                                            double window = kClusterWindow) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    if (!out.empty() && values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(i - 1)] <= window)
      ++out.back().second;
    else
      out.emplace_back(i, 1);
  }
  return out;
}

/// Matrix-free H(s) = A(s) H_I + B(s) H_P on real vectors, built on the same
/// kernels as the time evolution.
class InstantaneousHamiltonian {
 public:
  InstantaneousHamiltonian(const DiagonalHamiltonian& problem, double a, double b)
      : problem_(&problem), a_(a), b_(b) {}

  std::size_t dim() const { return problem_->energies().size(); }

  void operator()(std::span<const double> in, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    kernels::add_transverse<double>(in, out, problem_->n_qubits(), a_);
    kernels::add_diagonal<double>(in, out, problem_->energies(), b_);
  }

 private:
  const DiagonalHamiltonian* problem_;
  double a_;
  double b_;
};

/// Low-lying spectrum of one model along a schedule. Successive solves reuse
/// the previous eigenvectors as their starting block.
class SpectrumSolver {
 public:
  SpectrumSolver(const IsingModel& model, Schedule schedule, EigenOptions options = {})
      : problem_(model), schedule_(std::move(schedule)), options_(options) {}

  const DiagonalHamiltonian& problem() const noexcept { return problem_; }
  const Schedule& schedule() const noexcept { return schedule_; }

  SpectrumSlice solve(double s, int k, bool keep_vectors = true) {
    if (s < 0.0 || s > 1.0) throw InputError("s must lie in [0, 1]");
    const InstantaneousHamiltonian h(problem_, schedule_.a(s), schedule_.b(s));
    const Eigen::MatrixXd* start = warm_.cols() > 0 ? &warm_ : nullptr;
    EigenResult r = lowest_eigenpairs(h, h.dim(), k, options_, start);
    SpectrumSlice slice;
    slice.s = s;
    slice.eigenvalues.assign(r.values.data(), r.values.data() + r.values.size());
    slice.residuals.assign(r.residuals.data(), r.residuals.data() + r.residuals.size());
    warm_ = r.vectors;
    if (keep_vectors) slice.eigenvectors = std::move(r.vectors);
    return slice;
  }

 private:
  DiagonalHamiltonian problem_;
  Schedule schedule_;
  EigenOptions options_;
  Eigen::MatrixXd warm_;
};

inline SpectrumSlice instantaneous_spectrum(const IsingModel& model, const Schedule& schedule, double s, int k,
                                            const EigenOptions& options = {}) {
  return SpectrumSolver(model, schedule, options).solve(s, k);
}

inline std::vector<SpectrumSlice> spectrum_scan(const IsingModel& model, const Schedule& schedule,
                                                const std::vector<double>& s_grid, int k,
                                                const EigenOptions& options = {}) {
  SpectrumSolver solver(model, schedule, options);
  std::vector<SpectrumSlice> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.push_back(solver.solve(s, k, false));
  return out;
}

struct MinGap {
  double s_star;
  double gap;
};

/// Locates the minimum of lambda_b(s) - lambda_a(s) (levels counted from 1):
/// the best point of `coarse_grid` is refined by golden-section search over its
/// neighbouring grid interval until the bracket is narrower than `refine_tol`.
inline MinGap min_gap(const IsingModel& model, const Schedule& schedule, int level_a, int level_b,
                      std::vector<double> coarse_grid, double refine_tol = 1e-6,
                      const EigenOptions& options = {}) {
  if (level_a < 1 || level_b <= level_a) throw InputError("min_gap needs 1 <= level_a < level_b");
  if (coarse_grid.empty()) throw InputError("min_gap needs a non-empty grid");
  std::sort(coarse_grid.begin(), coarse_grid.end());
  SpectrumSolver solver(model, schedule, options);
  auto gap_at = [&](double s) {
    const auto slice = solver.solve(s, level_b, false);
    return slice.eigenvalues[static_cast<std::size_t>(level_b - 1)] -
           slice.eigenvalues[static_cast<std::size_t>(level_a - 1)];
  };

  std::size_t best = 0;
  double best_gap = gap_at(coarse_grid[0]);
  for (std::size_t i = 1; i < coarse_grid.size(); ++i) {
    const double g = gap_at(coarse_grid[i]);
    if (g < best_gap) {
      best_gap = g;
      best = i;
    }
  }
  double lo = coarse_grid[best == 0 ? 0 : best - 1];
  double hi = coarse_grid[std::min(best + 1, coarse_grid.size() - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = gap_at(x1), f2 = gap_at(x2);
  while (hi - lo > refine_tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = gap_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = gap_at(x2);
    }
  }
  MinGap out{0.5 * (lo + hi), 0.0};
  out.gap = gap_at(out.s_star);
  if (best_gap < out.gap) out = {coarse_grid[best], best_gap};
  return out;
}

struct ClusterOverlap {
  int first_level;  // 0-based
  int size;
  double overlap;
};

struct OverlapSample {
  double t = 0.0;
  double s = 0.0;
  std::vector<double> eigenvalues;
  std::vector<double> overlaps;  // |<phi_m(s)|psi(t)>|^2
  std::vector<ClusterOverlap> clusters;
};

struct OverlapTrace {
  std::vector<OverlapSample> samples;
};

/// Squared overlaps of `psi` with the retained eigenvectors of `slice`, per
/// vector and summed over degenerate clusters.
inline OverlapSample overlaps_with(const StateVector& psi, const SpectrumSlice& slice) {
  OverlapSample sample;
  sample.s = slice.s;
  sample.eigenvalues = slice.eigenvalues;
  const auto& vecs = slice.eigenvectors;
  for (Eigen::Index m = 0; m < vecs.cols(); ++m) {
    Complex c{};
    for (std::size_t i = 0; i < psi.dim(); ++i) c += vecs(static_cast<Eigen::Index>(i), m) * psi[i];
    sample.overlaps.push_back(std::norm(c));
  }
  for (auto [first, size] : degenerate_clusters(slice.eigenvalues)) {
    double sum = 0.0;
    for (int i = first; i < first + size; ++i) sum += sample.overlaps[static_cast<std::size_t>(i)];
    sample.clusters.push_back({first, size, sum});
  }
  return sample;
}

/// Runs a protocol and records overlaps with the k lowest instantaneous
/// eigenstates at `n_samples` evenly spaced step boundaries (first and last
/// included).
inline OverlapTrace overlap_trace(const IsingModel& model, const Schedule& schedule, double tau,
                                  StateVector psi, const std::vector<Segment>& segments, int k, int n_samples,
                                  const EigenOptions& options = {}) {
  if (n_samples < 2) throw InputError("overlap trace needs at least two samples");
  if (k < 1) throw InputError("overlap trace needs k >= 1");
  const Propagator prop(model, schedule, tau);
  SpectrumSolver solver(model, schedule, options);
  const std::size_t total = prop.total_steps(segments);
  std::vector<std::size_t> marks;
  for (int j = 0; j < n_samples; ++j)
    marks.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(total) * j / static_cast<double>(n_samples - 1))));
  OverlapTrace trace;
  prop.run(psi, segments, marks, [&](const StateVector& state, double t, double s) {
    OverlapSample sample = overlaps_with(state, solver.solve(s, k, true));
    sample.t = t;
    trace.samples.push_back(std::move(sample));
  });
  return trace;
}

inline OverlapTrace overlap_trace(const AnnealSpec& spec, int k, int n_samples, const EigenOptions& options = {}) {
  spec.validate();
  return overlap_trace(spec.model, spec.schedule, spec.tau, initial_state_uniform(spec.model.n_spins),
                       standard_segments(spec.T_A), k, n_samples, options);
}

inline OverlapTrace overlap_trace(const ReverseAnnealSpec& spec, int k, int n_samples,
                                  const EigenOptions& options = {}) {
  spec.validate();
  return overlap_trace(spec.base.model, spec.base.schedule, spec.base.tau, basis_state(spec.initial),
                       reverse_segments(spec.base.T_A, spec.s_r, spec.T_W), k, n_samples, options);
}

}  // namespace qasat
