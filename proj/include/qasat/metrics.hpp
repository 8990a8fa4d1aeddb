#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/tools/minima.hpp>

#include "bits.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "ising.hpp"
#include "schedule.hpp"

namespace qasat {

// ---------------------------------------------------------------- TTS

inline constexpr double kDefaultTarget = 0.99;

/// Expected total anneal time to see a solution once with probability
/// `target`. p == 1 needs a single run; p == 0 never succeeds (+inf).
inline double tts(double p, double T_A, double target = kDefaultTarget) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("success probability must lie in [0, 1]");
  if (!(target > 0.0 && target < 1.0)) throw InputError("target probability must lie in (0, 1)");
  if (!(T_A > 0.0)) throw InputError("annealing time must be positive");
  if (p >= 1.0 - 1e-15) return T_A;
  if (p <= 1e-15) return std::numeric_limits<double>::infinity();
  return std::log1p(-target) / std::log1p(-p) * T_A;
}

struct TtsResult {
  double p = 0.0;
  double T_A = 0.0;
  double P_target = kDefaultTarget;
  double tts = 0.0;
};

inline TtsResult tts_result(double p, double T_A, double target = kDefaultTarget) {
  return {p, T_A, target, tts(p, T_A, target)};
}

// ---------------------------------------------------------------- equilibrium

/// Converts an inverse temperature in units of 1/B(1) to kelvin.
inline constexpr double kKelvinConstant = 0.206;

inline double temperature_kelvin(double beta) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  return kKelvinConstant / beta;
}

struct EquilibriumModel {
  int g0 = 1;
  int g1 = 1;
  double delta_e = 1.0;
  double beta = 1.0;
};

/// Ground-state probability when only the two lowest levels are populated.
inline double equilibrium_p0(const EquilibriumModel& m) {
  if (m.g0 < 1 || m.g1 < 0) throw InputError("level degeneracies must be positive");
  if (m.delta_e < 0.0 || m.beta < 0.0) throw InputError("gap and beta must be non-negative");
  return 1.0 / (1.0 + static_cast<double>(m.g1) / m.g0 * std::exp(-m.beta * m.delta_e));
}

/// 1/p for a ferromagnetic chain of n spins: level k holds 2 C(n-1, k) states
/// at k * delta_e above the doubly degenerate ground level. Truncated at k_max.
inline double chain_inverse_p(int n, double delta_e, double beta, int k_max = 5) {
  if (n < 2) throw InputError("chain needs at least two spins");
  double sum = 0.0;
  for (int k = 0; k <= std::min(k_max, n - 1); ++k)
    sum += boost::math::binomial_coefficient<double>(static_cast<unsigned>(n - 1), static_cast<unsigned>(k)) *
           std::exp(-k * beta * delta_e);
  return sum;
}

struct EquilibriumRecord {
  int g0 = 1;
  int g1 = 1;
  double delta_e = 0.0;
  double p = 0.0;  // measured ground-state probability
};

struct ChainRecord {
  int n = 2;
  double delta_e = 0.0;
  double p = 0.0;
};

struct BetaFit {
  double beta = 0.0;
  double temperature = 0.0;  // kelvin
  double residual = 0.0;     // sum of squared log(1/p) deviations
};

namespace detail {

/// Minimizes f(beta) over [lo, hi]: log-spaced scan for a bracket, then Brent.
inline BetaFit minimize_beta(const std::function<double(double)>& f, double lo = 1e-4, double hi = 1e4) {
  const int grid = 161;
  const double llo = std::log(lo), lhi = std::log(hi);
  int best = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double v = f(std::exp(llo + (lhi - llo) * i / (grid - 1)));
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }
  const double a = llo + (lhi - llo) * std::max(0, best - 1) / (grid - 1);
  const double b = llo + (lhi - llo) * std::min(grid - 1, best + 1) / (grid - 1);
  const auto r = boost::math::tools::brent_find_minima([&](double lb) { return f(std::exp(lb)); }, a, b,
                                                       std::numeric_limits<double>::digits / 2);
  const double beta = std::exp(r.first);
  return {beta, temperature_kelvin(beta), r.second};
}

}  // namespace detail

/// Least-squares fit of beta on log(1/p) for two-level records.
inline BetaFit fit_beta(const std::vector<EquilibriumRecord>& records) {
  if (records.empty()) throw InputError("beta fit needs at least one record");
  bool identifiable = false;
  for (const auto& r : records) {
    if (!(r.p > 0.0 && r.p < 1.0)) throw InputError("measured probabilities must lie in (0, 1)");
    if (r.g0 < 1 || r.g1 < 1 || r.delta_e < 0.0) throw InputError("malformed equilibrium record");
    identifiable = identifiable || r.delta_e > 0.0;
  }
  if (!identifiable) throw InputError("beta is unidentifiable when every gap is zero");
  return detail::minimize_beta([&](double beta) {
    double s = 0.0;
    for (const auto& r : records) {
      const double d = std::log(1.0 / r.p) - std::log(1.0 / equilibrium_p0({r.g0, r.g1, r.delta_e, beta}));
      s += d * d;
    }
    return s;
  });
}

/// Same fit with the truncated chain partition sum as the model.
inline BetaFit fit_beta_chain(const std::vector<ChainRecord>& records, int k_max = 5) {
  if (records.empty()) throw InputError("beta fit needs at least one record");
  bool identifiable = false;
  for (const auto& r : records) {
    if (!(r.p > 0.0 && r.p < 1.0)) throw InputError("measured probabilities must lie in (0, 1)");
    if (r.n < 2 || r.delta_e < 0.0) throw InputError("malformed chain record");
    identifiable = identifiable || r.delta_e > 0.0;
  }
  if (!identifiable) throw InputError("beta is unidentifiable when every gap is zero");
  return detail::minimize_beta([&](double beta) {
    double s = 0.0;
    for (const auto& r : records) {
      const double d = std::log(1.0 / r.p) - std::log(chain_inverse_p(r.n, r.delta_e, beta, k_max));
      s += d * d;
    }
    return s;
  });
}

// ---------------------------------------------------------------- scaling fits

enum class Statistic { median, mean };

inline std::string to_string(Statistic s) { return s == Statistic::median ? "median" : "mean"; }

struct ScalingFit {
  std::vector<std::pair<double, double>> points;  // (N, value)
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // Euclidean norm of ln(value) residuals
  Statistic statistic = Statistic::median;

  double predict(double n) const { return std::exp(intercept + exponent * n); }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
  double r2 = 1.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InputError("line fit needs at least two paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - f.sse / syy : 1.0;
  return f;
}

inline ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points,
                                       Statistic statistic = Statistic::median) {
  if (points.size() < 3) throw InputError("scaling fit needs at least three points");
  std::vector<double> x, y;
  for (auto [n, v] : points) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("scaling fit needs positive finite values");
    x.push_back(n);
    y.push_back(std::log(v));
  }
  const LineFit f = fit_line(x, y);
  return {points, f.slope, f.intercept, std::sqrt(f.sse), statistic};
}

/// Lower-middle median; +inf sorts last, so it wins only when at least half
/// the values are infinite.
inline double median_lower(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty group");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

inline double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw InputError("mean of an empty group");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

/// Per-N statistic of the grouped values, ascending in N.
inline std::vector<std::pair<double, double>> aggregate_ensemble(const std::map<int, std::vector<double>>& groups,
                                                                 Statistic statistic = Statistic::median) {
  if (groups.empty()) throw InputError("no groups to aggregate");
  std::vector<std::pair<double, double>> out;
  for (const auto& [n, values] : groups)
    out.emplace_back(n, statistic == Statistic::median ? median_lower(values) : mean_of(values));
  return out;
}

// ---------------------------------------------------------------- transition scan

struct TransitionRecord {
  double T_A = 0.0;
  double tau = 0.0;
  double p = 0.0;
  double one_minus_p = 0.0;
};

struct TransitionScan {
  std::vector<TransitionRecord> records;
  std::size_t split = 0;     // records [0, split) form the exponential regime
  double rate = 0.0;         // C' in 1 - p ~ exp(-C' T_A)
  double exp_intercept = 0.0;
  double exp_r2 = 0.0;
  double power_exponent = 0.0;  // slope of ln(1 - p) against ln T_A
  double power_intercept = 0.0;
  double power_r2 = 0.0;
};

/// Floor applied to 1 - p before taking logarithms.
inline constexpr double kTransitionFloor = 1e-16;

/// Splits the records into an exponential head (ln(1-p) linear in T_A) and a
/// power-law tail (ln(1-p) linear in ln T_A) at the point that minimizes the
/// combined squared residual; each side keeps at least `min_points`.
inline void fit_transition_regimes(TransitionScan& scan, std::size_t min_points = 3) {
  const auto& rec = scan.records;
  if (rec.size() < 2 * min_points) throw InputError("transition fit needs at least 2 * min_points records");
  std::vector<double> t, lt, y;
  for (const auto& r : rec) {
    t.push_back(r.T_A);
    lt.push_back(std::log(r.T_A));
    y.push_back(std::log(std::max(r.one_minus_p, kTransitionFloor)));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = min_points; k + min_points <= rec.size(); ++k) {
    const LineFit head = fit_line({t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k)},
                                  {y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k)});
    const LineFit tail = fit_line({lt.begin() + static_cast<std::ptrdiff_t>(k), lt.end()},
                                  {y.begin() + static_cast<std::ptrdiff_t>(k), y.end()});
    if (head.sse + tail.sse < best) {
      best = head.sse + tail.sse;
      scan.split = k;
      scan.rate = -head.slope;
      scan.exp_intercept = head.intercept;
      scan.exp_r2 = head.r2;
      scan.power_exponent = tail.slope;
      scan.power_intercept = tail.intercept;
      scan.power_r2 = tail.r2;
    }
  }
}

/// Default step policy: the requested tau, but at least 50 steps per anneal.
inline std::function<double(double)> capped_tau(double tau) {
  return [tau](double T_A) { return std::min(tau, T_A / 50.0); };
}

inline TransitionScan transition_scan(const IsingModel& model, const std::vector<BasisState>& ground_states,
                                      const Schedule& schedule, const std::vector<double>& T_A_grid,
                                      const std::function<double(double)>& tau_policy = capped_tau(0.02)) {
  if (T_A_grid.size() < 2) throw InputError("transition scan needs at least two annealing times");
  for (std::size_t i = 0; i < T_A_grid.size(); ++i)
    if (!(T_A_grid[i] > 0.0) || (i > 0 && !(T_A_grid[i] > T_A_grid[i - 1])))
      throw InputError("annealing-time grid must be positive and strictly ascending");
  TransitionScan scan;
  for (double T_A : T_A_grid) {
    AnnealSpec spec{model, schedule, T_A, tau_policy(T_A)};
    const SamplingResult r = measure_probabilities(run_standard(spec), ground_states);
    const double p = std::min(1.0, r.total_success);
    scan.records.push_back({T_A, spec.tau, p, 1.0 - p});
  }
  if (scan.records.size() >= 6) fit_transition_regimes(scan);
  return scan;
}

// ---------------------------------------------------------------- external samples

struct SampleCounts {
  std::map<BasisState, long long> counts;
  std::string annealer;
  double T_A = 0.0;
  long long num_reads = 0;  // total reads; defaults to the sum of counts

  long long total() const {
    long long s = 0;
    for (const auto& [b, c] : counts) s += c;
    return s;
  }
};

inline SamplingResult counts_to_sampling(const SampleCounts& counts, const std::vector<BasisState>& targets) {
  const long long seen = counts.total();
  const long long reads = counts.num_reads > 0 ? counts.num_reads : seen;
  if (reads <= 0) throw InputError("sample counts contain no reads");
  if (reads < seen) throw InputError("num_reads is smaller than the sum of counts");
  SamplingResult r;
  r.protocol = "imported";
  r.T_A = counts.T_A;
  std::set<BasisState> unique;
  for (const auto& t : targets) {
    if (!unique.insert(t).second) throw InputError("duplicate target state " + t.str());
    const auto it = counts.counts.find(t);
    const double p = it == counts.counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(reads);
    r.targets.push_back(t);
    r.probabilities.push_back(p);
    r.total_success += p;
  }
  return r;
}

}  // namespace qasat
