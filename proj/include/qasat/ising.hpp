#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "sat2.hpp"

namespace qasat {

/// Diagonal Ising Hamiltonian
///   H_P = offset - sum_i h_i s_i - sum_{i<j} J_ij s_i s_j,
/// with spins indexed from 0 and s_i = +1 for a set bit.
struct IsingModel {
  int n_spins = 0;
  std::vector<double> h;
  std::map<std::pair<int, int>, double> j;  // canonical i < j
  double offset = 0.0;

  IsingModel() = default;
  explicit IsingModel(int n) : n_spins(n), h(static_cast<std::size_t>(n), 0.0) {
    if (n < 1) throw InputError("Ising model needs at least one spin");
  }

  void add_coupling(int a, int b, double value) {
    if (a == b) throw InputError("diagonal coupling");
    check_spin(a);
    check_spin(b);
    j[{std::min(a, b), std::max(a, b)}] += value;
  }

  double coupling(int a, int b) const {
    auto it = j.find({std::min(a, b), std::max(a, b)});
    return it == j.end() ? 0.0 : it->second;
  }

  void check_spin(int i) const {
    if (i < 0 || i >= n_spins) throw InputError("spin index out of range: " + std::to_string(i));
  }

  void validate() const {
    if (static_cast<int>(h.size()) != n_spins) throw InputError("field vector length mismatch");
    for (const auto& [key, v] : j) {
      if (key.first >= key.second) throw InputError("couplings must be stored with i < j");
      check_spin(key.first);
      check_spin(key.second);
    }
  }

  friend bool operator==(const IsingModel&, const IsingModel&) = default;
};

/// Expands sum over clauses of (e1 s_i - 1)(e2 s_j - 1), so the energy of an
/// assignment is four times its number of violated clauses.
inline IsingModel map_2sat(const TwoSatProblem& p) {
  IsingModel m(p.n_vars);
  for (const Clause& c : p.clauses) {
    const int a = c.first.variable - 1;
    const int b = c.second.variable - 1;
    const double e1 = c.first.sign();
    const double e2 = c.second.sign();
    m.add_coupling(a, b, -e1 * e2);
    m.h[static_cast<std::size_t>(a)] += e1;
    m.h[static_cast<std::size_t>(b)] += e2;
    m.offset += 1.0;
  }
  return m;
}

inline double energy(const IsingModel& m, const BasisState& state) {
  if (state.size() != m.n_spins) throw InputError("state length does not match model");
  double e = m.offset;
  for (int i = 0; i < m.n_spins; ++i) e -= m.h[static_cast<std::size_t>(i)] * state.spin(i);
  for (const auto& [key, v] : m.j) e -= v * state.spin(key.first) * state.spin(key.second);
  return e;
}

/// Energy of every basis state, indexed like the state vector.
inline std::vector<double> diagonal_energies(const IsingModel& m, int cap = kDefaultMaxBits) {
  if (m.n_spins > cap)
    throw ResourceError("2^" + std::to_string(m.n_spins) + " basis states exceed cap 2^" +
                        std::to_string(cap));
  const int n = m.n_spins;
  const std::uint64_t dim = std::uint64_t{1} << n;
  struct Term {
    std::uint64_t mask_a, mask_b;
    double value;
  };
  std::vector<Term> terms;
  for (int i = 0; i < n; ++i)
    if (m.h[static_cast<std::size_t>(i)] != 0.0)
      terms.push_back({BitString::mask(n, i), 0, m.h[static_cast<std::size_t>(i)]});
  for (const auto& [key, v] : m.j)
    if (v != 0.0) terms.push_back({BitString::mask(n, key.first), BitString::mask(n, key.second), v});

  std::vector<double> out(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    double e = m.offset;
    for (const Term& t : terms) {
      const bool a = (x & t.mask_a) != 0;
      const bool same = t.mask_b == 0 ? a : (a == ((x & t.mask_b) != 0));
      e -= same ? t.value : -t.value;
    }
    out[x] = e;
  }
  return out;
}

struct EnergyLevel {
  double energy;
  std::uint64_t degeneracy;
  friend bool operator==(const EnergyLevel&, const EnergyLevel&) = default;
};

struct EnergyHistogram {
  std::vector<EnergyLevel> levels;  // ascending energy

  double ground_energy() const { return levels.at(0).energy; }
  std::uint64_t ground_degeneracy() const { return levels.at(0).degeneracy; }
  double first_excited_energy() const { return levels.at(1).energy; }
  std::uint64_t first_excited_degeneracy() const { return levels.at(1).degeneracy; }
  double gap() const { return first_excited_energy() - ground_energy(); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& l : levels) t += l.degeneracy;
    return t;
  }
};

inline constexpr double kEnergyTolerance = 1e-9;

/// Groups sorted energies; a value joins the current level when it lies within
/// `tol` of that level's lowest member.
inline EnergyHistogram histogram_of(std::vector<double> energies, double tol = kEnergyTolerance) {
  std::sort(energies.begin(), energies.end());
  EnergyHistogram hist;
  for (double e : energies) {
    if (!hist.levels.empty() && e - hist.levels.back().energy <= tol)
      ++hist.levels.back().degeneracy;
    else
      hist.levels.push_back({e, 1});
  }
  return hist;
}

inline EnergyHistogram energy_histogram(const IsingModel& m, int cap = kDefaultMaxBits) {
  return histogram_of(diagonal_energies(m, cap));
}

/// Histograms compare level by level with energies equal within `tol`.
inline bool same_spectrum(const EnergyHistogram& a, const EnergyHistogram& b, double tol = kEnergyTolerance) {
  if (a.levels.size() != b.levels.size()) return false;
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    if (a.levels[i].degeneracy != b.levels[i].degeneracy) return false;
    if (std::abs(a.levels[i].energy - b.levels[i].energy) > tol) return false;
  }
  return true;
}

inline IsingModel rescale(const IsingModel& m, double alpha) {
  if (!(alpha > 0.0)) throw InputError("rescale factor must be positive");
  IsingModel out = m;
  for (double& v : out.h) v *= alpha;
  for (auto& [key, v] : out.j) v *= alpha;
  out.offset *= alpha;
  return out;
}

/// Gauge transform s_i -> -s_i for i in `subset` (0-based spin indices).
inline IsingModel spin_reversal(const IsingModel& m, const std::set<int>& subset) {
  for (int i : subset) m.check_spin(i);
  IsingModel out = m;
  for (int i : subset) out.h[static_cast<std::size_t>(i)] = -out.h[static_cast<std::size_t>(i)];
  for (auto& [key, v] : out.j)
    if (subset.count(key.first) != subset.count(key.second)) v = -v;
  return out;
}

/// Image of a basis state under the same gauge transform.
inline BasisState spin_reversal(const BasisState& state, const std::set<int>& subset) {
  std::uint64_t x = state.index();
  for (int i : subset) {
    if (i < 0 || i >= state.size()) throw InputError("spin index out of range");
    x ^= BitString::mask(state.size(), i);
  }
  return BasisState(state.size(), x);
}

struct ChainSpec {
  int n_spins = 10;
  double coupling_magnitude = 0.5;
  std::set<int> flipped_spins;  // 0-based
};

/// Open ferromagnetic chain: ground states are the two aligned configurations,
/// level n sits 2n|J| above them with degeneracy 2 C(N-1, n).
inline IsingModel ferro_chain(const ChainSpec& spec) {
  if (spec.n_spins < 2) throw InputError("a chain needs at least two spins");
  IsingModel m(spec.n_spins);
  for (int i = 0; i + 1 < spec.n_spins; ++i) m.add_coupling(i, i + 1, std::abs(spec.coupling_magnitude));
  return spin_reversal(m, spec.flipped_spins);
}

/// Random gauge: each spin is flipped with probability 1/2.
inline std::set<int> random_gauge(int n_spins, Rng& rng) {
  std::set<int> out;
  for (int i = 0; i < n_spins; ++i)
    if (uniform_index(rng, 2) == 1) out.insert(i);
  return out;
}

/// Ensemble degeneracy summary: solution counts and first-excited-level
/// degeneracy of the mapped Ising models.
struct DegeneracyStats {
  std::vector<int> solution_counts;
  std::vector<std::uint64_t> fes_degeneracies;
  double mean_mu = 0.0;
  double fes_degeneracy_mean = 0.0;
  std::size_t sample_size = 0;
};

inline DegeneracyStats degeneracy_stats(const std::vector<TwoSatProblem>& problems, int cap = kDefaultMaxBits) {
  DegeneracyStats s;
  for (const auto& p : problems) {
    const auto hist = energy_histogram(map_2sat(p), cap);
    const bool sat = hist.ground_energy() == 0.0;
    s.solution_counts.push_back(sat ? static_cast<int>(hist.ground_degeneracy()) : 0);
    // for a satisfiable problem the first excited level is the next one up
    s.fes_degeneracies.push_back(hist.levels.size() > 1 ? hist.first_excited_degeneracy() : 0);
  }
  s.sample_size = problems.size();
  if (!problems.empty()) {
    s.mean_mu = std::accumulate(s.solution_counts.begin(), s.solution_counts.end(), 0.0) /
                static_cast<double>(problems.size());
    s.fes_degeneracy_mean =
        std::accumulate(s.fes_degeneracies.begin(), s.fes_degeneracies.end(), 0.0) /
        static_cast<double>(problems.size());
  }
  return s;
}

}  // namespace qasat
