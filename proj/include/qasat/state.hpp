#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "ising.hpp"

namespace qasat {

using Complex = std::complex<double>;

/// 2^N amplitudes indexed like BitString::index().
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n_qubits, int cap = kDefaultMaxBits) : n_(n_qubits) {
    if (n_qubits < 1) throw InputError("state needs at least one qubit");
    if (n_qubits > cap)
      throw ResourceError("state of " + std::to_string(n_qubits) + " qubits exceeds cap " + std::to_string(cap));
    amp_.assign(std::size_t{1} << n_qubits, Complex{});
  }

  int n_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amp_.size(); }
  std::span<Complex> amplitudes() noexcept { return amp_; }
  std::span<const Complex> amplitudes() const noexcept { return amp_; }
  Complex& operator[](std::size_t i) { return amp_[i]; }
  const Complex& operator[](std::size_t i) const { return amp_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const Complex& c : amp_) s += std::norm(c);
    return s;
  }

  double probability(const BasisState& b) const {
    if (b.size() != n_) throw InputError("basis state length does not match register");
    return std::norm(amp_[b.index()]);
  }

 private:
  int n_ = 0;
  std::vector<Complex> amp_;
};

/// Ground state of H_I = -sum_i sigma^x_i: every amplitude 2^(-N/2).
inline StateVector initial_state_uniform(int n, int cap = kDefaultMaxBits) {
  StateVector psi(n, cap);
  const double a = std::pow(2.0, -0.5 * n);
  for (Complex& c : psi.amplitudes()) c = a;
  return psi;
}

inline StateVector basis_state(const BasisState& bits, int cap = kDefaultMaxBits) {
  StateVector psi(bits.size(), cap);
  psi[bits.index()] = 1.0;
  return psi;
}

inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw InputError("inner product of unequal registers");
  Complex s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Kernels shared by the time evolution and the matrix-free eigensolver.
namespace kernels {

/// out += coeff * H_I in, with H_I = -sum_i sigma^x_i. Works for real and
/// complex amplitudes.
template <class T>
void add_transverse(std::span<const T> in, std::span<T> out, int n, double coeff) {
  const std::size_t dim = in.size();
  for (int q = 0; q < n; ++q) {
    const std::size_t m = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim; ++i) out[i] -= coeff * in[i ^ m];
  }
}

/// out += coeff * diag(energy) in.
template <class T>
void add_diagonal(std::span<const T> in, std::span<T> out, std::span<const double> energy, double coeff) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] += coeff * energy[i] * in[i];
}

/// psi <- exp(-i angle H_I) psi = prod_q (cos(angle) + i sin(angle) sigma^x_q) psi.
inline void rotate_transverse(std::span<Complex> psi, int n, double angle) {
  if (angle == 0.0) return;
  const double c = std::cos(angle);
  const Complex is{0.0, std::sin(angle)};
  const std::size_t dim = psi.size();
  for (int q = 0; q < n; ++q) {
    const std::size_t m = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * m) {
      for (std::size_t i = base; i < base + m; ++i) {
        const Complex a = psi[i];
        const Complex b = psi[i + m];
        psi[i] = c * a + is * b;
        psi[i + m] = is * a + c * b;
      }
    }
  }
}

}  // namespace kernels

/// Diagonal problem Hamiltonian in the computational basis. Energies are
/// compressed to a table of distinct levels when there are few of them, so a
/// phase step costs one complex exponential per level instead of per amplitude.
class DiagonalHamiltonian {
 public:
  DiagonalHamiltonian() = default;
  explicit DiagonalHamiltonian(const IsingModel& m, int cap = kDefaultMaxBits)
      : n_(m.n_spins), energy_(diagonal_energies(m, cap)) {
    std::vector<double> sorted = energy_;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() <= 4096 && sorted.size() * 4 <= energy_.size()) {
      levels_ = std::move(sorted);
      level_of_.resize(energy_.size());
      for (std::size_t i = 0; i < energy_.size(); ++i)
        level_of_[i] = static_cast<std::uint16_t>(
            std::lower_bound(levels_.begin(), levels_.end(), energy_[i]) - levels_.begin());
    }
  }

  int n_qubits() const noexcept { return n_; }
  std::span<const double> energies() const noexcept { return energy_; }

  /// psi <- exp(-i t H_P) psi.
  void apply_phase(std::span<Complex> psi, double t) const {
    if (t == 0.0) return;
    if (!levels_.empty()) {
      std::vector<Complex> phase(levels_.size());
      for (std::size_t l = 0; l < levels_.size(); ++l) phase[l] = std::polar(1.0, -t * levels_[l]);
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= phase[level_of_[i]];
    } else {
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, -t * energy_[i]);
    }
  }

  double expectation(const StateVector& psi) const {
    double e = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) e += energy_[i] * std::norm(psi[i]);
    return e;
  }

 private:
  int n_ = 0;
  std::vector<double> energy_;
  std::vector<double> levels_;
  std::vector<std::uint16_t> level_of_;
};

/// <psi| H_I |psi>.
inline double transverse_expectation(const StateVector& psi) {
  std::vector<Complex> out(psi.dim());
  kernels::add_transverse<Complex>(psi.amplitudes(), out, psi.n_qubits(), 1.0);
  Complex s{};
  for (std::size_t i = 0; i < psi.dim(); ++i) s += std::conj(psi[i]) * out[i];
  return s.real();
}

}  // namespace qasat
