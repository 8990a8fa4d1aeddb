#pragma once

#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "bits.hpp"
#include "errors.hpp"

namespace qasat {

/// First-order degenerate perturbation theory of the transverse field inside
/// the ground subspace: V_ij = <psi_i| H_I |psi_j>.
struct PerturbationMatrix {
  std::vector<BasisState> ground_states;
  Eigen::MatrixXd entries;

  std::size_t size() const { return ground_states.size(); }
};

struct PerturbPrediction {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> ground_vector;
  std::vector<double> probabilities;
  bool degenerate_ground = false;  // lowest eigenvalue repeated: probabilities are not a unique prediction
};

/// Eigenvalues closer than this count as one eigenspace of V.
inline constexpr double kPerturbDegeneracy = 1e-9;

inline PerturbationMatrix build_perturbation_matrix(const std::vector<BasisState>& ground_states) {
  if (ground_states.empty()) throw InputError("perturbation matrix needs at least one state");
  std::set<BasisState> seen;
  for (const auto& g : ground_states) {
    if (g.size() != ground_states.front().size()) throw InputError("ground states differ in length");
    if (!seen.insert(g).second) throw InputError("duplicate ground state " + g.str());
  }
  const auto n = static_cast<Eigen::Index>(ground_states.size());
  PerturbationMatrix v{ground_states, Eigen::MatrixXd::Zero(n, n)};
  // -sum_q sigma^x_q links basis states one flip apart with amplitude -1.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (hamming_distance(ground_states[static_cast<std::size_t>(i)], ground_states[static_cast<std::size_t>(j)]) == 1)
        v.entries(i, j) = -1.0;
  return v;
}

namespace detail {

inline void fix_sign(Eigen::Ref<Eigen::VectorXd> x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-12) {
      if (x(i) < 0.0) x = -x;
      return;
    }
  }
}

}  // namespace detail

struct PerturbEigenbasis {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Eigendecomposition of V with a reproducible basis: inside each degenerate
/// eigenspace the vectors are obtained by projecting e_0, e_1, ... in turn and
/// orthonormalizing; every vector then gets its first nonzero component positive.
inline PerturbEigenbasis canonical_eigenbasis(const PerturbationMatrix& v) {
  const Eigen::Index n = v.entries.rows();
  if (n == 0 || v.entries.cols() != n || static_cast<std::size_t>(n) != v.ground_states.size())
    throw InputError("malformed perturbation matrix");
  if (!v.entries.isApprox(v.entries.transpose(), 1e-12)) throw InputError("perturbation matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.entries);
  if (es.info() != Eigen::Success) throw Error("perturbation matrix eigendecomposition failed");

  PerturbEigenbasis out{es.eigenvalues(), Eigen::MatrixXd(n, n)};
  Eigen::Index first = 0;
  while (first < n) {
    Eigen::Index last = first + 1;
    while (last < n && out.values(last) - out.values(last - 1) < kPerturbDegeneracy) ++last;
    const Eigen::Index size = last - first;
    const Eigen::MatrixXd u = es.eigenvectors().middleCols(first, size);
    Eigen::Index made = 0;
    for (Eigen::Index e = 0; e < n && made < size; ++e) {
      Eigen::VectorXd w = u * u.row(e).transpose();  // projection of e_e
      for (Eigen::Index j = 0; j < made; ++j) w -= out.vectors.col(first + j).dot(w) * out.vectors.col(first + j);
      const double norm = w.norm();
      if (norm > 1e-8) out.vectors.col(first + made++) = w / norm;
    }
    for (Eigen::Index j = first; j < last; ++j) detail::fix_sign(out.vectors.col(j));
    first = last;
  }
  return out;
}

inline PerturbPrediction predict_sampling(const PerturbationMatrix& v) {
  const PerturbEigenbasis basis = canonical_eigenbasis(v);
  PerturbPrediction p;
  p.eigenvalues.assign(basis.values.data(), basis.values.data() + basis.values.size());
  const Eigen::VectorXd a = basis.vectors.col(0);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    p.ground_vector.push_back(a(i));
    p.probabilities.push_back(a(i) * a(i));
  }
  p.degenerate_ground = basis.values.size() > 1 && basis.values(1) - basis.values(0) < kPerturbDegeneracy;
  return p;
}

/// Coefficients of ground state `state_index` (0-based) in the canonical
/// eigenbasis of V.
inline std::vector<double> decompose_in_eigenbasis(const PerturbationMatrix& v, std::size_t state_index) {
  if (state_index >= v.size()) throw InputError("ground state index out of range");
  const PerturbEigenbasis basis = canonical_eigenbasis(v);
  const Eigen::VectorXd c = basis.vectors.row(static_cast<Eigen::Index>(state_index)).transpose();
  return {c.data(), c.data() + c.size()};
}

}  // namespace qasat
