#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "random.hpp"

namespace qasat {

struct EigenOptions {
  int block_size = 0;         // 0 picks k + max(2, k/2); never below k
  int krylov_blocks = 6;      // blocks appended per restart cycle
  double tol = 1e-8;          // residual norm required of each wanted pair
  int max_cycles = 3000;
  std::uint64_t seed = 0x5EED5EEDULL;
  std::size_t dense_threshold = 512;  // smaller operators are diagonalized densely
};

struct EigenResult {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXd vectors;    // one column per value
  Eigen::VectorXd residuals;  // ||H v - lambda v||
  int cycles = 0;
};

namespace detail {

/// Orthonormalizes the columns of `w` against the orthonormal columns of `v`
/// and against each other: two block Gram-Schmidt passes followed by modified
/// Gram-Schmidt inside the block. Columns that collapse are replaced by fresh
/// random directions so the search space keeps growing.
inline Eigen::MatrixXd orthonormalize_against(const Eigen::MatrixXd& v, Eigen::MatrixXd w, Rng& rng) {
  const Eigen::Index dim = w.rows();
  const Eigen::Index room = dim - v.cols();
  if (room <= 0) return Eigen::MatrixXd(dim, 0);
  if (w.cols() > room) w.conservativeResize(Eigen::NoChange, room);

  const Eigen::VectorXd before = w.colwise().norm();
  for (int pass = 0; pass < 2 && v.cols() > 0; ++pass) w.noalias() -= v * (v.transpose() * w);

  Eigen::MatrixXd q(dim, w.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    Eigen::VectorXd x = w.col(j);
    double reference = before(j);
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        if (attempt > 0 && v.cols() > 0) x -= v * (v.transpose() * x);
        if (kept > 0) x -= q.leftCols(kept) * (q.leftCols(kept).transpose() * x);
      }
      const double after = x.norm();
      if (after > 1e-8 * reference && after > 1e-300) {
        q.col(kept++) = x / after;
        break;
      }
      for (Eigen::Index i = 0; i < dim; ++i) x(i) = 2.0 * uniform_real(rng) - 1.0;
      reference = x.norm();
      x -= v * (v.transpose() * x);
    }
  }
  return q.leftCols(kept);
}

}  // namespace detail

/// Lowest `k` eigenpairs of a real symmetric operator given only through
/// `apply(in, out)` (out = H in). Restarted block Krylov iteration with full
/// reorthogonalization: each cycle extends the retained Ritz vectors by the
/// residual block and its Krylov successors, then performs Rayleigh-Ritz on
/// the incrementally assembled projection. Degenerate clusters come back as an
/// arbitrary orthonormal basis of the cluster.
template <class Apply>
EigenResult lowest_eigenpairs(Apply&& apply, std::size_t dim, int k, const EigenOptions& opt = {},
                              const Eigen::MatrixXd* start = nullptr) {
  if (k < 1 || static_cast<std::size_t>(k) > dim) throw InputError("requested eigenpair count out of range");
  const auto n = static_cast<Eigen::Index>(dim);

  auto apply_block = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y(n, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      apply(std::span<const double>(x.col(j).data(), dim), std::span<double>(y.col(j).data(), dim));
    return y;
  };

  auto finish = [&](const Eigen::VectorXd& theta, const Eigen::MatrixXd& x, const Eigen::MatrixXd& hx, int cycles) {
    EigenResult r;
    r.values = theta.head(k);
    r.vectors = x.leftCols(k);
    r.residuals.resize(k);
    for (int i = 0; i < k; ++i) r.residuals(i) = (hx.col(i) - theta(i) * x.col(i)).norm();
    r.cycles = cycles;
    return r;
  };

  if (dim <= opt.dense_threshold) {
    const Eigen::MatrixXd h = apply_block(Eigen::MatrixXd::Identity(n, n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
    const Eigen::MatrixXd x = es.eigenvectors().leftCols(k);
    return finish(es.eigenvalues(), x, h * x, 0);
  }

  Rng rng(opt.seed);
  // the block never holds fewer vectors than are wanted
  const Eigen::Index b = std::min<Eigen::Index>(
      n, std::max(k, opt.block_size > 0 ? opt.block_size : k + std::max(2, k / 2)));
  const Eigen::Index keep = std::min<Eigen::Index>(n, 2 * b);

  // Search space V, its image HV and the projection T = V^T H V.
  Eigen::MatrixXd v(n, 0), hv(n, 0), t(0, 0);
  Eigen::Index last = 0;  // width of the newest block
  auto append = [&](const Eigen::MatrixXd& w) {
    const Eigen::MatrixXd hw = apply_block(w);
    const Eigen::Index m = v.cols(), c = w.cols();
    Eigen::MatrixXd grown(m + c, m + c);
    grown.topLeftCorner(m, m) = t;
    const Eigen::MatrixXd cross = v.transpose() * hw;
    grown.topRightCorner(m, c) = cross;
    grown.bottomLeftCorner(c, m) = cross.transpose();
    const Eigen::MatrixXd d = w.transpose() * hw;
    grown.bottomRightCorner(c, c) = 0.5 * (d + d.transpose());
    t = std::move(grown);
    v.conservativeResize(Eigen::NoChange, m + c);
    v.rightCols(c) = w;
    hv.conservativeResize(Eigen::NoChange, m + c);
    hv.rightCols(c) = hw;
    last = c;
  };

  Eigen::MatrixXd x0(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x0(i, j) = 2.0 * uniform_real(rng) - 1.0;
  if (start != nullptr && start->rows() == n) {
    const Eigen::Index c = std::min(b, start->cols());
    x0.leftCols(c) = start->leftCols(c);
  }
  append(detail::orthonormalize_against(v, x0, rng));

  double worst = 0.0;
  for (int cycle = 1; cycle <= opt.max_cycles; ++cycle) {
    for (int blk = 0; blk < opt.krylov_blocks && v.cols() < n; ++blk) {
      Eigen::MatrixXd w = detail::orthonormalize_against(v, hv.rightCols(last), rng);
      if (w.cols() == 0) break;
      append(w);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index r = std::min(keep, v.cols());
    Eigen::MatrixXd x = v * es.eigenvectors().leftCols(r);
    bool fresh = cycle % 16 == 0;
    Eigen::MatrixXd hx = fresh ? apply_block(x) : Eigen::MatrixXd(hv * es.eigenvectors().leftCols(r));
    const Eigen::VectorXd theta = es.eigenvalues().head(r);

    auto worst_residual = [&] {
      double w = 0.0;
      for (int i = 0; i < k; ++i) w = std::max(w, (hx.col(i) - theta(i) * x.col(i)).norm());
      return w;
    };
    worst = worst_residual();
    if (worst <= opt.tol && !fresh) {
      // the recurrence for HX drifts; confirm against a true product
      hx = apply_block(x);
      worst = worst_residual();
    }
    if (worst <= opt.tol || v.cols() == n) return finish(theta, x, hx, cycle);

    const Eigen::Index nb = std::min(b, r);
    const Eigen::MatrixXd res = hx.leftCols(nb) - x.leftCols(nb) * theta.head(nb).asDiagonal();
    v = std::move(x);
    hv = std::move(hx);
    t = (v.transpose() * hv);
    t = 0.5 * (t + t.transpose()).eval();
    last = v.cols();
    Eigen::MatrixXd q = detail::orthonormalize_against(v, res, rng);
    if (q.cols() > 0) append(q);
  }
  char msg[96];
  std::snprintf(msg, sizeof msg, "eigensolver did not converge; worst residual %.3g", worst);
  throw ConvergenceError(msg, worst);
}

}  // namespace qasat
