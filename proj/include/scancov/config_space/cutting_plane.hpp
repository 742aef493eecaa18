#pragma once

/**
 * \file
 * \brief Cutting-plane construction for inlier computation: the plane
 * orientation minimizes the variance of neighboring vertex normals
 * (smallest-eigenvalue eigenvector of their covariance), and the inlier is
 * the least-squares confluence of the lines through each neighbor along
 * its normal.
 */

#include "scancov/core.hpp"

#include <Eigen/Eigenvalues>

namespace scancov::cfg {

struct CuttingPlane {
  Vec3 n_opt{0, 0, 1};
  std::vector<Vec3> neighbor_points;
  std::vector<Vec3> neighbor_normals;
  bool degenerate = false;  ///< normal covariance had rank 0
};

struct InlierResult {
  Vec3 point{0, 0, 0};
  bool rank_deficient = false;  ///< solution is minimum-norm about the centroid
};

namespace detail {

inline Mat3 normal_covariance(const std::vector<Vec3>& normals) {
  Vec3 mean = Vec3::Zero();
  for (const auto& n : normals) mean += n;
  mean /= double(normals.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& n : normals) {
    const Vec3 d = n - mean;
    cov += d * d.transpose();
  }
  return cov / double(normals.size());
}

inline Vec3 orient_toward_positive_z(Vec3 n) {
  if (std::abs(n.z()) > 1e-12) return n.z() > 0 ? n : Vec3(-n);
  if (std::abs(n.x()) > 1e-12) return n.x() > 0 ? n : Vec3(-n);
  return n.y() >= 0 ? n : Vec3(-n);
}

/// Any unit vector orthogonal to v (deterministic choice).
inline Vec3 any_orthogonal(const Vec3& v) {
  const Vec3 axis = std::abs(v.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  return v.cross(axis).normalized();
}

}  // namespace detail

struct CuttingPlaneOptions {
  /// Run the fixed-point iteration (inverse power method from a random
  /// orientation) instead of the direct eigen-solve. Both converge to the
  /// same minimizer; the iterative form exists for fidelity experiments.
  bool iterative = false;
  int max_iterations = 32;
  uint64_t seed = 0;
};

inline CuttingPlane compute_cutting_plane(
    const std::vector<Vec3>& neighbor_points,
    const std::vector<Vec3>& neighbor_normals,
    const CuttingPlaneOptions& opts = {}) {
  if (neighbor_normals.size() < 3)
    throw PreconditionError("compute_cutting_plane: need >= 3 neighbors");
  CuttingPlane plane;
  plane.neighbor_points = neighbor_points;
  plane.neighbor_normals = neighbor_normals;

  const Mat3 cov = detail::normal_covariance(neighbor_normals);
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 evals = eig.eigenvalues();  // ascending
  if (evals(2) < 1e-12) {
    // all normals identical: return an orthogonal complement, flagged
    plane.degenerate = true;
    plane.n_opt = detail::orient_toward_positive_z(
        detail::any_orthogonal(neighbor_normals.front()));
    return plane;
  }
  if (!opts.iterative) {
    plane.n_opt = detail::orient_toward_positive_z(eig.eigenvectors().col(0));
    return plane;
  }
  // inverse power iteration on (cov + mu I) from a seeded random start
  Rng rng(opts.seed);
  Vec3 n = rng.unit_vector();
  const Mat3 shifted = cov + Mat3::Identity() * (1e-9 + evals(0) * 1e-6);
  const Mat3 inv = shifted.inverse();
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vec3 next = (inv * n).normalized();
    if ((next - n).norm() < 1e-14 || (next + n).norm() < 1e-14) {
      n = next;
      break;
    }
    n = next;
  }
  plane.n_opt = detail::orient_toward_positive_z(n);
  return plane;
}

/**
 * Least-squares intersection of the lines p_v + s * n_v: solves the normal
 * equations sum(I - n n^T)(p - p_v) = 0. Rank-deficient systems (parallel
 * lines) fall back to the minimum-norm solution about the neighbor
 * centroid and are flagged.
 */
inline InlierResult compute_inlier(const CuttingPlane& plane) {
  const auto& pts = plane.neighbor_points;
  const auto& nms = plane.neighbor_normals;
  if (pts.size() < 2 || pts.size() != nms.size())
    throw PreconditionError("compute_inlier: need >= 2 neighbor lines");
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec3 n = nms[i].normalized();
    const Mat3 proj = Mat3::Identity() - n * n.transpose();
    a += proj;
    b += proj * pts[i];
  }
  InlierResult out;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
  const Vec3 evals = eig.eigenvalues();
  const double tol = std::max(evals(2), 1.0) * 1e-10;
  if (evals(0) > tol) {
    out.point = a.ldlt().solve(b);
    return out;
  }
  // minimum-norm relative to the centroid: restrict to the row space
  out.rank_deficient = true;
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= double(pts.size());
  Vec3 sol = c;
  const Vec3 rhs = b - a * c;
  for (int k = 0; k < 3; ++k) {
    if (evals(k) <= tol) continue;
    const Vec3 v = eig.eigenvectors().col(k);
    sol += v * (v.dot(rhs) / evals(k));
  }
  out.point = sol;
  return out;
}

}  // namespace scancov::cfg
