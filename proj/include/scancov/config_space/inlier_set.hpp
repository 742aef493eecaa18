#pragma once

/**
 * \file
 * \brief Safe-configuration-space anchors: strictly interior inlier points
 * of the target mesh plus the parity-based inside/outside test against the
 * nearest inlier. One nearest-neighbor lookup and one ray test per query.
 */

#include "scancov/config_space/cutting_plane.hpp"
#include "scancov/geometry/bvh.hpp"
#include "scancov/geometry/kdtree.hpp"
#include "scancov/geometry/mesh.hpp"
#include "scancov/geometry/pointset.hpp"
#include "scancov/geometry/sampling.hpp"

namespace scancov::cfg {

struct InlierSet {
  geom::PointSet inliers;
  /// representative vertex index -> index into `inliers` (-1 if discarded)
  std::vector<std::pair<int, int>> representative_map;
  geom::KdTree3 index;
  bool approximate = false;  ///< built without parity verification (open mesh)
  int discarded = 0;         ///< candidates that failed interior verification

  bool empty() const { return inliers.empty(); }
};

struct InlierBuildOptions {
  int neighbor_count = 16;
  uint64_t seed = 0;
  /// Accept non-watertight meshes: inliers fall back to normal offsets and
  /// skip parity verification (flagged `approximate`).
  bool allow_open_mesh = false;
};

/// Deterministic point well outside the mesh bounds, off-axis so that the
/// verification segments are generic.
inline Vec3 exterior_reference(const geom::TriangleMesh& mesh) {
  const auto [lo, hi] = mesh.bounds();
  const double d = (hi - lo).norm() + 1.0;
  return hi + d * Vec3(0.731, 0.577, 0.364);
}

inline bool parity_inside(const geom::TriBvh& bvh, const Vec3& p,
                          const Vec3& exterior) {
  return bvh.count_crossings(p, exterior) % 2 == 1;
}

/**
 * FPS representatives, cutting-plane inliers per representative, interior
 * verification by parity from an exterior reference. Inliers that fail
 * verification fall back to the neighbor centroid pushed inward along the
 * mean normal by half the average edge length; still-exterior points are
 * discarded and counted.
 */
inline InlierSet build_inlier_set(const geom::TriangleMesh& mesh,
                                  const geom::TriBvh& bvh, int n_rep,
                                  const InlierBuildOptions& opts = {}) {
  if (!mesh.watertight && !opts.allow_open_mesh)
    throw PreconditionError("build_inlier_set: mesh is not watertight");
  if (mesh.vertices.empty())
    throw PreconditionError("build_inlier_set: empty mesh");
  InlierSet set;
  set.approximate = !mesh.watertight;
  n_rep = std::min<int>(n_rep, int(mesh.vertices.size()));
  const auto reps =
      geom::farthest_point_sample_indices(mesh.vertices, n_rep, opts.seed);
  const geom::KdTree3 vtree(mesh.vertices);
  const Vec3 exterior = exterior_reference(mesh);

  const int k = std::min<int>(opts.neighbor_count, int(mesh.vertices.size()));
  for (const int rep : reps) {
    const Vec3& rp = mesh.vertices[rep];
    // k nearest vertices around the representative
    std::vector<std::pair<double, int>> dist;
    dist.reserve(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
      dist.emplace_back((mesh.vertices[i] - rp).squaredNorm(), int(i));
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<Vec3> pts, nms;
    Vec3 centroid = Vec3::Zero(), mean_normal = Vec3::Zero();
    for (int i = 0; i < k; ++i) {
      const int vi = dist[i].second;
      pts.push_back(mesh.vertices[vi]);
      nms.push_back(mesh.vertex_normals[vi]);
      centroid += mesh.vertices[vi];
      mean_normal += mesh.vertex_normals[vi];
    }
    centroid /= double(k);

    Vec3 candidate;
    bool have = false;
    if (k >= 3) {
      CuttingPlane plane = compute_cutting_plane(pts, nms);
      // project neighbors onto the optimal plane through the representative
      for (auto& p : plane.neighbor_points)
        p -= plane.n_opt * plane.n_opt.dot(p - rp);
      const auto inl = compute_inlier(plane);
      // parallel-line systems (flat patches) collapse onto the surface
      // plane itself; those must take the offset fallback instead
      if (!inl.rank_deficient) {
        candidate = inl.point;
        have = true;
      }
    }
    // strict interiority: parity plus real clearance from the surface, so
    // that points sitting on a face never anchor safety rays
    const double min_depth = std::min(1e-3, 0.05 * mesh.edge_length_avg);
    const auto interior_ok = [&](const Vec3& c) {
      if (bvh.distance(c) <= min_depth) return false;
      if (set.approximate) return true;
      return parity_inside(bvh, c, exterior);
    };
    const Vec3 fallback =
        centroid - mean_normal.normalized() * (0.5 * mesh.edge_length_avg);
    Vec3 chosen;
    bool ok = false;
    if (have && !set.approximate && interior_ok(candidate)) {
      chosen = candidate;
      ok = true;
    } else if (interior_ok(fallback)) {
      chosen = fallback;
      ok = true;
      if (have) ++set.discarded;
    } else if (have && set.approximate) {
      chosen = candidate;
      ok = bvh.distance(candidate) > 1e-9;
    }
    if (!ok) {
      ++set.discarded;
      set.representative_map.emplace_back(rep, -1);
      continue;
    }
    set.representative_map.emplace_back(rep, int(set.inliers.size()));
    set.inliers.points.push_back(chosen);
  }
  if (set.inliers.empty())
    throw PreconditionError("build_inlier_set: zero surviving inliers");
  set.index.build(set.inliers.points);
  return set;
}

struct SafetyResult {
  bool safe = false;      ///< outside the mesh volume
  bool boundary = false;  ///< query sat within ray epsilon of the surface
  int crossings = 0;
};

/**
 * Parity safety: odd crossing count from the query to its nearest inlier
 * means the query is outside the mesh. Points on the surface classify as
 * unsafe (their first crossing is excluded by the ray epsilon).
 */
inline SafetyResult is_safe_configuration(const Vec3& p,
                                          const geom::TriBvh& bvh,
                                          const InlierSet& inliers) {
  if (inliers.empty())
    throw PreconditionError("is_safe_configuration: no inliers");
  SafetyResult out;
  const auto [idx, d2] = inliers.index.nearest(p);
  const Vec3& anchor = inliers.inliers[idx];
  if ((p - anchor).norm() < 1e-12) {
    out.safe = false;
    return out;
  }
  const auto hits = bvh.segment_hits(p, anchor);
  out.crossings = int(hits.size());
  out.safe = out.crossings % 2 == 1;
  for (const auto& h : hits)
    if (h.t < 16 * geom::kRayEps || h.t > 1.0 - 16 * geom::kRayEps)
      out.boundary = true;
  return out;
}

/// Debug dump of the inlier cloud for visualization tooling.
inline void dump_inliers_csv(const InlierSet& set, const std::string& path) {
  geom::write_pointset_csv(set.inliers, path);
}

}  // namespace scancov::cfg
