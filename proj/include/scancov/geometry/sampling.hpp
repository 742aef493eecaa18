#pragma once

#include "scancov/geometry/mesh.hpp"
#include "scancov/geometry/pointset.hpp"

#include <limits>

namespace scancov::geom {

/// Greedy max-min farthest point sampling. The first point is
/// `seed % |P|`; ties in the max-min step break toward the smaller index,
/// so the result is fully deterministic. Returns indices into P.
inline std::vector<int> farthest_point_sample_indices(
    const std::vector<Vec3>& points, size_t k, uint64_t seed) {
  if (k > points.size())
    throw PreconditionError("farthest_point_sample: k > |P|");
  std::vector<int> picked;
  if (k == 0) return picked;
  picked.reserve(k);
  const int first = int(seed % points.size());
  picked.push_back(first);
  std::vector<double> min_d2(points.size(),
                             std::numeric_limits<double>::max());
  for (size_t j = 1; j < k; ++j) {
    const Vec3& last = points[picked.back()];
    int best = -1;
    double best_d2 = -1.0;
    for (size_t i = 0; i < points.size(); ++i) {
      const double d2 = (points[i] - last).squaredNorm();
      if (d2 < min_d2[i]) min_d2[i] = d2;
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = int(i);
      }
    }
    picked.push_back(best);
  }
  return picked;
}

inline PointSet farthest_point_sample(const PointSet& p, size_t k,
                                      uint64_t seed) {
  const auto idx = farthest_point_sample_indices(p.points, k, seed);
  PointSet out;
  out.points.reserve(idx.size());
  for (int i : idx) out.points.push_back(p.points[i]);
  return out;
}

/// Uniform-ish surface samples: a barycentric grid on every face with target
/// spacing `h`. Used by the coverage completeness metric and test oracles.
inline std::vector<Vec3> sample_surface(const TriangleMesh& mesh, double h) {
  std::vector<Vec3> out;
  for (const auto& f : mesh.faces) {
    const Vec3 &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]],
               &c = mesh.vertices[f[2]];
    const double longest =
        std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    const int n = std::max(1, int(std::ceil(longest / h)));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j) {
        const double u = double(i) / n, v = double(j) / n;
        out.push_back(a + (b - a) * u + (c - a) * v);
      }
  }
  return out;
}

}  // namespace scancov::geom
