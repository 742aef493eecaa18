#pragma once

/**
 * \file
 * \brief Bounding-volume hierarchy over mesh triangles: segment intersection
 * counting (for parity safety checks and occlusion tests), first-hit ray
 * casting (LiDAR model), and nearest point-on-surface queries.
 */

#include "scancov/core.hpp"
#include "scancov/geometry/mesh.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace scancov::geom {

struct SegmentHit {
  double t;      ///< parameter along the segment, in (0, 1)
  int face;      ///< triangle index
  Vec3 point;    ///< hit position
};

/// Barycentric tolerance of the triangle test; hits with t <= eps or
/// t >= 1-eps are excluded so that segment endpoints lying on the surface
/// count as zero crossings.
inline constexpr double kRayEps = 1e-9;

namespace detail {

/// Moller-Trumbore with relaxed barycentric bounds. Returns t in segment
/// parameterization or a negative value on miss.
inline double segment_triangle(const Vec3& a, const Vec3& dir, const Vec3& v0,
                               const Vec3& v1, const Vec3& v2) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-14) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 tv = a - v0;
  const double u = tv.dot(pv) * inv;
  if (u < -kRayEps || u > 1.0 + kRayEps) return -1.0;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < -kRayEps || u + v > 1.0 + kRayEps) return -1.0;
  return e2.dot(qv) * inv;
}

inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a,
                                      const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());

  void grow(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void grow(const Aabb& o) {
    lo = lo.cwiseMin(o.lo);
    hi = hi.cwiseMax(o.hi);
  }

  bool intersects_segment(const Vec3& a, const Vec3& d, double tmax) const {
    double t0 = 0.0, t1 = tmax;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(d[i]) < 1e-300) {
        if (a[i] < lo[i] || a[i] > hi[i]) return false;
      } else {
        const double inv = 1.0 / d[i];
        double ta = (lo[i] - a[i]) * inv;
        double tb = (hi[i] - a[i]) * inv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
      }
    }
    return true;
  }

  double dist2(const Vec3& p) const {
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
      d2 += d * d;
    }
    return d2;
  }
};

}  // namespace detail

class TriBvh {
 public:
  TriBvh() = default;

  explicit TriBvh(const TriangleMesh& mesh) { build(mesh); }

  void build(const TriangleMesh& mesh) {
    verts_ = mesh.vertices;
    tris_ = mesh.faces;
    order_.resize(tris_.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.clear();
    root_ = tris_.empty() ? -1 : build_range(0, int(tris_.size()));
  }

  bool empty() const { return tris_.empty(); }
  size_t triangle_count() const { return tris_.size(); }

  /**
   * Crossings of the closed segment a->b, each with t in (eps, 1-eps).
   * Coincident hits (equal t, i.e. an edge or vertex crossing reported by
   * several incident faces) are merged into one, keeping parity exact on
   * watertight meshes. Matches brute force over all faces.
   */
  std::vector<SegmentHit> segment_hits(const Vec3& a, const Vec3& b,
                                       double t_head = kRayEps,
                                       double t_tail = 1.0 - kRayEps) const {
    if ((b - a).squaredNorm() == 0.0)
      throw PreconditionError("segment_hits: degenerate segment");
    std::vector<SegmentHit> hits;
    const Vec3 d = b - a;
    if (root_ >= 0) collect_hits(root_, a, d, t_head, t_tail, hits);
    std::sort(hits.begin(), hits.end(), [](const SegmentHit& x, const SegmentHit& y) {
      return x.t != y.t ? x.t < y.t : x.face < y.face;
    });
    // merge duplicate crossings through shared edges/vertices
    std::vector<SegmentHit> merged;
    for (const auto& h : hits)
      if (merged.empty() || h.t - merged.back().t > 1e-10) merged.push_back(h);
    return merged;
  }

  int count_crossings(const Vec3& a, const Vec3& b) const {
    return int(segment_hits(a, b).size());
  }

  /// First hit along ray a + t*dir with t in (0, tmax]; returns t or -1.
  double first_hit(const Vec3& a, const Vec3& dir, double tmax,
                   int* face_out = nullptr) const {
    double best = -1.0;
    int face = -1;
    if (root_ >= 0) nearest_hit(root_, a, dir, tmax, best, face);
    if (face_out) *face_out = face;
    return face >= 0 ? best : -1.0;
  }

  struct SurfacePoint {
    Vec3 point;
    int face = -1;
    double dist = std::numeric_limits<double>::max();
  };

  /// Closest point on the surface to p (exact, branch and bound).
  SurfacePoint nearest_point(const Vec3& p) const {
    SurfacePoint sp;
    if (root_ >= 0) {
      double best2 = std::numeric_limits<double>::max();
      nearest_surface(root_, p, best2, sp);
      sp.dist = std::sqrt(best2);
    }
    return sp;
  }

  double distance(const Vec3& p) const { return nearest_point(p).dist; }

 private:
  struct Node {
    detail::Aabb box;
    int left = -1, right = -1;
    int begin = 0, end = 0;
    bool leaf = false;
  };

  static constexpr int kLeafTris = 4;

  detail::Aabb tri_box(int t) const {
    detail::Aabb b;
    for (int k = 0; k < 3; ++k) b.grow(verts_[tris_[t][k]]);
    return b;
  }

  int build_range(int begin, int end) {
    Node n;
    for (int i = begin; i < end; ++i) n.box.grow(tri_box(order_[i]));
    if (end - begin <= kLeafTris) {
      n.leaf = true;
      n.begin = begin;
      n.end = end;
      nodes_.push_back(n);
      return int(nodes_.size()) - 1;
    }
    detail::Aabb cb;
    for (int i = begin; i < end; ++i) {
      const auto& t = tris_[order_[i]];
      cb.grow((verts_[t[0]] + verts_[t[1]] + verts_[t[2]]) / 3.0);
    }
    int axis = 0;
    (cb.hi - cb.lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int x, int y) {
                       const auto cx = (verts_[tris_[x][0]] + verts_[tris_[x][1]] +
                                        verts_[tris_[x][2]])[axis];
                       const auto cy = (verts_[tris_[y][0]] + verts_[tris_[y][1]] +
                                        verts_[tris_[y][2]])[axis];
                       if (cx != cy) return cx < cy;
                       return x < y;
                     });
    const int self = int(nodes_.size());
    nodes_.push_back(n);
    const int l = build_range(begin, mid);
    const int r = build_range(mid, end);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  void collect_hits(int ni, const Vec3& a, const Vec3& d, double t0, double t1,
                    std::vector<SegmentHit>& hits) const {
    const Node& n = nodes_[ni];
    if (!n.box.intersects_segment(a, d, 1.0)) return;
    if (n.leaf) {
      for (int i = n.begin; i < n.end; ++i) {
        const int f = order_[i];
        const auto& t = tris_[f];
        const double th = detail::segment_triangle(a, d, verts_[t[0]],
                                                   verts_[t[1]], verts_[t[2]]);
        if (th > t0 && th < t1) hits.push_back({th, f, a + d * th});
      }
      return;
    }
    collect_hits(n.left, a, d, t0, t1, hits);
    collect_hits(n.right, a, d, t0, t1, hits);
  }

  void nearest_hit(int ni, const Vec3& a, const Vec3& d, double tmax,
                   double& best, int& face) const {
    const Node& n = nodes_[ni];
    if (!n.box.intersects_segment(a, d, face >= 0 ? best : tmax)) return;
    if (n.leaf) {
      for (int i = n.begin; i < n.end; ++i) {
        const int f = order_[i];
        const auto& t = tris_[f];
        const double th = detail::segment_triangle(a, d, verts_[t[0]],
                                                   verts_[t[1]], verts_[t[2]]);
        if (th > kRayEps && th <= tmax && (face < 0 || th < best)) {
          best = th;
          face = f;
        }
      }
      return;
    }
    nearest_hit(n.left, a, d, tmax, best, face);
    nearest_hit(n.right, a, d, tmax, best, face);
  }

  void nearest_surface(int ni, const Vec3& p, double& best2,
                       SurfacePoint& sp) const {
    const Node& n = nodes_[ni];
    if (n.box.dist2(p) >= best2) return;
    if (n.leaf) {
      for (int i = n.begin; i < n.end; ++i) {
        const int f = order_[i];
        const auto& t = tris_[f];
        const Vec3 c = detail::closest_point_on_triangle(
            p, verts_[t[0]], verts_[t[1]], verts_[t[2]]);
        const double d2 = (c - p).squaredNorm();
        if (d2 < best2) {
          best2 = d2;
          sp.point = c;
          sp.face = f;
        }
      }
      return;
    }
    const double dl = nodes_[n.left].box.dist2(p);
    const double dr = nodes_[n.right].box.dist2(p);
    if (dl < dr) {
      nearest_surface(n.left, p, best2, sp);
      nearest_surface(n.right, p, best2, sp);
    } else {
      nearest_surface(n.right, p, best2, sp);
      nearest_surface(n.left, p, best2, sp);
    }
  }

  std::vector<Vec3> verts_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Segment crossing count plus hits, per the module contract. `origin` and
/// `target` must differ.
inline std::vector<SegmentHit> ray_mesh_intersections(const Vec3& origin,
                                                      const Vec3& target,
                                                      const TriBvh& bvh) {
  return bvh.segment_hits(origin, target);
}

}  // namespace scancov::geom
