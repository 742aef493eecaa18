#pragma once

/**
 * \file
 * \brief Procedural watertight test meshes: boxes/walls, spheres, tori,
 * L-prisms, walls with gaps. Shared by the simulator scenario corpus and
 * the test fixtures.
 */

#include "scancov/geometry/mesh.hpp"

#include <cstdint>
#include <map>

namespace scancov::geom {

class MeshBuilder {
 public:
  int vertex(const Vec3& p) {
    const std::array<int64_t, 3> key = {llround(p.x() * kQuant),
                                        llround(p.y() * kQuant),
                                        llround(p.z() * kQuant)};
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const int id = int(mesh_.vertices.size());
    mesh_.vertices.push_back(p);
    index_.emplace(key, id);
    return id;
  }

  void triangle(int a, int b, int c) { mesh_.faces.push_back({a, b, c}); }

  /// Grid of quads spanning origin + u*U + v*V, u,v in [0,1]; U x V must
  /// point outward.
  void rect_grid(const Vec3& origin, const Vec3& u_span, const Vec3& v_span,
                 int nu, int nv) {
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) {
        const auto at = [&](int a, int b) {
          return vertex(origin + u_span * (double(a) / nu) +
                        v_span * (double(b) / nv));
        };
        const int q00 = at(i, j), q10 = at(i + 1, j);
        const int q11 = at(i + 1, j + 1), q01 = at(i, j + 1);
        triangle(q00, q10, q11);
        triangle(q00, q11, q01);
      }
  }

  TriangleMesh take() {
    mesh_.finalize();
    mesh_.flip_to_outward();
    return std::move(mesh_);
  }

 private:
  static constexpr double kQuant = 1 << 20;
  TriangleMesh mesh_;
  std::map<std::array<int64_t, 3>, int> index_;
};

namespace detail {
inline int cells(double extent, double cell) {
  return std::max(1, int(std::llround(extent / cell)));
}
}  // namespace detail

/// Axis-aligned box, faces subdivided to roughly `cell`-sized quads.
inline TriangleMesh make_box(const Vec3& center, const Vec3& size,
                             double cell = 0.5) {
  const Vec3 h = size / 2.0;
  const Vec3 lo = center - h;
  const int nx = detail::cells(size.x(), cell);
  const int ny = detail::cells(size.y(), cell);
  const int nz = detail::cells(size.z(), cell);
  const Vec3 ex(size.x(), 0, 0), ey(0, size.y(), 0), ez(0, 0, size.z());
  MeshBuilder b;
  b.rect_grid(lo + ex, ey, ez, ny, nz);            // +x
  b.rect_grid(lo, ez, ey, nz, ny);                 // -x
  b.rect_grid(lo + ey, ez, ex, nz, nx);            // +y
  b.rect_grid(lo, ex, ez, nx, nz);                 // -y
  b.rect_grid(lo + ez, ex, ey, nx, ny);            // +z
  b.rect_grid(lo, ey, ex, ny, nx);                 // -z
  return b.take();
}

inline TriangleMesh make_unit_cube() {
  // 8 vertices, 12 faces; the classic OBJ fixture
  return make_box(Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1), 1.0);
}

/// Thin vertical wall centered at `center`, extents (length, thickness,
/// height).
inline TriangleMesh make_wall(const Vec3& center, double length,
                              double thickness, double height,
                              double cell = 0.5) {
  return make_box(center, Vec3(length, thickness, height), cell);
}

/// Wall with a rectangular through-gap. The gap spans [gap_lo, gap_hi] in
/// the (length, height) plane, measured from the wall's lower-left corner.
inline TriangleMesh make_gap_wall(const Vec3& center, double length,
                                  double thickness, double height,
                                  double gap_x0, double gap_x1, double gap_z0,
                                  double gap_z1, double cell = 0.5) {
  const Vec3 lo = center - Vec3(length / 2, thickness / 2, height / 2);
  MeshBuilder b;
  const auto panel_pair = [&](double x0, double x1, double z0, double z1) {
    if (x1 - x0 < 1e-12 || z1 - z0 < 1e-12) return;
    const int nu = detail::cells(x1 - x0, cell);
    const int nv = detail::cells(z1 - z0, cell);
    const Vec3 ex(x1 - x0, 0, 0), ez(0, 0, z1 - z0);
    // front (-y) and back (+y)
    b.rect_grid(lo + Vec3(x0, 0, z0), ex, ez, nu, nv);
    b.rect_grid(lo + Vec3(x0, thickness, z0) + ex, -ex, ez, nu, nv);
  };
  // four panels around the gap
  panel_pair(0, gap_x0, 0, height);
  panel_pair(gap_x1, length, 0, height);
  panel_pair(gap_x0, gap_x1, 0, gap_z0);
  panel_pair(gap_x0, gap_x1, gap_z1, height);
  const Vec3 ey(0, thickness, 0);
  const int nt = detail::cells(thickness, cell);
  // outer rim
  const int nl = detail::cells(length, cell), nh = detail::cells(height, cell);
  const Vec3 exf(length, 0, 0), ezf(0, 0, height);
  b.rect_grid(lo, Vec3(0, thickness, 0), exf, nt, nl);                    // bottom
  b.rect_grid(lo + ezf, exf, ey, nl, nt);                                 // top
  b.rect_grid(lo, ezf, ey, nh, nt);                                       // -x side
  b.rect_grid(lo + exf, ey, ezf, nt, nh);                                 // +x side
  // gap inner walls
  const int gx = detail::cells(gap_x1 - gap_x0, cell);
  const int gz = detail::cells(gap_z1 - gap_z0, cell);
  const Vec3 gex(gap_x1 - gap_x0, 0, 0), gez(0, 0, gap_z1 - gap_z0);
  b.rect_grid(lo + Vec3(gap_x0, 0, gap_z0), gex, ey, gx, nt);             // gap floor
  b.rect_grid(lo + Vec3(gap_x0, 0, gap_z1), ey, gex, nt, gx);             // gap ceiling
  b.rect_grid(lo + Vec3(gap_x0, 0, gap_z0), ey, gez, nt, gz);             // gap -x wall
  b.rect_grid(lo + Vec3(gap_x1, 0, gap_z0), gez, ey, gz, nt);             // gap +x wall
  return b.take();
}

inline TriangleMesh make_sphere(const Vec3& center, double radius,
                                int n_seg = 24, int n_ring = 16) {
  TriangleMesh m;
  m.vertices.push_back(center + Vec3(0, 0, radius));   // north pole: 0
  for (int r = 1; r < n_ring; ++r) {
    const double phi = kPi * double(r) / n_ring;
    for (int s = 0; s < n_seg; ++s) {
      const double th = 2.0 * kPi * double(s) / n_seg;
      m.vertices.push_back(center + radius * Vec3(std::sin(phi) * std::cos(th),
                                                  std::sin(phi) * std::sin(th),
                                                  std::cos(phi)));
    }
  }
  m.vertices.push_back(center + Vec3(0, 0, -radius));  // south pole
  const int south = int(m.vertices.size()) - 1;
  const auto ring_v = [&](int r, int s) { return 1 + (r - 1) * n_seg + (s % n_seg); };
  for (int s = 0; s < n_seg; ++s)
    m.faces.push_back({0, ring_v(1, s), ring_v(1, s + 1)});
  for (int r = 1; r < n_ring - 1; ++r)
    for (int s = 0; s < n_seg; ++s) {
      const int a = ring_v(r, s), bb = ring_v(r, s + 1);
      const int c = ring_v(r + 1, s), d = ring_v(r + 1, s + 1);
      m.faces.push_back({a, c, d});
      m.faces.push_back({a, d, bb});
    }
  for (int s = 0; s < n_seg; ++s)
    m.faces.push_back({south, ring_v(n_ring - 1, s + 1), ring_v(n_ring - 1, s)});
  m.finalize();
  m.flip_to_outward();
  return m;
}

inline TriangleMesh make_torus(const Vec3& center, double major_r,
                               double minor_r, int n_major = 32,
                               int n_minor = 16) {
  TriangleMesh m;
  for (int i = 0; i < n_major; ++i) {
    const double th = 2.0 * kPi * double(i) / n_major;
    for (int j = 0; j < n_minor; ++j) {
      const double ph = 2.0 * kPi * double(j) / n_minor;
      const double w = major_r + minor_r * std::cos(ph);
      m.vertices.push_back(center + Vec3(w * std::cos(th), w * std::sin(th),
                                         minor_r * std::sin(ph)));
    }
  }
  const auto at = [&](int i, int j) {
    return (i % n_major) * n_minor + (j % n_minor);
  };
  for (int i = 0; i < n_major; ++i)
    for (int j = 0; j < n_minor; ++j) {
      const int a = at(i, j), b = at(i + 1, j);
      const int c = at(i + 1, j + 1), d = at(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  m.finalize();
  m.flip_to_outward();
  return m;
}

/// L-shaped prism: footprint is the union of [0,ax]x[0,by] and
/// [0,cx]x[by,dy] (cx < ax), extruded to `height`, then translated by
/// `origin`. All extents should be multiples of `cell`.
inline TriangleMesh make_lprism(const Vec3& origin, double ax, double by,
                                double cx, double dy, double height,
                                double cell = 0.5) {
  MeshBuilder b;
  const auto nc = [&](double e) { return detail::cells(e, cell); };
  const Vec3 ez(0, 0, height);
  const int nz = nc(height);
  // bottom (z=0, normal -z) and top (z=h, normal +z), two rectangles each
  const auto slab = [&](double x0, double x1, double y0, double y1) {
    const Vec3 ex(x1 - x0, 0, 0), ey(0, y1 - y0, 0);
    b.rect_grid(origin + Vec3(x0, y0, 0), ey, ex, nc(y1 - y0), nc(x1 - x0));
    b.rect_grid(origin + Vec3(x0, y0, height), ex, ey, nc(x1 - x0), nc(y1 - y0));
  };
  slab(0, ax, 0, by);
  slab(0, cx, by, dy);
  // side walls, outward normals; walk the L outline counter-clockwise
  const Vec3 pts[6] = {Vec3(0, 0, 0),   Vec3(ax, 0, 0), Vec3(ax, by, 0),
                       Vec3(cx, by, 0), Vec3(cx, dy, 0), Vec3(0, dy, 0)};
  for (int i = 0; i < 6; ++i) {
    const Vec3 a = origin + pts[i];
    const Vec3 c = origin + pts[(i + 1) % 6];
    b.rect_grid(a, c - a, ez, nc((c - a).norm()), nz);
  }
  return b.take();
}

}  // namespace scancov::geom
