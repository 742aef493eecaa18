#pragma once

/**
 * \file
 * \brief Indexed triangle mesh with cached per-vertex normals, average edge
 * length, and a watertightness flag. ASCII OBJ reader/writer (v/f records,
 * triangles only).
 */

#include "scancov/core.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

namespace scancov::geom {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> vertex_normals;  ///< unit, area-weighted face average
  double edge_length_avg = 0.0;      ///< mean over unique undirected edges
  bool watertight = false;           ///< every edge shared by exactly 2 faces

  size_t vertex_count() const { return vertices.size(); }
  size_t face_count() const { return faces.size(); }

  Vec3 face_normal(int f) const {
    const auto& t = faces[f];
    return (vertices[t[1]] - vertices[t[0]])
        .cross(vertices[t[2]] - vertices[t[0]]);
  }

  Vec3 face_centroid(int f) const {
    const auto& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }

  Vec3 centroid() const {
    Vec3 c(0, 0, 0);
    for (const auto& v : vertices) c += v;
    return vertices.empty() ? c : Vec3(c / double(vertices.size()));
  }

  std::pair<Vec3, Vec3> bounds() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const auto& v : vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    return {lo, hi};
  }

  /// Twice the signed volume via the divergence theorem; positive for
  /// consistently outward-wound closed meshes.
  double signed_volume() const {
    double v6 = 0.0;
    for (const auto& t : faces)
      v6 += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]]));
    return v6 / 6.0;
  }

  /// Recompute normals, edge stats and the watertight flag. Must be called
  /// after any direct mutation of vertices/faces.
  void finalize() {
    vertex_normals.assign(vertices.size(), Vec3::Zero());
    for (size_t f = 0; f < faces.size(); ++f) {
      const Vec3 n = face_normal(int(f));  // length = 2*area
      for (int k = 0; k < 3; ++k) vertex_normals[faces[f][k]] += n;
    }
    for (auto& n : vertex_normals) {
      const double len = n.norm();
      n = len > 1e-14 ? Vec3(n / len) : Vec3(0, 0, 1);
    }

    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : faces)
      for (int k = 0; k < 3; ++k) {
        int a = t[k], b = t[(k + 1) % 3];
        edge_use[{std::min(a, b), std::max(a, b)}]++;
      }
    double sum = 0.0;
    watertight = !edge_use.empty();
    for (const auto& [e, cnt] : edge_use) {
      sum += (vertices[e.first] - vertices[e.second]).norm();
      if (cnt != 2) watertight = false;
    }
    edge_length_avg = edge_use.empty() ? 0.0 : sum / double(edge_use.size());
  }

  /// Repair winding so normals point outward. Assumes consistent winding;
  /// uses the mesh signed volume, which is orientation-exact for closed
  /// meshes (a parity ray from the centroid misclassifies annular shapes
  /// whose centroid falls outside the solid, e.g. a torus).
  void flip_to_outward() {
    if (signed_volume() < 0.0) {
      for (auto& t : faces) std::swap(t[1], t[2]);
      finalize();
    }
  }
};

namespace detail {
inline int parse_obj_index(const std::string& tok, size_t nverts, int lineno) {
  // accept `7`, `7/..`, `7//..`
  size_t slash = tok.find('/');
  const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
  int idx = 0;
  try {
    idx = std::stoi(head);
  } catch (...) {
    throw ParseError("obj: bad face index '" + tok + "' at line " +
                     std::to_string(lineno));
  }
  if (idx < 1 || size_t(idx) > nverts)
    throw ParseError("obj: face index out of range at line " +
                     std::to_string(lineno));
  return idx - 1;
}
}  // namespace detail

/// ASCII OBJ with only `v` and `f` records (plus `#` comments). Faces must
/// be triangles; quads are rejected rather than triangulated.
inline TriangleMesh load_mesh(std::istream& is, const std::string& name = "<stream>") {
  TriangleMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string rec;
    ss >> rec;
    if (rec.empty()) continue;
    if (rec == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z()))
        throw ParseError("obj: malformed vertex at line " + std::to_string(lineno));
      mesh.vertices.push_back(p);
    } else if (rec == "f") {
      std::vector<std::string> toks;
      std::string t;
      while (ss >> t) toks.push_back(t);
      if (toks.size() != 3)
        throw ParseError("obj: non-triangle face (" + std::to_string(toks.size()) +
                         " indices) at line " + std::to_string(lineno));
      std::array<int, 3> f{};
      for (int k = 0; k < 3; ++k)
        f[k] = detail::parse_obj_index(toks[k], mesh.vertices.size(), lineno);
      mesh.faces.push_back(f);
    } else {
      throw ParseError("obj: unsupported record '" + rec + "' at line " +
                       std::to_string(lineno) + " in " + name);
    }
  }
  if (mesh.vertices.empty())
    throw ParseError("obj: no vertex records in " + name);
  mesh.finalize();
  return mesh;
}

inline TriangleMesh load_mesh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open: " + path);
  return load_mesh(f, path);
}

inline void save_mesh(const TriangleMesh& mesh, std::ostream& os) {
  for (const auto& v : mesh.vertices)
    os << "v " << fmt_num(v.x()) << ' ' << fmt_num(v.y()) << ' '
       << fmt_num(v.z()) << '\n';
  for (const auto& f : mesh.faces)
    os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void save_mesh_file(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open for writing: " + path);
  save_mesh(mesh, f);
}

}  // namespace scancov::geom
