#pragma once

#include "scancov/core.hpp"

#include <fstream>
#include <sstream>

namespace scancov::geom {

/// Unordered collection of 3D points (meters). May be empty only where an
/// operation explicitly permits.
struct PointSet {
  std::vector<Vec3> points;

  PointSet() = default;
  explicit PointSet(std::vector<Vec3> pts) : points(std::move(pts)) {}

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Vec3& operator[](size_t i) const { return points[i]; }

  Vec3 centroid() const {
    Vec3 c(0, 0, 0);
    for (const auto& p : points) c += p;
    return points.empty() ? c : Vec3(c / double(points.size()));
  }
};

/// CSV layout: `x,y,z` per line, '.' decimal separator, newline-terminated.
inline void write_pointset_csv(const PointSet& ps, std::ostream& os) {
  for (const auto& p : ps.points)
    os << fmt_num(p.x()) << ',' << fmt_num(p.y()) << ',' << fmt_num(p.z())
       << '\n';
}

inline void write_pointset_csv(const PointSet& ps, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open for writing: " + path);
  write_pointset_csv(ps, f);
}

inline PointSet read_pointset_csv(std::istream& is) {
  PointSet ps;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    Vec3 p;
    char comma;
    if (!(ss >> p.x() >> comma >> p.y() >> comma >> p.z()))
      throw ParseError("pointset csv: malformed line " + std::to_string(lineno));
    if (!p.allFinite())
      throw ParseError("pointset csv: non-finite value at line " +
                       std::to_string(lineno));
    ps.points.push_back(p);
  }
  return ps;
}

inline PointSet read_pointset_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open: " + path);
  return read_pointset_csv(f);
}

}  // namespace scancov::geom
