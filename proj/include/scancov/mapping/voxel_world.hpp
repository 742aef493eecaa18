#pragma once

/**
 * \file
 * \brief Labeled occupancy grid with a Euclidean signed distance field.
 *
 * The ESDF is recomputed from scratch per planning cycle with an exact
 * separable distance transform; queries interpolate trilinearly between
 * voxel centers and expose the analytic gradient of the interpolant.
 * Sign convention: positive in free/unknown space, negative inside
 * occupied voxels.
 */

#include "scancov/core.hpp"
#include "scancov/geometry/pointset.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace scancov::map {

enum class VoxelLabel : uint8_t {
  Unknown = 0,
  Free = 1,
  OccupiedTarget = 2,
  OccupiedNonTarget = 3,
};

inline bool is_occupied(VoxelLabel l) {
  return l == VoxelLabel::OccupiedTarget || l == VoxelLabel::OccupiedNonTarget;
}

struct IntegrateReport {
  int clamped_hits = 0;  ///< hits outside the grid, clamped to the boundary
  int freed_voxels = 0;
  int occupied_voxels = 0;
};

struct EsdfSample {
  double distance = 0.0;
  Vec3 gradient{0, 0, 0};
  bool clamped = false;  ///< query point was outside the grid
};

class VoxelWorld {
 public:
  VoxelWorld() = default;

  VoxelWorld(const Vec3& origin, double resolution, int nx, int ny, int nz)
      : origin_(origin), res_(resolution), nx_(nx), ny_(ny), nz_(nz) {
    if (nx <= 0 || ny <= 0 || nz <= 0 || resolution <= 0.0)
      throw PreconditionError("VoxelWorld: bad dimensions");
    labels_.assign(size_t(nx) * ny * nz, VoxelLabel::Unknown);
    esdf_.assign(labels_.size(), 0.0f);
    esdf_stale_ = true;
  }

  /// Grid covering an axis-aligned box with the given margin.
  static VoxelWorld covering(const Vec3& lo, const Vec3& hi, double margin,
                             double resolution = 0.1) {
    const Vec3 o = lo - Vec3::Constant(margin);
    const Vec3 extent = hi - lo + Vec3::Constant(2.0 * margin);
    return VoxelWorld(o, resolution,
                      std::max(1, int(std::ceil(extent.x() / resolution))),
                      std::max(1, int(std::ceil(extent.y() / resolution))),
                      std::max(1, int(std::ceil(extent.z() / resolution))));
  }

  const Vec3& origin() const { return origin_; }
  double resolution() const { return res_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  size_t voxel_count() const { return labels_.size(); }
  bool esdf_stale() const { return esdf_stale_; }

  size_t index(int i, int j, int k) const {
    return (size_t(k) * ny_ + j) * nx_ + i;
  }

  bool in_grid(int i, int j, int k) const {
    return i >= 0 && i < nx_ && j >= 0 && j < ny_ && k >= 0 && k < nz_;
  }

  std::array<int, 3> to_grid(const Vec3& p) const {
    return {int(std::floor((p.x() - origin_.x()) / res_)),
            int(std::floor((p.y() - origin_.y()) / res_)),
            int(std::floor((p.z() - origin_.z()) / res_))};
  }

  bool contains(const Vec3& p) const {
    const auto g = to_grid(p);
    return in_grid(g[0], g[1], g[2]);
  }

  Vec3 center(int i, int j, int k) const {
    return origin_ + res_ * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }

  VoxelLabel label(int i, int j, int k) const { return labels_[index(i, j, k)]; }
  VoxelLabel label_at(const Vec3& p) const {
    const auto g = to_grid(p);
    if (!in_grid(g[0], g[1], g[2])) return VoxelLabel::Unknown;
    return labels_[index(g[0], g[1], g[2])];
  }

  void set_label(int i, int j, int k, VoxelLabel l) {
    labels_[index(i, j, k)] = l;
    esdf_stale_ = true;
  }

  bool occupied(int i, int j, int k) const {
    return is_occupied(labels_[index(i, j, k)]);
  }

  /// Voxels traversable by the planner: free or unknown (the planner treats
  /// unobserved space as plannable; obstacles constrain only once observed).
  bool traversable(int i, int j, int k) const {
    return in_grid(i, j, k) && !occupied(i, j, k);
  }

  float esdf_at(int i, int j, int k) const { return esdf_[index(i, j, k)]; }

  double grid_diagonal() const {
    return res_ * Vec3(nx_, ny_, nz_).norm();
  }

  /**
   * Ray-trace free-space carving from the sensor to every hit; the endpoint
   * voxel is labeled occupied per its target flag. Occupancy wins ties
   * within the batch, and carving never downgrades an occupied voxel (hits
   * are authoritative; grazing rays are not).
   */
  IntegrateReport integrate_scan(const Vec3& sensor, const geom::PointSet& hits,
                                 const std::vector<bool>& target_flags) {
    if (hits.size() != target_flags.size())
      throw PreconditionError("integrate_scan: flag count mismatch");
    IntegrateReport rep;
    // occupancy first so that same-batch carving cannot erase it
    std::vector<std::pair<Vec3, bool>> carve_to;
    carve_to.reserve(hits.size());
    for (size_t h = 0; h < hits.size(); ++h) {
      const Vec3& p = hits[h];
      const auto g = to_grid(p);
      if (!in_grid(g[0], g[1], g[2])) {
        ++rep.clamped_hits;
        carve_to.emplace_back(clamp_to_grid(sensor, p), false);
        continue;
      }
      auto& l = labels_[index(g[0], g[1], g[2])];
      if (!is_occupied(l)) ++rep.occupied_voxels;
      l = target_flags[h] ? VoxelLabel::OccupiedTarget
                          : VoxelLabel::OccupiedNonTarget;
      carve_to.emplace_back(p, true);
    }
    for (const auto& [p, had_hit] : carve_to)
      rep.freed_voxels += carve_free(sensor, p, had_hit);
    if (!hits.empty()) esdf_stale_ = true;
    return rep;
  }

  /// Exact Euclidean distance transform over voxel centers, both signs.
  void recompute_esdf() {
    const double diag = grid_diagonal();
    std::vector<double> d2_occ(labels_.size()), d2_non(labels_.size());
    const double inf = 1e30;
    for (size_t i = 0; i < labels_.size(); ++i) {
      const bool occ = is_occupied(labels_[i]);
      d2_occ[i] = occ ? 0.0 : inf;
      d2_non[i] = occ ? inf : 0.0;
    }
    edt3(d2_occ);
    edt3(d2_non);
    for (size_t i = 0; i < labels_.size(); ++i) {
      const double d_occ = std::min(std::sqrt(d2_occ[i]) * res_, diag);
      const double d_non = std::min(std::sqrt(d2_non[i]) * res_, diag);
      esdf_[i] = float(is_occupied(labels_[i]) ? -d_non : d_occ);
    }
    esdf_stale_ = false;
  }

  /// Trilinear ESDF interpolation with the analytic gradient of the
  /// interpolant. Out-of-grid points are clamped (and reported).
  EsdfSample query_esdf(const Vec3& p) const {
    if (esdf_stale_)
      throw PreconditionError("esdf_query: esdf is stale, recompute first");
    EsdfSample out;
    Vec3 u = (p - origin_) / res_ - Vec3::Constant(0.5);
    const Vec3 u_raw = u;
    int i0[3], n[3] = {nx_, ny_, nz_};
    double f[3];
    for (int a = 0; a < 3; ++a) {
      const double hi = double(n[a] - 1);
      double ua = u[a];
      if (ua < 0.0 || ua > hi) out.clamped = true;
      ua = std::min(std::max(ua, 0.0), hi);
      int ia = std::min(int(std::floor(ua)), n[a] - 2);
      if (n[a] == 1) ia = 0;
      i0[a] = std::max(ia, 0);
      f[a] = n[a] == 1 ? 0.0 : ua - i0[a];
      (void)u_raw;
    }
    const auto v = [&](int dx, int dy, int dz) {
      return double(esdf_[index(std::min(i0[0] + dx, nx_ - 1),
                                std::min(i0[1] + dy, ny_ - 1),
                                std::min(i0[2] + dz, nz_ - 1))]);
    };
    const double fx = f[0], fy = f[1], fz = f[2];
    const double c00 = v(0, 0, 0) * (1 - fx) + v(1, 0, 0) * fx;
    const double c10 = v(0, 1, 0) * (1 - fx) + v(1, 1, 0) * fx;
    const double c01 = v(0, 0, 1) * (1 - fx) + v(1, 0, 1) * fx;
    const double c11 = v(0, 1, 1) * (1 - fx) + v(1, 1, 1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    out.distance = c0 * (1 - fz) + c1 * fz;
    const double dx = ((v(1, 0, 0) - v(0, 0, 0)) * (1 - fy) * (1 - fz) +
                       (v(1, 1, 0) - v(0, 1, 0)) * fy * (1 - fz) +
                       (v(1, 0, 1) - v(0, 0, 1)) * (1 - fy) * fz +
                       (v(1, 1, 1) - v(0, 1, 1)) * fy * fz);
    const double dy = ((c10 - c00) * (1 - fz) + (c11 - c01) * fz);
    const double dz = c1 - c0;
    out.gradient = Vec3(dx, dy, dz) / res_;
    return out;
  }

  /// DDA visit of all voxels strictly between two points (inclusive of the
  /// start voxel, exclusive of the end voxel). Callback returns false to
  /// stop early.
  template <typename F>
  void walk_segment(const Vec3& a, const Vec3& b, F&& visit) const {
    const auto ga = to_grid(a);
    const auto gb = to_grid(b);
    int cur[3] = {ga[0], ga[1], ga[2]};
    const int goal[3] = {gb[0], gb[1], gb[2]};
    const Vec3 d = b - a;
    const double len = d.norm();
    if (len < 1e-12) return;
    int step[3];
    double t_max[3], t_delta[3];
    for (int ax = 0; ax < 3; ++ax) {
      step[ax] = d[ax] > 0 ? 1 : (d[ax] < 0 ? -1 : 0);
      if (step[ax] == 0) {
        t_max[ax] = std::numeric_limits<double>::max();
        t_delta[ax] = std::numeric_limits<double>::max();
      } else {
        const double next_boundary =
            origin_[ax] + res_ * (cur[ax] + (step[ax] > 0 ? 1 : 0));
        t_max[ax] = (next_boundary - a[ax]) / d[ax];
        t_delta[ax] = res_ / std::abs(d[ax]);
      }
    }
    int guard = nx_ + ny_ + nz_ + 3;
    while (guard-- > 0) {
      if (cur[0] == goal[0] && cur[1] == goal[1] && cur[2] == goal[2]) return;
      if (in_grid(cur[0], cur[1], cur[2]))
        if (!visit(cur[0], cur[1], cur[2])) return;
      int ax = 0;
      if (t_max[1] < t_max[ax]) ax = 1;
      if (t_max[2] < t_max[ax]) ax = 2;
      if (t_max[ax] > 1.0) return;  // ran past the segment end
      cur[ax] += step[ax];
      t_max[ax] += t_delta[ax];
    }
  }

  /// True when the straight segment crosses only traversable voxels.
  bool segment_traversable(const Vec3& a, const Vec3& b) const {
    bool ok = true;
    walk_segment(a, b, [&](int i, int j, int k) {
      if (occupied(i, j, k)) {
        ok = false;
        return false;
      }
      return true;
    });
    if (ok) {
      const auto g = to_grid(b);
      if (in_grid(g[0], g[1], g[2]) && occupied(g[0], g[1], g[2])) ok = false;
    }
    return ok;
  }

  /// Textual dump: header `res dx dy dz ox oy oz`, then a run-length
  /// encoded label stream (`count:label` pairs).
  void dump(std::ostream& os) const {
    os << fmt_num(res_) << ' ' << nx_ << ' ' << ny_ << ' ' << nz_ << ' '
       << fmt_num(origin_.x()) << ' ' << fmt_num(origin_.y()) << ' '
       << fmt_num(origin_.z()) << '\n';
    size_t i = 0;
    while (i < labels_.size()) {
      size_t j = i;
      while (j < labels_.size() && labels_[j] == labels_[i]) ++j;
      os << (j - i) << ':' << int(labels_[i]) << ' ';
      i = j;
    }
    os << '\n';
  }

  static VoxelWorld restore(std::istream& is) {
    double res, ox, oy, oz;
    int nx, ny, nz;
    if (!(is >> res >> nx >> ny >> nz >> ox >> oy >> oz))
      throw ParseError("voxel dump: bad header");
    VoxelWorld w(Vec3(ox, oy, oz), res, nx, ny, nz);
    size_t at = 0;
    std::string tok;
    while (at < w.labels_.size() && is >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("voxel dump: bad run token");
      const size_t cnt = std::stoull(tok.substr(0, colon));
      const int lab = std::stoi(tok.substr(colon + 1));
      if (at + cnt > w.labels_.size() || lab < 0 || lab > 3)
        throw ParseError("voxel dump: run overflow");
      for (size_t i = 0; i < cnt; ++i) w.labels_[at++] = VoxelLabel(lab);
    }
    if (at != w.labels_.size()) throw ParseError("voxel dump: short stream");
    w.esdf_stale_ = true;
    return w;
  }

 private:
  Vec3 clamp_to_grid(const Vec3& from, const Vec3& to) const {
    // shrink the segment until the endpoint falls inside
    Vec3 p = to;
    for (int it = 0; it < 60 && !contains(p); ++it) p = from + (p - from) * 0.9;
    return p;
  }

  int carve_free(const Vec3& sensor, const Vec3& hit, bool stop_before_hit) {
    int freed = 0;
    const auto gh = to_grid(hit);
    walk_segment(sensor, hit, [&](int i, int j, int k) {
      if (stop_before_hit && i == gh[0] && j == gh[1] && k == gh[2])
        return false;
      auto& l = labels_[index(i, j, k)];
      if (l == VoxelLabel::Unknown) {
        l = VoxelLabel::Free;
        ++freed;
      }
      return true;
    });
    return freed;
  }

  // Felzenszwalb-Huttenlocher lower-envelope transform, one axis at a time.
  static void edt1d(std::vector<double>& f, std::vector<double>& d,
                    std::vector<int>& v, std::vector<double>& z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -1e30;
    z[1] = 1e30;
    for (int q = 1; q < n; ++q) {
      double s;
      while (true) {
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        if (s <= z[k]) {
          --k;
        } else {
          break;
        }
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = 1e30;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      while (z[k + 1] < q) ++k;
      const double dq = q - v[k];
      d[q] = dq * dq + f[v[k]];
    }
  }

  void edt3(std::vector<double>& grid) const {
    const int n_max = std::max({nx_, ny_, nz_});
    std::vector<double> f(n_max), d(n_max), z(n_max + 1);
    std::vector<int> v(n_max);
    // x
    for (int k = 0; k < nz_; ++k)
      for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) f[i] = grid[index(i, j, k)];
        edt1d(f, d, v, z, nx_);
        for (int i = 0; i < nx_; ++i) grid[index(i, j, k)] = d[i];
      }
    // y
    for (int k = 0; k < nz_; ++k)
      for (int i = 0; i < nx_; ++i) {
        for (int j = 0; j < ny_; ++j) f[j] = grid[index(i, j, k)];
        edt1d(f, d, v, z, ny_);
        for (int j = 0; j < ny_; ++j) grid[index(i, j, k)] = d[j];
      }
    // z
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        for (int k = 0; k < nz_; ++k) f[k] = grid[index(i, j, k)];
        edt1d(f, d, v, z, nz_);
        for (int k = 0; k < nz_; ++k) grid[index(i, j, k)] = d[k];
      }
  }

  Vec3 origin_{0, 0, 0};
  double res_ = 0.1;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<VoxelLabel> labels_;
  std::vector<float> esdf_;
  bool esdf_stale_ = true;
};

}  // namespace scancov::map
