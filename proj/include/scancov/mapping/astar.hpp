#pragma once

/**
 * \file
 * \brief A* over the voxel grid (26-connectivity, Euclidean costs) and the
 * coverage-path refinement pass that reroutes blocked segments through free
 * space. Viewpoint nodes are preserved verbatim; only waypoints are
 * inserted or moved.
 */

#include "scancov/mapping/voxel_world.hpp"
#include "scancov/routing/coverage_path.hpp"

#include <optional>
#include <queue>
#include <unordered_map>

namespace scancov::map {

/// Ordered voxel centers; consecutive cells 26-connected, all traversable.
struct GridPath {
  std::vector<Vec3> centers;
};

namespace detail {

struct OpenEntry {
  double f;
  size_t idx;  // linear voxel index; deterministic tie-break
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    return idx > o.idx;
  }
};

}  // namespace detail

/**
 * A* between two voxels. Unknown voxels are traversable (the planner routes
 * through unobserved space; obstacles bind once mapped). Returns nullopt
 * when no route exists. Ties broken by smaller linear voxel index.
 */
inline std::optional<GridPath> astar(const VoxelWorld& w,
                                     const std::array<int, 3>& start,
                                     const std::array<int, 3>& goal) {
  if (!w.traversable(start[0], start[1], start[2]) ||
      !w.traversable(goal[0], goal[1], goal[2]))
    return std::nullopt;
  const auto lin = [&](const std::array<int, 3>& g) {
    return w.index(g[0], g[1], g[2]);
  };
  const auto h = [&](const std::array<int, 3>& g) {
    return w.resolution() * Vec3(g[0] - goal[0], g[1] - goal[1],
                                 g[2] - goal[2]).norm();
  };
  std::unordered_map<size_t, double> g_cost;
  std::unordered_map<size_t, size_t> parent;
  std::priority_queue<detail::OpenEntry, std::vector<detail::OpenEntry>,
                      std::greater<>> open;
  const size_t s = lin(start), t = lin(goal);
  g_cost[s] = 0.0;
  open.push({h(start), s});
  const int nx = w.nx(), ny = w.ny();
  const auto unpack = [&](size_t idx) {
    const int i = int(idx % nx);
    const int j = int((idx / nx) % ny);
    const int k = int(idx / (size_t(nx) * ny));
    return std::array<int, 3>{i, j, k};
  };
  size_t expansions = 0;
  const size_t cap = w.voxel_count() * 2 + 64;
  while (!open.empty() && expansions++ < cap) {
    const auto [f, cur] = open.top();
    open.pop();
    const auto gc = unpack(cur);
    const double cur_g = g_cost.at(cur);
    if (f > cur_g + h(gc) + 1e-12) continue;  // stale entry
    if (cur == t) {
      GridPath path;
      size_t at = t;
      while (true) {
        const auto u = unpack(at);
        path.centers.push_back(w.center(u[0], u[1], u[2]));
        if (at == s) break;
        at = parent.at(at);
      }
      std::reverse(path.centers.begin(), path.centers.end());
      return path;
    }
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          const int ni = gc[0] + di, nj = gc[1] + dj, nk = gc[2] + dk;
          if (!w.traversable(ni, nj, nk)) continue;
          const size_t nidx = w.index(ni, nj, nk);
          const double step =
              w.resolution() * std::sqrt(double(di * di + dj * dj + dk * dk));
          const double ng = cur_g + step;
          auto it = g_cost.find(nidx);
          if (it == g_cost.end() || ng < it->second - 1e-12) {
            g_cost[nidx] = ng;
            parent[nidx] = cur;
            open.push({ng + h({ni, nj, nk}), nidx});
          }
        }
  }
  return std::nullopt;
}

namespace detail {

/// Nearest traversable voxel to `g`, searching outward a couple of rings.
inline std::optional<std::array<int, 3>> nearest_traversable(
    const VoxelWorld& w, std::array<int, 3> g) {
  for (int a = 0; a < 3; ++a)
    g[a] = std::min(std::max(g[a], 0), (a == 0 ? w.nx() : a == 1 ? w.ny() : w.nz()) - 1);
  if (w.traversable(g[0], g[1], g[2])) return g;
  for (int r = 1; r <= 3; ++r) {
    std::optional<std::array<int, 3>> best;
    double best_d = 1e30;
    for (int dk = -r; dk <= r; ++dk)
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          const int i = g[0] + di, j = g[1] + dj, k = g[2] + dk;
          if (!w.traversable(i, j, k)) continue;
          const double d = Vec3(di, dj, dk).norm();
          if (d < best_d) {
            best_d = d;
            best = std::array<int, 3>{i, j, k};
          }
        }
    if (best) return best;
  }
  return std::nullopt;
}

/// Greedy shortcutting: keep only centers needed to stay traversable.
inline std::vector<Vec3> string_pull(const VoxelWorld& w,
                                     const std::vector<Vec3>& pts) {
  if (pts.size() <= 2) return pts;
  std::vector<Vec3> out;
  out.push_back(pts.front());
  size_t anchor = 0;
  for (size_t i = 2; i < pts.size(); ++i) {
    if (!w.segment_traversable(pts[anchor], pts[i])) {
      out.push_back(pts[i - 1]);
      anchor = i - 1;
    }
  }
  out.push_back(pts.back());
  return out;
}

inline Pose5 interp_pose(const Pose5& a, const Pose5& b, double s) {
  Pose5 p;
  p.p = a.p + (b.p - a.p) * s;
  p.pitch = a.pitch + ang_diff(b.pitch, a.pitch) * s;
  p.yaw = wrap_pi(a.yaw + ang_diff(b.yaw, a.yaw) * s);
  return p;
}

}  // namespace detail

/**
 * Replace every straight path segment that crosses occupied voxels with an
 * A* route (shortcut back to a minimal waypoint chain). Segments with no
 * free route are kept and counted in `infeasible_segments`.
 */
inline route::CoveragePath astar_refine(const VoxelWorld& w,
                                        const route::CoveragePath& path) {
  route::CoveragePath out;
  out.cycle_id = path.cycle_id;
  out.mission_complete = path.mission_complete;
  if (path.nodes.empty()) return out;
  out.nodes.push_back(path.nodes.front());
  for (size_t i = 1; i < path.nodes.size(); ++i) {
    const auto& a = path.nodes[i - 1];
    const auto& b = path.nodes[i];
    if ((a.pose.p - b.pose.p).norm() < 1e-9 ||
        w.segment_traversable(a.pose.p, b.pose.p)) {
      out.nodes.push_back(b);
      continue;
    }
    const auto sa = detail::nearest_traversable(w, w.to_grid(a.pose.p));
    const auto sb = detail::nearest_traversable(w, w.to_grid(b.pose.p));
    std::optional<GridPath> gp;
    if (sa && sb) gp = astar(w, *sa, *sb);
    if (!gp) {
      ++out.infeasible_segments;
      out.nodes.push_back(b);
      continue;
    }
    auto pts = gp->centers;
    pts.insert(pts.begin(), a.pose.p);
    pts.push_back(b.pose.p);
    pts = detail::string_pull(w, pts);
    const double total = [&] {
      double s = 0;
      for (size_t j = 1; j < pts.size(); ++j) s += (pts[j] - pts[j - 1]).norm();
      return std::max(s, 1e-9);
    }();
    double run = 0.0;
    for (size_t j = 1; j + 1 < pts.size(); ++j) {
      run += (pts[j] - pts[j - 1]).norm();
      Pose5 pose = detail::interp_pose(a.pose, b.pose, run / total);
      pose.p = pts[j];
      out.nodes.push_back(route::waypoint_node(pose));
    }
    out.nodes.push_back(b);
  }
  return out;
}

}  // namespace scancov::map
