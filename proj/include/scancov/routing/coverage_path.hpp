#pragma once

#include "scancov/core.hpp"

#include <fstream>
#include <ostream>

namespace scancov::route {

/// A node of a coverage path: fixed 5-DoF viewpoints (the planner's coverage
/// commitments) interleaved with movable connecting waypoints.
struct PathNode {
  enum class Kind { Viewpoint, Waypoint };
  Kind kind = Kind::Waypoint;
  Pose5 pose;
  int vp_id = -1;  ///< index into the cycle's viewpoint set, -1 for waypoints

  bool is_viewpoint() const { return kind == Kind::Viewpoint; }
};

inline PathNode viewpoint_node(const Pose5& pose, int vp_id) {
  return PathNode{PathNode::Kind::Viewpoint, pose, vp_id};
}

inline PathNode waypoint_node(const Pose5& pose) {
  return PathNode{PathNode::Kind::Waypoint, pose, -1};
}

struct CoveragePath {
  std::vector<PathNode> nodes;
  uint64_t cycle_id = 0;
  bool mission_complete = false;
  int infeasible_segments = 0;  ///< segments A* could not connect

  bool empty() const { return nodes.empty(); }
  size_t size() const { return nodes.size(); }

  double total_length() const {
    double len = 0.0;
    for (size_t i = 1; i < nodes.size(); ++i)
      len += (nodes[i].pose.p - nodes[i - 1].pose.p).norm();
    return len;
  }

  size_t viewpoint_count() const {
    size_t n = 0;
    for (const auto& nd : nodes) n += nd.is_viewpoint();
    return n;
  }
};

/// JSON-lines export, one node per line.
inline void write_path_jsonl(const CoveragePath& path, std::ostream& os) {
  for (const auto& n : path.nodes) {
    os << "{\"type\":\"" << (n.is_viewpoint() ? "viewpoint" : "waypoint")
       << "\",\"x\":" << fmt_num(n.pose.p.x())
       << ",\"y\":" << fmt_num(n.pose.p.y())
       << ",\"z\":" << fmt_num(n.pose.p.z())
       << ",\"pitch\":" << fmt_num(n.pose.pitch)
       << ",\"yaw\":" << fmt_num(n.pose.yaw) << "}\n";
  }
}

inline void write_path_jsonl(const CoveragePath& path, const std::string& file) {
  std::ofstream f(file);
  if (!f) throw ParseError("cannot open for writing: " + file);
  write_path_jsonl(path, f);
}

}  // namespace scancov::route
