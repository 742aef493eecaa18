#pragma once

#include "scancov/geometry/kdtree.hpp"
#include "scancov/geometry/pointset.hpp"

namespace scancov::geom {

/// Directed Chamfer distance (m^2): mean over Y of the squared distance to
/// the closest point of X. Not symmetric in its arguments.
inline double chamfer_directed(const PointSet& x, const PointSet& y) {
  if (x.empty() || y.empty())
    throw PreconditionError("chamfer: empty point set");
  const KdTree3 tree(x.points);
  double sum = 0.0;
  for (const auto& q : y.points) sum += tree.nearest(q).second;
  return sum / double(y.size());
}

/// Undirected Chamfer distance (m^2): sum of both directed means. Symmetric;
/// equals chamfer_directed(x,y) + chamfer_directed(y,x).
inline double chamfer_undirected(const PointSet& x, const PointSet& y) {
  if (x.empty() || y.empty())
    throw PreconditionError("chamfer: empty point set");
  const KdTree3 tx(x.points), ty(y.points);
  double sx = 0.0, sy = 0.0;
  for (const auto& q : x.points) sx += ty.nearest(q).second;
  for (const auto& q : y.points) sy += tx.nearest(q).second;
  return sx / double(x.size()) + sy / double(y.size());
}

}  // namespace scancov::geom
