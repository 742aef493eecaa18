#include <catch2/catch_amalgamated.hpp>

#include "scancov/mapping/astar.hpp"
#include "scancov/mapping/voxel_world.hpp"

#include <sstream>

using namespace scancov;
using namespace scancov::map;

namespace {

/// Brute-force signed distance over voxel centers.
double brute_esdf(const VoxelWorld& w, int i, int j, int k) {
  const bool occ = w.occupied(i, j, k);
  double best = 1e30;
  for (int kk = 0; kk < w.nz(); ++kk)
    for (int jj = 0; jj < w.ny(); ++jj)
      for (int ii = 0; ii < w.nx(); ++ii) {
        const bool o = w.occupied(ii, jj, kk);
        if (o == occ) continue;
        best = std::min(best, w.resolution() *
                                  Vec3(ii - i, jj - j, kk - k).norm());
      }
  best = std::min(best, w.grid_diagonal());
  return occ ? -best : best;
}

}  // namespace

TEST_CASE("integrate_scan carves free space and labels hits", "[mapping]") {
  VoxelWorld w(Vec3(0, 0, 0), 0.1, 30, 10, 10);
  const Vec3 sensor(0.05, 0.45, 0.45);
  geom::PointSet hits{{Vec3(1.05, 0.45, 0.45)}};
  const auto rep = w.integrate_scan(sensor, hits, {true});
  REQUIRE(rep.clamped_hits == 0);
  // one hit 1 m ahead at 0.1 m resolution: the ten voxels before the
  // endpoint voxel are freed (DDA count oracle)
  REQUIRE(rep.freed_voxels == 10);
  REQUIRE(w.label_at(Vec3(1.05, 0.45, 0.45)) == VoxelLabel::OccupiedTarget);
  REQUIRE(w.label_at(sensor) == VoxelLabel::Free);
  REQUIRE(w.label_at(Vec3(0.55, 0.45, 0.45)) == VoxelLabel::Free);

  SECTION("zero hits leave the world unchanged") {
    VoxelWorld w2(Vec3(0, 0, 0), 0.1, 8, 8, 8);
    const auto r2 = w2.integrate_scan(sensor, geom::PointSet{}, {});
    REQUIRE(r2.freed_voxels == 0);
    for (int k = 0; k < 8; ++k)
      for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i)
          REQUIRE(w2.label(i, j, k) == VoxelLabel::Unknown);
  }
  SECTION("non-target flag") {
    VoxelWorld w2(Vec3(0, 0, 0), 0.1, 30, 10, 10);
    w2.integrate_scan(sensor, hits, {false});
    REQUIRE(w2.label_at(hits[0]) == VoxelLabel::OccupiedNonTarget);
  }
  SECTION("hit outside grid is clamped and reported") {
    VoxelWorld w2(Vec3(0, 0, 0), 0.1, 10, 10, 10);
    geom::PointSet far{{Vec3(5.0, 0.45, 0.45)}};
    const auto r2 = w2.integrate_scan(sensor, far, {true});
    REQUIRE(r2.clamped_hits == 1);
    REQUIRE(r2.freed_voxels > 0);
  }
  SECTION("occupancy wins over carving within a batch") {
    VoxelWorld w2(Vec3(0, 0, 0), 0.1, 30, 10, 10);
    // first ray occupies a voxel that the second ray passes through
    geom::PointSet two{{Vec3(0.55, 0.45, 0.45), Vec3(1.55, 0.45, 0.45)}};
    w2.integrate_scan(sensor, two, {true, true});
    REQUIRE(w2.label_at(Vec3(0.55, 0.45, 0.45)) == VoxelLabel::OccupiedTarget);
  }
}

TEST_CASE("esdf equals brute force on small grids", "[mapping]") {
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    VoxelWorld w(Vec3(0, 0, 0), 0.1, 12, 9, 7);
    for (int n = 0; n < 25; ++n)
      w.set_label(int(rng.uniform_index(12)), int(rng.uniform_index(9)),
                  int(rng.uniform_index(7)),
                  rng.uniform() < 0.5 ? VoxelLabel::OccupiedTarget
                                      : VoxelLabel::OccupiedNonTarget);
    w.recompute_esdf();
    for (int k = 0; k < w.nz(); ++k)
      for (int j = 0; j < w.ny(); ++j)
        for (int i = 0; i < w.nx(); ++i)
          REQUIRE(double(w.esdf_at(i, j, k)) ==
                  Catch::Approx(brute_esdf(w, i, j, k)).margin(1e-9));
  }
}

TEST_CASE("esdf frozen examples", "[mapping]") {
  VoxelWorld w(Vec3(0, 0, 0), 0.1, 8, 8, 8);
  w.set_label(0, 0, 0, VoxelLabel::OccupiedTarget);
  w.recompute_esdf();
  REQUIRE(double(w.esdf_at(3, 0, 0)) == Catch::Approx(0.3).margin(1e-9));
  REQUIRE(double(w.esdf_at(0, 0, 0)) <= 0.0);

  VoxelWorld all_free(Vec3(0, 0, 0), 0.1, 6, 6, 6);
  all_free.recompute_esdf();
  // no occupied voxel anywhere: sentinel capped at the grid diagonal
  REQUIRE(double(all_free.esdf_at(2, 3, 1)) ==
          Catch::Approx(all_free.grid_diagonal()).margin(1e-9));
}

TEST_CASE("esdf query interpolates and differentiates", "[mapping]") {
  VoxelWorld w(Vec3(0, 0, 0), 0.1, 16, 16, 16);
  Rng rng(13);
  for (int n = 0; n < 30; ++n)
    w.set_label(int(rng.uniform_index(16)), int(rng.uniform_index(16)),
                int(rng.uniform_index(16)), VoxelLabel::OccupiedNonTarget);
  w.recompute_esdf();

  SECTION("stale esdf rejected") {
    VoxelWorld stale(Vec3(0, 0, 0), 0.1, 4, 4, 4);
    stale.set_label(0, 0, 0, VoxelLabel::OccupiedTarget);
    REQUIRE_THROWS_AS(stale.query_esdf(Vec3(0.2, 0.2, 0.2)),
                      PreconditionError);
  }

  SECTION("voxel centers return stored values") {
    for (int n = 0; n < 50; ++n) {
      const int i = int(rng.uniform_index(16)), j = int(rng.uniform_index(16)),
                k = int(rng.uniform_index(16));
      const auto s = w.query_esdf(w.center(i, j, k));
      REQUIRE(s.distance ==
              Catch::Approx(double(w.esdf_at(i, j, k))).margin(1e-9));
    }
  }

  SECTION("midpoint between two centers averages linearly") {
    VoxelWorld w2(Vec3(0, 0, 0), 0.1, 8, 4, 4);
    w2.set_label(0, 1, 1, VoxelLabel::OccupiedTarget);
    w2.recompute_esdf();
    const Vec3 a = w2.center(2, 1, 1), b = w2.center(3, 1, 1);
    const double va = w2.query_esdf(a).distance;
    const double vb = w2.query_esdf(b).distance;
    const double mid = w2.query_esdf((a + b) / 2.0).distance;
    REQUIRE(mid == Catch::Approx((va + vb) / 2.0).margin(1e-9));
    REQUIRE(va == Catch::Approx(0.2).margin(1e-9));
    REQUIRE(vb == Catch::Approx(0.3).margin(1e-9));
  }

  SECTION("gradient matches central finite differences") {
    const double h = w.resolution() / 10.0;
    int checked = 0;
    for (int n = 0; n < 400 && checked < 60; ++n) {
      const Vec3 p(rng.uniform(0.3, 1.3), rng.uniform(0.3, 1.3),
                   rng.uniform(0.3, 1.3));
      // keep away from cell boundaries where the interpolant kinks
      bool interior = true;
      for (int a = 0; a < 3; ++a) {
        const double u = p[a] / 0.1 - 0.5;
        const double fr = u - std::floor(u);
        if (fr < 0.15 || fr > 0.85) interior = false;
      }
      if (!interior) continue;
      ++checked;
      const auto s = w.query_esdf(p);
      for (int a = 0; a < 3; ++a) {
        Vec3 dp = Vec3::Zero();
        dp[a] = h;
        const double fd = (w.query_esdf(p + dp).distance -
                           w.query_esdf(p - dp).distance) /
                          (2.0 * h);
        if (std::abs(fd) > 1e-9)
          REQUIRE(s.gradient[a] == Catch::Approx(fd).epsilon(1e-6));
        else
          REQUIRE(std::abs(s.gradient[a]) < 1e-9);
      }
    }
    REQUIRE(checked >= 50);
  }
}

TEST_CASE("astar refine", "[mapping]") {
  // 10^3 grid with a one-voxel wall at i=5, gap off to the side at (5,8,8)
  VoxelWorld w(Vec3(0, 0, 0), 0.1, 10, 10, 10);
  for (int k = 0; k < 10; ++k)
    for (int j = 0; j < 10; ++j)
      if (!(j == 8 && k == 8))
        w.set_label(5, j, k, VoxelLabel::OccupiedNonTarget);

  route::CoveragePath path;
  path.nodes.push_back(route::viewpoint_node({Vec3(0.25, 0.55, 0.55), 0, 0}, 0));
  path.nodes.push_back(route::viewpoint_node({Vec3(0.85, 0.55, 0.55), 0, 0}, 1));

  SECTION("blocked segment detours through the gap") {
    const auto refined = astar_refine(w, path);
    REQUIRE(refined.infeasible_segments == 0);
    REQUIRE(refined.nodes.size() > 2);
    // viewpoints preserved verbatim at their original poses
    REQUIRE(refined.nodes.front().is_viewpoint());
    REQUIRE(refined.nodes.back().is_viewpoint());
    REQUIRE((refined.nodes.front().pose.p - path.nodes[0].pose.p).norm() == 0.0);
    REQUIRE((refined.nodes.back().pose.p - path.nodes[1].pose.p).norm() == 0.0);
    // every consecutive pair must now be traversable
    for (size_t i = 1; i < refined.nodes.size(); ++i)
      REQUIRE(w.segment_traversable(refined.nodes[i - 1].pose.p,
                                    refined.nodes[i].pose.p));
    // inserted nodes are waypoints in free space
    for (size_t i = 1; i + 1 < refined.nodes.size(); ++i) {
      REQUIRE_FALSE(refined.nodes[i].is_viewpoint());
      const auto g = w.to_grid(refined.nodes[i].pose.p);
      REQUIRE(w.traversable(g[0], g[1], g[2]));
    }
  }

  SECTION("straight free segment unchanged") {
    route::CoveragePath free_path;
    free_path.nodes.push_back(
        route::waypoint_node({Vec3(0.15, 0.15, 0.15), 0, 0}));
    free_path.nodes.push_back(
        route::waypoint_node({Vec3(0.15, 0.95, 0.15), 0, 0}));
    const auto refined = astar_refine(w, free_path);
    REQUIRE(refined.nodes.size() == 2);
  }

  SECTION("start equals goal") {
    route::CoveragePath single;
    single.nodes.push_back(route::waypoint_node({Vec3(0.15, 0.15, 0.15), 0, 0}));
    const auto refined = astar_refine(w, single);
    REQUIRE(refined.nodes.size() == 1);
  }

  SECTION("fully blocked segment is reported") {
    VoxelWorld sealed(Vec3(0, 0, 0), 0.1, 10, 4, 4);
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        sealed.set_label(5, j, k, VoxelLabel::OccupiedNonTarget);
    route::CoveragePath blocked;
    blocked.nodes.push_back(
        route::waypoint_node({Vec3(0.15, 0.15, 0.15), 0, 0}));
    blocked.nodes.push_back(
        route::waypoint_node({Vec3(0.95, 0.15, 0.15), 0, 0}));
    const auto refined = astar_refine(sealed, blocked);
    REQUIRE(refined.infeasible_segments == 1);
    REQUIRE(refined.nodes.size() == 2);
  }
}

TEST_CASE("astar determinism and cost on an open grid", "[mapping]") {
  VoxelWorld w(Vec3(0, 0, 0), 0.1, 12, 12, 4);
  const auto p1 = astar(w, {0, 0, 0}, {11, 11, 3});
  const auto p2 = astar(w, {0, 0, 0}, {11, 11, 3});
  REQUIRE(p1.has_value());
  REQUIRE(p1->centers.size() == p2->centers.size());
  for (size_t i = 0; i < p1->centers.size(); ++i)
    REQUIRE((p1->centers[i] - p2->centers[i]).norm() == 0.0);
  // shortest 26-connected route: 3 space diagonals then 8 planar diagonals
  double cost = 0;
  for (size_t i = 1; i < p1->centers.size(); ++i)
    cost += (p1->centers[i] - p1->centers[i - 1]).norm();
  const double expect = 0.1 * (3 * std::sqrt(3.0) + 8 * std::sqrt(2.0));
  REQUIRE(cost == Catch::Approx(expect).margin(1e-9));
}

TEST_CASE("voxel world dump/restore round trip", "[mapping]") {
  VoxelWorld w(Vec3(-1, 0, 2), 0.25, 6, 5, 4);
  Rng rng(3);
  for (int n = 0; n < 20; ++n)
    w.set_label(int(rng.uniform_index(6)), int(rng.uniform_index(5)),
                int(rng.uniform_index(4)), VoxelLabel(1 + rng.uniform_index(3)));
  std::ostringstream os;
  w.dump(os);
  std::istringstream is(os.str());
  const VoxelWorld back = VoxelWorld::restore(is);
  REQUIRE(back.nx() == 6);
  REQUIRE(back.resolution() == Catch::Approx(0.25));
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 6; ++i)
        REQUIRE(back.label(i, j, k) == w.label(i, j, k));
}
