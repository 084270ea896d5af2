#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "enstrect/error.hpp"
#include "enstrect/polygon.hpp"
#include "oracles.hpp"

using namespace enstrect;

namespace {

InstanceCloud patch_instance(std::vector<Eigen::Vector3d> pts) {
  InstanceCloud inst;
  inst.class_index = 2;
  inst.positions = std::move(pts);
  inst.point_indices.resize(inst.positions.size());
  std::iota(inst.point_indices.begin(), inst.point_indices.end(), 0);
  return inst;
}

std::vector<Eigen::Vector2d> loop_points(const std::vector<Eigen::Vector2d>& pts,
                                         const std::vector<int>& loop) {
  std::vector<Eigen::Vector2d> out;
  for (int idx : loop) out.push_back(pts[idx]);
  return out;
}

}  // namespace

TEST_CASE("delaunay: empty circumcircle property on random points") {
  for (const std::uint64_t seed : {3u, 4u, 5u}) {
    auto gen = oracles::rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Eigen::Vector2d> pts(60);
    for (auto& p : pts) p = {uni(gen), uni(gen)};
    const auto tris = delaunay_triangulation(pts);

    // Triangulation area must tile the convex hull; every circumcircle empty.
    double tri_area = 0.0;
    for (const auto& t : tris) {
      const Eigen::Vector2d a = pts[t.a], b = pts[t.b], c = pts[t.c];
      tri_area += 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
      const Eigen::Vector2d center = [&] {
        const double d = 2.0 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
        const double b2 = (b - a).squaredNorm(), c2 = (c - a).squaredNorm();
        return Eigen::Vector2d(
            a.x() + ((c - a).y() * b2 - (b - a).y() * c2) / d,
            a.y() + ((b - a).x() * c2 - (c - a).x() * b2) / d);
      }();
      const double r = (a - center).norm();
      for (const auto& p : pts) {
        CHECK((p - center).norm() >= r - 1e-7);  // no point strictly inside
      }
    }
    // Convex hull area via the gift-wrap-free route: shoelace of hull points.
    std::vector<Eigen::Vector2d> hull;
    {
      std::vector<Eigen::Vector2d> sorted = pts;
      std::sort(sorted.begin(), sorted.end(), [](const auto& p, const auto& q) {
        return std::make_pair(p.x(), p.y()) < std::make_pair(q.x(), q.y());
      });
      auto half = [&](auto begin, auto end) {
        std::vector<Eigen::Vector2d> chain;
        for (auto it = begin; it != end; ++it) {
          while (chain.size() >= 2) {
            const Eigen::Vector2d u = chain[chain.size() - 1] - chain[chain.size() - 2];
            const Eigen::Vector2d v = *it - chain[chain.size() - 2];
            if (u.x() * v.y() - u.y() * v.x() <= 0)
              chain.pop_back();
            else
              break;
          }
          chain.push_back(*it);
        }
        return chain;
      };
      auto lower = half(sorted.begin(), sorted.end());
      auto upper = half(sorted.rbegin(), sorted.rend());
      hull = lower;
      hull.insert(hull.end(), upper.begin() + 1, upper.end() - 1);
    }
    CHECK(tri_area == doctest::Approx(oracles::shoelace(hull)).epsilon(1e-6));
  }
}

TEST_CASE("delaunay: rejects degenerate input") {
  CHECK_THROWS_AS(delaunay_triangulation({{0, 0}, {1, 1}}), ValidationError);
  CHECK_THROWS_WITH_AS(delaunay_triangulation({{0, 0}, {1, 1}, {2, 2}, {3, 3}}),
                       doctest::Contains("collinear"), ValidationError);
}

TEST_CASE("pca_project: plane z=2 has e3 = +-z and full explained variance") {
  auto gen = oracles::rng(41);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 80; ++i) pts.push_back({uni(gen), uni(gen), 2.0});
  const PcaProjection proj = pca_project(pts);
  CHECK(std::abs(std::abs(proj.frame.e3.z()) - 1.0) < 1e-9);
  CHECK(proj.frame.explained_variance_ratio == doctest::Approx(1.0));
  CHECK(proj.planar);
}

TEST_CASE("pca_project: tilted plane preserves pairwise distances up to axis scale") {
  auto gen = oracles::rng(43);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double tilt = 30.0 * M_PI / 180.0;
  std::vector<Eigen::Vector3d> pts;
  std::vector<Eigen::Vector2d> plane_coords;
  for (int i = 0; i < 60; ++i) {
    const double u = uni(gen), v = uni(gen);
    plane_coords.push_back({u, v});
    pts.push_back({u, v * std::cos(tilt), v * std::sin(tilt)});
  }
  const PcaProjection proj = pca_project(pts);
  // Un-normalize and compare pairwise distances with the in-plane truth.
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) {
      const Eigen::Vector2d a = proj.normalized[i].cwiseProduct(proj.frame.norm_scale);
      const Eigen::Vector2d b = proj.normalized[j].cwiseProduct(proj.frame.norm_scale);
      const double truth = (plane_coords[i] - plane_coords[j]).norm();
      CHECK((a - b).norm() == doctest::Approx(truth).epsilon(1e-9));
    }
  }
}

TEST_CASE("pca_project: corner patch is flagged non-planar") {
  auto gen = oracles::rng(47);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({uni(gen), uni(gen), 0.0});       // floor
  for (int i = 0; i < 100; ++i) pts.push_back({uni(gen), 1.0, uni(gen)});       // wall
  const PcaProjection proj = pca_project(pts);
  CHECK_FALSE(proj.planar);
  CHECK(proj.frame.explained_variance_ratio < 0.95);
}

TEST_CASE("pca_project: degenerate input") {
  CHECK_THROWS_AS(pca_project(std::vector<Eigen::Vector3d>{{0, 0, 0}, {1, 0, 0}}),
                  ValidationError);
  std::vector<Eigen::Vector3d> collinear;
  for (int i = 0; i < 10; ++i) collinear.push_back({0.1 * i, 0.2 * i, 0.0});
  CHECK_THROWS_WITH_AS(pca_project(collinear), doctest::Contains("degenerate"), ValidationError);
}

TEST_CASE("alpha_boundary: unit square corners at alpha -> 0+ give the square") {
  const std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const BoundaryLoops loops = alpha_boundary(pts, 1e-9);
  REQUIRE(loops.main_loop.size() == 4);
  CHECK(loops.aux_loops.empty());
  CHECK(oracles::shoelace(loop_points(pts, loops.main_loop)) == doctest::Approx(1.0));
}

TEST_CASE("alpha_boundary: dense L-shape at alpha=100 recovers the concavity") {
  // L covering [0,1]^2 minus the (0.5,1.0)x(0.5,1.0) quadrant, spacing 0.01.
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double x = 0.01 * i, y = 0.01 * j;
      if (x > 0.5 + 1e-12 && y > 0.5 + 1e-12) continue;
      pts.push_back({x, y});
    }
  }
  const BoundaryLoops loops = alpha_boundary(pts, 100.0);
  const double area = oracles::shoelace(loop_points(pts, loops.main_loop));
  CHECK(area == doctest::Approx(0.75).epsilon(0.05));  // true L area
  CHECK(area < 1.0);                                   // strictly below the hull area
}

TEST_CASE("alpha_boundary: errors") {
  CHECK_THROWS_AS(alpha_boundary({{0, 0}, {1, 1}}, 100.0), ValidationError);
  // Alpha so large no triangle survives.
  const std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_THROWS_WITH_AS(alpha_boundary(pts, 1e9), doctest::Contains("reduce alpha"),
                       ProcessingError);
}

TEST_CASE("alpha_boundary: kept-triangle sets nest with alpha") {
  auto gen = oracles::rng(53);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Eigen::Vector2d> pts(120);
  for (auto& p : pts) p = {uni(gen), uni(gen)};
  const auto tris = delaunay_triangulation(pts);
  auto kept = [&](double alpha) {
    std::set<std::tuple<int, int, int>> out;
    for (const auto& t : tris)
      if (circumradius(pts[t.a], pts[t.b], pts[t.c]) <= 1.0 / alpha)
        out.insert({t.a, t.b, t.c});
    return out;
  };
  const auto k10 = kept(10.0), k30 = kept(30.0), k90 = kept(90.0);
  CHECK(std::includes(k10.begin(), k10.end(), k30.begin(), k30.end()));
  CHECK(std::includes(k30.begin(), k30.end(), k90.begin(), k90.end()));
}

TEST_CASE("extract_polygon: planar disc encloses the points and matches its area") {
  std::vector<Eigen::Vector3d> pts;
  const double spacing = 0.005, radius = 0.3;
  for (double x = -radius; x <= radius; x += spacing)
    for (double y = -radius; y <= radius; y += spacing)
      if (x * x + y * y <= radius * radius) pts.push_back({x, y, 0.5});
  const InstanceCloud inst = patch_instance(pts);
  const BoundingPolygon25D poly = extract_polygon(inst);
  CHECK(poly.planar);

  // Project instance and polygon into the PCA plane; count containment.
  const PcaProjection proj = pca_project(inst);
  std::vector<Eigen::Vector2d> loop;
  for (int idx : poly.vertex_indices) loop.push_back(proj.normalized[idx]);
  int inside = 0;
  for (const auto& p : proj.normalized)
    if (oracles::point_in_loop(p, loop, 1e-9)) ++inside;
  CHECK(inside >= static_cast<int>(0.95 * proj.normalized.size()));

  // Shoelace area in metric plane coordinates vs the analytic disc.
  std::vector<Eigen::Vector2d> metric_loop;
  for (const auto& v : loop) metric_loop.push_back(v.cwiseProduct(poly.frame.norm_scale));
  CHECK(oracles::shoelace(metric_loop) ==
        doctest::Approx(M_PI * radius * radius).epsilon(0.10));
}

TEST_CASE("extract_polygon: vertices are exact members of the instance point set") {
  std::vector<Eigen::Vector3d> pts;
  for (double x = 0.0; x <= 0.2 + 1e-12; x += 0.002)
    for (double y = 0.0; y <= 0.2 + 1e-12; y += 0.002) pts.push_back({x, y, 1.0});
  const InstanceCloud inst = patch_instance(pts);
  const BoundingPolygon25D poly = extract_polygon(inst);
  REQUIRE(poly.vertices.size() == poly.vertex_indices.size());
  for (std::size_t i = 0; i < poly.vertices.size(); ++i)
    CHECK(poly.vertices[i] == inst.positions[poly.vertex_indices[i]]);
}

TEST_CASE("extract_polygon: polygon area never exceeds the convex hull area") {
  for (const std::uint64_t seed : {61u, 62u}) {
    auto gen = oracles::rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 400; ++i) pts.push_back({uni(gen) * 0.4, uni(gen) * 0.3, 0.0});
    const InstanceCloud inst = patch_instance(pts);
    const BoundingPolygon25D poly = extract_polygon(inst, {40.0, {}});
    const PcaProjection proj = pca_project(inst);

    std::vector<Eigen::Vector2d> loop;
    for (int idx : poly.vertex_indices) loop.push_back(proj.normalized[idx]);
    const auto hull_tris = delaunay_triangulation(proj.normalized);
    double hull_area = 0.0;
    for (const auto& t : hull_tris) {
      const Eigen::Vector2d a = proj.normalized[t.a], b = proj.normalized[t.b],
                            c = proj.normalized[t.c];
      hull_area += 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    }
    CHECK(oracles::shoelace(loop) <= hull_area + 1e-9);
  }
}

TEST_CASE("extract_polygon: corner-spanning patch comes back flagged") {
  auto gen = oracles::rng(67);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 400; ++i) pts.push_back({uni(gen), uni(gen), 0.0});
  for (int i = 0; i < 400; ++i) pts.push_back({uni(gen), 1.0 + uni(gen) * 1e-3, uni(gen)});
  const BoundingPolygon25D poly = extract_polygon(patch_instance(pts));
  CHECK_FALSE(poly.planar);  // produced, but flagged
  CHECK(poly.vertices.size() >= 3);
}
