#include <doctest.h>

#include <cmath>

#include "enstrect/camera.hpp"
#include "enstrect/error.hpp"
#include "oracles.hpp"

using namespace enstrect;

namespace {

CameraView basic_view() {
  CameraView v;
  v.name = "test";
  v.width = 100;
  v.height = 100;
  v.fx = v.fy = 100.0;
  v.cx = v.cy = 50.0;
  return v;
}

}  // namespace

TEST_CASE("project_point: optical axis and pinhole arithmetic") {
  const CameraView v = basic_view();
  const auto on_axis = project_point(v, {0, 0, 1});
  REQUIRE(on_axis.has_value());
  CHECK(on_axis->u == doctest::Approx(50.0));
  CHECK(on_axis->v == doctest::Approx(50.0));
  CHECK(on_axis->depth == doctest::Approx(1.0));
  CHECK(on_axis->in_bounds);

  CHECK_FALSE(project_point(v, {0, 0, -1}).has_value());  // behind camera

  const auto off = project_point(v, {0.1, 0, 1});
  REQUIRE(off.has_value());
  CHECK(off->u == doctest::Approx(60.0));
  CHECK(off->v == doctest::Approx(50.0));
}

TEST_CASE("projection/unprojection round trip under random poses") {
  auto gen = oracles::rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    CameraView v = basic_view();
    v.rotation = oracles::random_rotation(100 + trial);
    v.translation = {uni(gen), uni(gen), uni(gen)};
    const Eigen::Vector3d world(uni(gen), uni(gen), uni(gen));
    const auto proj = project_point(v, world);
    if (!proj) continue;
    const Eigen::Vector3d back = unproject(v, proj->u, proj->v, proj->depth);
    CHECK((back - world).norm() <= 1e-9 * std::max(1.0, world.norm()));
  }
}

TEST_CASE("visibility: single point in front is visible") {
  const CameraView v = basic_view();
  PointCloud cloud;
  cloud.positions = {{0, 0, 1}};
  const auto mask = visibility_mask(v, cloud, {});
  CHECK(mask == std::vector<char>{1});
}

TEST_CASE("visibility: nearer point occludes farther on the same ray") {
  const CameraView v = basic_view();
  PointCloud cloud;
  cloud.positions = {{0, 0, 1}, {0, 0, 2}};
  VisibilityOptions opts;
  opts.depth_tol_rel = 0.01;
  const auto mask = visibility_mask(v, cloud, opts);
  CHECK(mask[0] == 1);
  CHECK(mask[1] == 0);

  VisibilityOptions no_occ;
  no_occ.occlusion = false;
  const auto free_mask = visibility_mask(v, cloud, no_occ);
  CHECK(free_mask == std::vector<char>{1, 1});
}

TEST_CASE("visibility: occlusion-free mode is a superset") {
  const auto pts = oracles::random_cloud(400, 9, 0.5);
  PointCloud cloud;
  for (const auto& p : pts) cloud.positions.push_back(p + Eigen::Vector3d(0, 0, 2.0));
  const CameraView v = basic_view();
  const auto with_occ = visibility_mask(v, cloud, {});
  VisibilityOptions no_occ;
  no_occ.occlusion = false;
  const auto without = visibility_mask(v, cloud, no_occ);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (with_occ[i]) CHECK(without[i]);
}

TEST_CASE("visibility: wall plus occluding slab matches ray-cast oracle within 2%") {
  // Wall grid at z = 2 (10x10), slab at z = 1 covering a quarter of the
  // frame, plus the 100 slab points themselves.
  PointCloud cloud;
  for (int iy = 0; iy < 10; ++iy)
    for (int ix = 0; ix < 10; ++ix)
      cloud.positions.push_back({-0.9 + 0.2 * ix, -0.9 + 0.2 * iy, 2.0});
  const double sx0 = -0.45, sx1 = 0.05, sy0 = -0.45, sy1 = 0.05, sz = 1.0;
  for (int iy = 0; iy < 10; ++iy)
    for (int ix = 0; ix < 10; ++ix)
      cloud.positions.push_back({sx0 + (sx1 - sx0) * ix / 9.0,
                                 sy0 + (sy1 - sy0) * iy / 9.0, sz});
  REQUIRE(cloud.size() == 200);

  const CameraView v = basic_view();
  const auto mask = visibility_mask(v, cloud, {});

  int disagreements = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto proj = project_point(v, cloud.positions[i]);
    bool expected = proj.has_value() && proj->in_bounds;
    if (expected && cloud.positions[i].z() > sz + 1e-9) {
      if (oracles::segment_hits_rectangle(Eigen::Vector3d::Zero(), cloud.positions[i], sx0,
                                          sx1, sy0, sy1, sz))
        expected = false;
    }
    if (expected != (mask[i] != 0)) ++disagreements;
  }
  CHECK(disagreements <= 4);  // 2% of 200
}

TEST_CASE("sample_heatmap: constant raster, pixel centers, midpoint") {
  Heatmap constant{2, 2, {0.7f, 0.7f, 0.7f, 0.7f}};
  CHECK(sample_heatmap(constant, 0.3, 1.2) == doctest::Approx(0.7));

  Heatmap columns{2, 2, {0.0f, 1.0f, 0.0f, 1.0f}};  // [[0,1],[0,1]]
  CHECK(sample_heatmap(columns, 0, 0) == doctest::Approx(0.0));
  CHECK(sample_heatmap(columns, 1, 0) == doctest::Approx(1.0));
  CHECK(sample_heatmap(columns, 0, 1) == doctest::Approx(0.0));
  CHECK(sample_heatmap(columns, 1, 1) == doctest::Approx(1.0));

  Heatmap rows{2, 2, {0.0f, 0.0f, 1.0f, 1.0f}};  // [[0,0],[1,1]]
  CHECK(sample_heatmap(rows, 0.5, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("sample_heatmap: value bounded by 4-neighborhood") {
  auto gen = oracles::rng(31);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Heatmap map;
  map.width = 8;
  map.height = 6;
  map.values.resize(48);
  for (auto& x : map.values) x = static_cast<float>(uni(gen));
  for (int trial = 0; trial < 200; ++trial) {
    const double u = uni(gen) * (map.width - 1);
    const double v = uni(gen) * (map.height - 1);
    const int u0 = static_cast<int>(u), v0 = static_cast<int>(v);
    const int u1 = std::min(u0 + 1, map.width - 1), v1 = std::min(v0 + 1, map.height - 1);
    const double lo = std::min({map.at(u0, v0), map.at(u1, v0), map.at(u0, v1), map.at(u1, v1)});
    const double hi = std::max({map.at(u0, v0), map.at(u1, v0), map.at(u0, v1), map.at(u1, v1)});
    const double s = sample_heatmap(map, u, v);
    CHECK(s >= lo - 1e-12);
    CHECK(s <= hi + 1e-12);
  }
}

TEST_CASE("sample_heatmap: errors") {
  CameraView v = basic_view();
  v.heatmaps.resize(1);
  v.heatmaps[0] = Heatmap{100, 100, std::vector<float>(10000, 0.5f)};
  CHECK_THROWS_AS(sample_heatmap(v, 0, -1.0, 5.0), ValidationError);   // out of bounds
  CHECK_THROWS_AS(sample_heatmap(v, 0, 5.0, 100.0), ValidationError);  // out of bounds
  CHECK_THROWS_AS(sample_heatmap(v, 3, 5.0, 5.0), ValidationError);    // unknown class
}

TEST_CASE("camera validation") {
  CameraView v = basic_view();
  CHECK_NOTHROW(v.validate());
  v.rotation(0, 0) = 2.0;
  CHECK_THROWS_WITH_AS(v.validate(), doctest::Contains("orthonormal"), ValidationError);
  v = basic_view();
  v.rotation.col(0) = -v.rotation.col(0);  // determinant -1
  CHECK_THROWS_WITH_AS(v.validate(), doctest::Contains("improper"), ValidationError);
  v = basic_view();
  v.fx = 0.0;
  CHECK_THROWS_AS(v.validate(), ValidationError);
}
