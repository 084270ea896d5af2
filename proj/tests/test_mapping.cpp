#include <doctest.h>

#include <cmath>

#include "enstrect/error.hpp"
#include "enstrect/mapping.hpp"
#include "oracles.hpp"

using namespace enstrect;

namespace {

// Camera at `center` looking straight at `target`, constant per-class rasters.
CameraView looking_camera(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                          const std::vector<float>& class_values) {
  CameraView v;
  v.width = v.height = 64;
  v.fx = v.fy = 64.0;
  v.cx = v.cy = 32.0;
  const Eigen::Vector3d forward = (target - center).normalized();
  Eigen::Vector3d up(0, 1, 0);
  if (std::abs(up.dot(forward)) > 0.9) up = Eigen::Vector3d(1, 0, 0);
  const Eigen::Vector3d right = up.cross(forward).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  v.rotation.row(0) = right;
  v.rotation.row(1) = down;
  v.rotation.row(2) = forward;
  v.translation = -(v.rotation * center);
  for (float value : class_values) {
    Heatmap h;
    h.width = v.width;
    h.height = v.height;
    h.values.assign(static_cast<std::size_t>(64) * 64, value);
    v.heatmaps.push_back(std::move(h));
  }
  return v;
}

const ClassCatalog kTwoClass{{"background", "crack"}, 0};

}  // namespace

TEST_CASE("view_weight: anti-parallel pair scores 1/N") {
  CHECK(view_weight({0, 0, 1}, {0, 0, -1}, 4) == doctest::Approx(0.25));
}

TEST_CASE("view_weight: boundary and outside angles score zero") {
  // Exactly 130 degrees: strict inequality keeps the weight at zero.
  const double angle = 130.0 * M_PI / 180.0;
  const Eigen::Vector3d n(0, 0, 1);
  const Eigen::Vector3d dir(std::sin(angle), 0, std::cos(angle));
  CHECK(view_weight(n, dir, 3) == 0.0);

  // Just inside the interval.
  const double inside = 130.5 * M_PI / 180.0;
  CHECK(view_weight(n, {std::sin(inside), 0, std::cos(inside)}, 3) ==
        doctest::Approx(1.0 / 3.0));

  // Grazing view, 90 degrees.
  CHECK(view_weight({0, 0, 1}, {1, 0, 0}, 2) == 0.0);
}

TEST_CASE("view_weight: errors") {
  CHECK_THROWS_WITH_AS(view_weight({0, 0, 0}, {0, 0, 1}, 1), doctest::Contains("zero-length"),
                       ValidationError);
  CHECK_THROWS_AS(view_weight({0, 0, 1}, {0, 0, -1}, 0), ValidationError);
}

TEST_CASE("fuse: two agreeing views produce the class score") {
  PointCloud cloud;
  cloud.positions = {{0, 0, 0}};
  cloud.normals = {{0, 0, -1}};
  std::vector<CameraView> views = {
      looking_camera({-0.3, 0, -2}, {0, 0, 0}, {0.1f, 0.9f}),
      looking_camera({0.3, 0, -2}, {0, 0, 0}, {0.1f, 0.9f}),
  };
  const SegmentedCloud seg = fuse(cloud, views, kTwoClass, {});
  CHECK(seg.view_counts[0] == 2);
  CHECK(seg.labels[0] == 1);
  CHECK(seg.score(0, 1) == doctest::Approx(0.9));
  CHECK(seg.score(0, 0) == doctest::Approx(0.1));
}

TEST_CASE("fuse: point with no valid view falls back to background") {
  PointCloud cloud;
  cloud.positions = {{0, 0, 0}};
  cloud.normals = {{0, 0, 1}};  // facing away from every camera
  std::vector<CameraView> views = {looking_camera({0, 0, -2}, {0, 0, 0}, {0.2f, 0.8f})};
  const SegmentedCloud seg = fuse(cloud, views, kTwoClass, {});
  CHECK(seg.view_counts[0] == 0);
  CHECK(seg.labels[0] == kTwoClass.background);
  CHECK(seg.score(0, 0) == 0.0);
  CHECK(seg.score(0, 1) == 0.0);
}

TEST_CASE("fuse: hand-evaluated two-view aggregation prefers background") {
  // view A (crack 0.6, bg 0.4), view B (crack 0.2, bg 0.8) at weight 1/2
  // each: crack 0.4 < bg 0.6.
  PointCloud cloud;
  cloud.positions = {{0, 0, 0}};
  cloud.normals = {{0, 0, -1}};
  std::vector<CameraView> views = {
      looking_camera({-0.3, 0, -2}, {0, 0, 0}, {0.4f, 0.6f}),
      looking_camera({0.3, 0, -2}, {0, 0, 0}, {0.8f, 0.2f}),
  };
  const SegmentedCloud seg = fuse(cloud, views, kTwoClass, {});
  CHECK(seg.score(0, 1) == doctest::Approx(0.4));
  CHECK(seg.score(0, 0) == doctest::Approx(0.6));
  CHECK(seg.labels[0] == kTwoClass.background);
}

TEST_CASE("fuse: errors on missing normals or views") {
  PointCloud cloud;
  cloud.positions = {{0, 0, 0}};
  std::vector<CameraView> views = {looking_camera({0, 0, -2}, {0, 0, 0}, {1.0f, 0.0f})};
  CHECK_THROWS_WITH_AS(fuse(cloud, views, kTwoClass, {}), doctest::Contains("no normals"),
                       ValidationError);
  cloud.normals = {{0, 0, -1}};
  CHECK_THROWS_WITH_AS(fuse(cloud, {}, kTwoClass, {}), doctest::Contains("empty view"),
                       ValidationError);
}

TEST_CASE("fuse: scores stay within [0,1] and labels consistent") {
  auto gen = oracles::rng(71);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PointCloud cloud;
  for (int i = 0; i < 40; ++i)
    cloud.positions.push_back({uni(gen) * 0.4 - 0.2, uni(gen) * 0.4 - 0.2, 0.0});
  cloud.normals.assign(40, {0, 0, -1});

  std::vector<CameraView> views;
  for (int k = 0; k < 3; ++k) {
    const float a = static_cast<float>(uni(gen));
    const float b = static_cast<float>(uni(gen));
    views.push_back(looking_camera({0.4 * k - 0.4, 0, -2}, {0, 0, 0}, {a, b}));
  }
  const SegmentedCloud seg = fuse(cloud, views, kTwoClass, {});
  seg.validate();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      CHECK(seg.score(i, c) >= 0.0);
      CHECK(seg.score(i, c) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("fuse: invariant to view permutation") {
  PointCloud cloud;
  for (int i = 0; i < 10; ++i) cloud.positions.push_back({0.02 * i, 0.0, 0.0});
  cloud.normals.assign(10, {0, 0, -1});
  std::vector<CameraView> views = {
      looking_camera({-0.4, 0, -2}, {0.1, 0, 0}, {0.3f, 0.7f}),
      looking_camera({0.0, 0.2, -2}, {0.1, 0, 0}, {0.6f, 0.4f}),
      looking_camera({0.4, -0.2, -2}, {0.1, 0, 0}, {0.5f, 0.5f}),
  };
  const SegmentedCloud a = fuse(cloud, views, kTwoClass, {});
  std::reverse(views.begin(), views.end());
  const SegmentedCloud b = fuse(cloud, views, kTwoClass, {});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(a.labels[i] == b.labels[i]);
    for (int c = 0; c < 2; ++c) CHECK(a.score(i, c) == doctest::Approx(b.score(i, c)));
  }
}

TEST_CASE("fuse: global heatmap scaling does not change labels") {
  auto gen = oracles::rng(91);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PointCloud cloud;
  for (int i = 0; i < 30; ++i)
    cloud.positions.push_back({uni(gen) * 0.4 - 0.2, uni(gen) * 0.4 - 0.2, 0.0});
  cloud.normals.assign(30, {0, 0, -1});

  std::vector<CameraView> views;
  for (int k = 0; k < 3; ++k)
    views.push_back(looking_camera({0.3 * k - 0.3, 0, -2}, {0, 0, 0},
                                   {static_cast<float>(uni(gen)), static_cast<float>(uni(gen))}));
  const SegmentedCloud before = fuse(cloud, views, kTwoClass, {});

  const double scale = 0.37;  // keeps values inside [0,1]
  for (auto& v : views)
    for (auto& h : v.heatmaps)
      for (auto& x : h.values) x = static_cast<float>(x * scale);
  const SegmentedCloud after = fuse(cloud, views, kTwoClass, {});
  CHECK(before.labels == after.labels);
}

TEST_CASE("fuse: one-hot single view labels every in-interval point") {
  PointCloud cloud;
  for (int i = 0; i < 25; ++i) cloud.positions.push_back({0.01 * i - 0.12, 0.0, 0.0});
  cloud.normals.assign(25, {0, 0, -1});
  std::vector<CameraView> views = {looking_camera({0, 0, -2}, {0, 0, 0}, {0.0f, 1.0f})};
  FuseOptions opts;
  opts.visibility.occlusion = false;
  const SegmentedCloud seg = fuse(cloud, views, kTwoClass, opts);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(seg.view_counts[i] == 1);
    CHECK(seg.labels[i] == 1);
  }
}

TEST_CASE("fuse: alternative N counts all visible views") {
  // Two cameras see the point; only one lies inside the angular interval.
  PointCloud cloud;
  cloud.positions = {{0, 0, 0}};
  cloud.normals = {{0, 0, -1}};
  std::vector<CameraView> views = {
      looking_camera({0, 0, -2}, {0, 0, 0}, {0.0f, 1.0f}),
      // Nearly edge-on: visible, but the angle is outside (130, 230).
      looking_camera({-3.0, 0, -0.2}, {0, 0, 0}, {0.0f, 1.0f}),
  };
  FuseOptions strict;
  const SegmentedCloud in_interval = fuse(cloud, views, kTwoClass, strict);
  CHECK(in_interval.view_counts[0] == 1);
  CHECK(in_interval.score(0, 1) == doctest::Approx(1.0));

  FuseOptions all_visible;
  all_visible.count_all_visible_views = true;
  const SegmentedCloud alt = fuse(cloud, views, kTwoClass, all_visible);
  CHECK(alt.view_counts[0] == 2);
  CHECK(alt.score(0, 1) == doctest::Approx(0.5));  // one in-interval view at weight 1/2
}
