#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "enstrect/error.hpp"
#include "enstrect/skeleton.hpp"
#include "oracles.hpp"

using namespace enstrect;

namespace {

double total_weight(const NeighborGraph& g) {
  return std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
}

InstanceCloud strip_instance(const std::vector<Eigen::Vector3d>& pts) {
  InstanceCloud inst;
  inst.class_index = 1;
  inst.positions = pts;
  inst.point_indices.resize(pts.size());
  std::iota(inst.point_indices.begin(), inst.point_indices.end(), 0);
  return inst;
}

// Dense planar strip around a 2D centerline segment chain (z = 0).
std::vector<Eigen::Vector3d> crack_strip(const std::vector<Eigen::Vector2d>& centerline,
                                         double width, double step) {
  std::vector<Eigen::Vector3d> pts;
  for (std::size_t s = 0; s + 1 < centerline.size(); ++s) {
    const Eigen::Vector2d a = centerline[s], b = centerline[s + 1];
    const double len = (b - a).norm();
    const Eigen::Vector2d dir = (b - a) / len;
    const Eigen::Vector2d nrm(-dir.y(), dir.x());
    for (double t = 0.0; t <= len + 1e-12; t += step)
      for (double w = -width / 2; w <= width / 2 + 1e-12; w += step) {
        const Eigen::Vector2d p = a + t * dir + w * nrm;
        pts.push_back({p.x(), p.y(), 0.0});
      }
  }
  // Deduplicate near-exact joints between segments.
  std::sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) {
    return std::make_tuple(p.x(), p.y(), p.z()) < std::make_tuple(q.x(), q.y(), q.z());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& p, const auto& q) { return (p - q).norm() < 1e-9; }),
            pts.end());
  return pts;
}

double hausdorff_to_segment(const MedialAxis& axis, const Eigen::Vector3d& a,
                            const Eigen::Vector3d& b) {
  double worst = 0.0;
  for (const auto& line : axis.polylines) {
    for (const auto& p : line.vertices) {
      const Eigen::Vector3d ab = b - a;
      const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      worst = std::max(worst, (p - (a + t * ab)).norm());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("mst: three collinear points") {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const NeighborGraph tree = minimum_spanning_tree(pts);
  CHECK(std::set<std::pair<int, int>>(tree.edges.begin(), tree.edges.end()) ==
        std::set<std::pair<int, int>>{{0, 1}, {1, 2}});
  CHECK(total_weight(tree) == doctest::Approx(2.0));
}

TEST_CASE("mst: unit square corners total 3.0 (exhaustive oracle)") {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const NeighborGraph tree = minimum_spanning_tree(pts);
  CHECK(total_weight(tree) == doctest::Approx(3.0));
  CHECK(total_weight(tree) == doctest::Approx(oracles::exhaustive_mst_weight(pts)));
}

TEST_CASE("mst: equals exhaustive Prufer enumeration for n <= 8") {
  for (int n = 2; n <= 8; ++n) {
    const auto pts = oracles::random_cloud(n, 400 + n);
    const NeighborGraph tree = minimum_spanning_tree(pts);
    CHECK(static_cast<int>(tree.edges.size()) == n - 1);
    CHECK(total_weight(tree) == doctest::Approx(oracles::exhaustive_mst_weight(pts)).epsilon(1e-12));
  }
}

TEST_CASE("mst: k-NN route with component bridging matches the complete graph") {
  const auto pts = oracles::random_cloud(300, 71);
  MstOptions complete;
  complete.complete_threshold = 1000;
  MstOptions knn;
  knn.complete_threshold = 10;  // force the k-NN + bridging path
  knn.knn_k = 6;
  const double exact = total_weight(minimum_spanning_tree(pts, complete));
  const double approx = total_weight(minimum_spanning_tree(pts, knn));
  CHECK(approx >= exact - 1e-12);
  CHECK(approx <= exact * 1.02);  // k-NN MST is near-exact on uniform clouds
}

TEST_CASE("mst: fewer than 2 points") {
  CHECK_THROWS_AS(minimum_spanning_tree({{0, 0, 0}}), ValidationError);
}

TEST_CASE("partition: path of 5 nodes gives one polyline") {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({static_cast<double>(i), 0, 0});
  const NeighborGraph tree = minimum_spanning_tree(pts);
  const MedialAxis axis = partition_polylines(tree, pts);
  REQUIRE(axis.polylines.size() == 1);
  CHECK(axis.polylines[0].vertices.size() == 5);
  CHECK(axis.end_nodes == 2);
  CHECK(axis.branching_nodes == 0);
}

TEST_CASE("partition: Y tree gives three polylines sharing the branch vertex") {
  // Star with center 0 and arms 1,2,3.
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {1, 0, 0}, {-1, 0.5, 0}, {-1, -0.5, 0}};
  const auto tree = NeighborGraph::from_edges(
      4, 0, {{{0, 1}, 1.0}, {{0, 2}, std::sqrt(1.25)}, {{0, 3}, std::sqrt(1.25)}});
  const MedialAxis axis = partition_polylines(tree, pts);
  REQUIRE(axis.polylines.size() == 3);
  CHECK(axis.branching_nodes == 1);
  CHECK(axis.end_nodes == 3);
  for (const auto& line : axis.polylines) {
    REQUIRE(line.vertices.size() == 2);
    CHECK(line.source_indices.front() == 0);  // branch vertex duplicated into each
  }
}

TEST_CASE("partition: two branching nodes give five branch-free polylines") {
  // An H-shaped tree: two degree-3 nodes joined by a bridge.
  //   0       4
  //    \     /
  //     2 - 3
  //    /     \
  //   1       5
  const std::vector<Eigen::Vector3d> pts = {{-1, 1, 0}, {-1, -1, 0}, {0, 0, 0},
                                            {1, 0, 0},  {2, 1, 0},  {2, -1, 0}};
  const auto tree = NeighborGraph::from_edges(6, 0,
                                              {{{0, 2}, std::sqrt(2.0)},
                                               {{1, 2}, std::sqrt(2.0)},
                                               {{2, 3}, 1.0},
                                               {{3, 4}, std::sqrt(2.0)},
                                               {{3, 5}, std::sqrt(2.0)}});
  const MedialAxis axis = partition_polylines(tree, pts);
  CHECK(axis.polylines.size() == 5);
  CHECK(axis.branching_nodes == 2);
  // Polyline count identity: sum over branching nodes of (degree-1), plus 1.
  CHECK(static_cast<int>(axis.polylines.size()) == (3 - 1) + (3 - 1) + 1);
}

TEST_CASE("partition: edge conservation on random trees") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 20;
    const auto pts = oracles::random_cloud(n, 900 + trial);
    const NeighborGraph tree = minimum_spanning_tree(pts);
    const MedialAxis axis = partition_polylines(tree, pts);

    std::multiset<std::pair<int, int>> tree_edges(tree.edges.begin(), tree.edges.end());
    std::multiset<std::pair<int, int>> axis_edges;
    for (const auto& line : axis.polylines)
      for (std::size_t i = 0; i + 1 < line.source_indices.size(); ++i) {
        const int a = line.source_indices[i], b = line.source_indices[i + 1];
        axis_edges.insert({std::min(a, b), std::max(a, b)});
      }
    REQUIRE(tree_edges == axis_edges);

    int branch_sum = 1;
    for (int i = 0; i < tree.node_count; ++i)
      if (tree.degree(i) >= 3) branch_sum += tree.degree(i) - 1;
    CHECK(static_cast<int>(axis.polylines.size()) == branch_sum);
  }
}

TEST_CASE("partition: rejects non-trees and empty input") {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const auto cycle = NeighborGraph::from_edges(
      3, 0, {{{0, 1}, 1.0}, {{1, 2}, std::sqrt(2.0)}, {{0, 2}, 1.0}});
  CHECK_THROWS_WITH_AS(partition_polylines(cycle, pts), doctest::Contains("not a tree"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(partition_polylines(NeighborGraph{}, {}), doctest::Contains("empty"),
                       ValidationError);
}

TEST_CASE("douglas_peucker: straight chain collapses to endpoints") {
  std::vector<Eigen::Vector3d> line;
  for (int i = 0; i <= 100; ++i) line.push_back({0.01 * i, 0.0, 0.0});
  const auto simplified = douglas_peucker(line, 0.001);
  REQUIRE(simplified.size() == 2);
  CHECK(simplified.front() == line.front());
  CHECK(simplified.back() == line.back());
}

TEST_CASE("douglas_peucker: keeps salient corners") {
  const std::vector<Eigen::Vector3d> line = {{0, 0, 0}, {0.5, 0.2, 0}, {1, 0, 0}};
  CHECK(douglas_peucker(line, 0.01).size() == 3);
  CHECK(douglas_peucker(line, 0.5).size() == 2);
}

TEST_CASE("farthest_point_downsample: deterministic and spread") {
  const auto pts = oracles::random_cloud(200, 61);
  const auto a = farthest_point_downsample(pts, 50);
  const auto b = farthest_point_downsample(pts, 50);
  CHECK(a == b);
  CHECK(a.size() == 50);
  const auto all = farthest_point_downsample(pts, 500);
  CHECK(all.size() == 200);
}

TEST_CASE("extract_medial_axis: straight strip within 2 mm of the centerline") {
  const auto pts = crack_strip({{0.0, 0.0}, {0.4, 0.0}}, 0.012, 0.002);
  MedialAxisParams params;
  const MedialAxis axis = extract_medial_axis(strip_instance(pts), params);
  REQUIRE(axis.polylines.size() == 1);
  CHECK(hausdorff_to_segment(axis, {0, 0, 0}, {0.4, 0, 0}) < 0.002);
}

TEST_CASE("extract_medial_axis: Y strip gives three polylines with a shared junction") {
  // Grid-sampled forking strip (uniform density, like a scanned wall):
  // trunk to the junction, two 45-degree arms.
  const double spacing = 0.001, width = 0.004;
  const Eigen::Vector2d junction(0.2, 0.0);
  const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments = {
      {{0.0, 0.0}, junction}, {junction, {0.35, 0.15}}, {junction, {0.35, -0.15}}};
  std::vector<Eigen::Vector3d> pts;
  for (double x = -0.02; x <= 0.4; x += spacing) {
    for (double y = -0.25; y <= 0.25; y += spacing) {
      const Eigen::Vector2d q(x, y);
      double d = 1e9;
      for (const auto& [a, b] : segments) {
        const Eigen::Vector2d ab = b - a;
        const double t = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        d = std::min(d, (q - (a + t * ab)).norm());
      }
      if (d <= width / 2) pts.push_back({x, y, 0.0});
    }
  }

  const MedialAxis axis = extract_medial_axis(strip_instance(pts), {});
  REQUIRE(axis.polylines.size() == 3);

  // Shared endpoint within 5 mm of the true junction.
  std::map<std::pair<long, long>, int> endpoint_use;
  for (const auto& line : axis.polylines) {
    for (const Eigen::Vector3d& e : {line.vertices.front(), line.vertices.back()}) {
      const auto key = std::make_pair(std::lround(e.x() * 1e7), std::lround(e.y() * 1e7));
      ++endpoint_use[key];
    }
  }
  bool found_junction = false;
  for (const auto& [key, uses] : endpoint_use) {
    if (uses == 3) {
      const Eigen::Vector2d j(key.first * 1e-7, key.second * 1e-7);
      CHECK((j - junction).norm() < 0.005);
      found_junction = true;
    }
  }
  CHECK(found_junction);
}

TEST_CASE("extract_medial_axis: empty instance") {
  CHECK_THROWS_AS(extract_medial_axis(InstanceCloud{}, {}), ValidationError);
}

TEST_CASE("extract_medial_axis: rigid equivariance") {
  const auto pts = crack_strip({{0.0, 0.0}, {0.3, 0.05}}, 0.01, 0.002);
  const Eigen::Matrix3d rot = oracles::random_rotation(87);
  const Eigen::Vector3d shift(0.4, -0.2, 1.3);
  std::vector<Eigen::Vector3d> moved;
  for (const auto& p : pts) moved.push_back(rot * p + shift);

  MedialAxisParams params;
  const MedialAxis base = extract_medial_axis(strip_instance(pts), params);
  const MedialAxis transformed = extract_medial_axis(strip_instance(moved), params);
  REQUIRE(base.polylines.size() == transformed.polylines.size());

  // Compare as point sets (vertex order/count may legally differ after
  // simplification): symmetric nearest-vertex distance within tolerance.
  auto vertices = [](const MedialAxis& a) {
    std::vector<Eigen::Vector3d> out;
    for (const auto& line : a.polylines)
      out.insert(out.end(), line.vertices.begin(), line.vertices.end());
    return out;
  };
  const auto va = vertices(base);
  const auto vb = vertices(transformed);
  for (const auto& p : va) {
    double best = 1e9;
    for (const auto& q : vb) best = std::min(best, (rot * p + shift - q).norm());
    CHECK(best < 2e-3);
  }
}
