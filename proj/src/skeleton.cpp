#include "enstrect/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

NeighborGraph mst_complete(const std::vector<Eigen::Vector3d>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<double> key(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<char> in_tree(n, 0);
  key[0] = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!in_tree[i] && (u < 0 || key[i] < key[u])) u = i;
    in_tree[u] = 1;
    for (int v = 0; v < n; ++v) {
      if (in_tree[v] || v == u) continue;
      const double w = (pts[u] - pts[v]).norm();
      if (w < key[v]) {
        key[v] = w;
        parent[v] = u;
      }
    }
  }
  std::vector<std::pair<std::pair<int, int>, double>> raw;
  raw.reserve(n - 1);
  for (int v = 0; v < n; ++v)
    if (parent[v] >= 0) raw.push_back({{parent[v], v}, (pts[parent[v]] - pts[v]).norm()});
  return NeighborGraph::from_edges(n, 0, std::move(raw));
}

NeighborGraph mst_knn(const std::vector<Eigen::Vector3d>& pts, int k) {
  const int n = static_cast<int>(pts.size());
  auto adj = knn_adjacency(pts, std::min(k, n - 1));
  std::vector<std::pair<double, std::pair<int, int>>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j : adj[i]) {
      const int a = std::min(i, j), b = std::max(i, j);
      edges.push_back({(pts[a] - pts[b]).norm(), {a, b}});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  DisjointSet ds(n);
  std::vector<std::pair<std::pair<int, int>, double>> raw;
  for (const auto& [w, e] : edges)
    if (ds.unite(e.first, e.second)) raw.push_back({e, w});

  // Bridge remaining components by their nearest point pair.
  while (static_cast<int>(raw.size()) < n - 1) {
    std::vector<int> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = ds.find(i);
    const int root0 = roots[0];
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_edge{-1, -1};
    for (int i = 0; i < n; ++i) {
      if (roots[i] != root0) continue;
      for (int j = 0; j < n; ++j) {
        if (roots[j] == root0) continue;
        const double w = (pts[i] - pts[j]).norm();
        if (w < best) {
          best = w;
          best_edge = {std::min(i, j), std::max(i, j)};
        }
      }
    }
    ds.unite(best_edge.first, best_edge.second);
    raw.push_back({best_edge, best});
  }
  return NeighborGraph::from_edges(n, 0, std::move(raw));
}

double point_segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

void douglas_peucker_rec(const std::vector<Eigen::Vector3d>& line, int lo, int hi,
                         double tolerance, std::vector<char>& keep) {
  if (hi - lo < 2) return;
  double worst = -1.0;
  int split = -1;
  for (int i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(line[i], line[lo], line[hi]);
    if (d > worst) {
      worst = d;
      split = i;
    }
  }
  if (worst > tolerance) {
    keep[split] = 1;
    douglas_peucker_rec(line, lo, split, tolerance, keep);
    douglas_peucker_rec(line, split, hi, tolerance, keep);
  }
}

}  // namespace

NeighborGraph minimum_spanning_tree(const std::vector<Eigen::Vector3d>& points,
                                    const MstOptions& opts) {
  const int n = static_cast<int>(points.size());
  if (n < 2) throw ValidationError("minimum_spanning_tree: need at least 2 points");
  return n <= opts.complete_threshold ? mst_complete(points) : mst_knn(points, opts.knn_k);
}

MedialAxis partition_polylines(const NeighborGraph& tree,
                               const std::vector<Eigen::Vector3d>& points) {
  if (tree.node_count == 0 || tree.edges.empty())
    throw ValidationError("partition_polylines: empty tree");
  if (static_cast<int>(points.size()) != tree.node_count)
    throw ValidationError("partition_polylines: point/node count mismatch");
  if (static_cast<int>(tree.edges.size()) != tree.node_count - 1)
    throw ValidationError("partition_polylines: graph is not a tree (edge count)");

  // Connectivity; together with |E| = n-1 this implies acyclicity.
  {
    std::vector<char> seen(tree.node_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : tree.adjacency[u]) {
        (void)w;
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    if (reached != tree.node_count)
      throw ValidationError("partition_polylines: graph is not connected");
  }

  MedialAxis axis;
  for (int i = 0; i < tree.node_count; ++i) {
    const int d = tree.degree(i);
    if (d == 1) ++axis.end_nodes;
    if (d >= 3) ++axis.branching_nodes;
  }

  // Walk every maximal degree-2 chain between terminals (degree != 2 nodes).
  std::map<std::pair<int, int>, char> used;
  auto mark = [&](int a, int b) { used[{std::min(a, b), std::max(a, b)}] = 1; };
  auto is_used = [&](int a, int b) { return used.count({std::min(a, b), std::max(a, b)}) > 0; };

  for (int start = 0; start < tree.node_count; ++start) {
    if (tree.degree(start) == 2) continue;
    for (const auto& [first, w0] : tree.adjacency[start]) {
      (void)w0;
      if (is_used(start, first)) continue;
      Polyline3D line;
      line.source_indices = {start, first};
      mark(start, first);
      int prev = start, cur = first;
      while (tree.degree(cur) == 2) {
        int next = -1;
        for (const auto& [v, w] : tree.adjacency[cur]) {
          (void)w;
          if (v != prev) next = v;
        }
        mark(cur, next);
        line.source_indices.push_back(next);
        prev = cur;
        cur = next;
      }
      // Canonical orientation: smaller terminal index first.
      if (line.source_indices.front() > line.source_indices.back())
        std::reverse(line.source_indices.begin(), line.source_indices.end());
      for (int idx : line.source_indices) line.vertices.push_back(points[idx]);
      axis.polylines.push_back(std::move(line));
    }
  }
  std::sort(axis.polylines.begin(), axis.polylines.end(),
            [](const Polyline3D& a, const Polyline3D& b) {
              return std::make_tuple(a.source_indices.front(), a.source_indices.back(),
                                     a.source_indices.size()) <
                     std::make_tuple(b.source_indices.front(), b.source_indices.back(),
                                     b.source_indices.size());
            });
  return axis;
}

std::vector<int> farthest_point_downsample(const std::vector<Eigen::Vector3d>& points,
                                           int target, double min_spacing) {
  const int n = static_cast<int>(points.size());
  if (target <= 0) target = n;
  if (target >= n && !(min_spacing > 0.0)) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  int seed = 0;
  for (int i = 1; i < n; ++i) {
    const auto &a = points[i], &b = points[seed];
    if (std::make_tuple(a.x(), a.y(), a.z()) < std::make_tuple(b.x(), b.y(), b.z())) seed = i;
  }
  std::vector<int> selected{seed};
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = (points[i] - points[seed]).squaredNorm();
  const double min_spacing2 = min_spacing * min_spacing;
  while (static_cast<int>(selected.size()) < target) {
    int far = 0;
    for (int i = 1; i < n; ++i)
      if (dist[i] > dist[far]) far = i;
    if (dist[far] <= 0.0) break;  // only duplicates remain
    if (min_spacing2 > 0.0 && dist[far] < min_spacing2) break;
    selected.push_back(far);
    for (int i = 0; i < n; ++i)
      dist[i] = std::min(dist[i], (points[i] - points[far]).squaredNorm());
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<Eigen::Vector3d> douglas_peucker(const std::vector<Eigen::Vector3d>& line,
                                             double tolerance) {
  if (line.size() <= 2 || tolerance <= 0.0) return line;
  std::vector<char> keep(line.size(), 0);
  keep.front() = keep.back() = 1;
  douglas_peucker_rec(line, 0, static_cast<int>(line.size()) - 1, tolerance, keep);
  std::vector<Eigen::Vector3d> out;
  for (std::size_t i = 0; i < line.size(); ++i)
    if (keep[i]) out.push_back(line[i]);
  return out;
}

MedialAxis extract_medial_axis(const InstanceCloud& instance, const MedialAxisParams& params) {
  if (instance.positions.empty()) throw ValidationError("extract_medial_axis: empty instance");
  ContractionResult contracted = contract(instance, params.contraction);

  // Weld coincident contracted points (keep the first occurrence).
  std::vector<Eigen::Vector3d> welded;
  welded.reserve(contracted.points.size());
  {
    std::map<std::tuple<double, double, double>, int> seen;
    for (const auto& p : contracted.points) {
      const auto key = std::make_tuple(p.x(), p.y(), p.z());
      if (seen.emplace(key, 1).second) welded.push_back(p);
    }
  }
  if (welded.size() < 2)
    throw ProcessingError("extract_medial_axis: contraction collapsed the instance to a point");

  double min_spacing = 0.0;
  if (params.downsample_min_spacing_factor > 0.0) {
    const KdTree tree(instance.positions);
    double nn_sum = 0.0;
    for (std::size_t i = 0; i < instance.positions.size(); ++i) {
      const auto nn = tree.knn(instance.positions[i], 1, static_cast<int>(i));
      if (!nn.empty()) nn_sum += (instance.positions[i] - instance.positions[nn[0]]).norm();
    }
    min_spacing = params.downsample_min_spacing_factor * nn_sum /
                  static_cast<double>(instance.positions.size());
  }

  std::vector<Eigen::Vector3d> nodes;
  if ((params.downsample_max_vertices > 0 &&
       static_cast<int>(welded.size()) > params.downsample_max_vertices) ||
      min_spacing > 0.0) {
    for (int idx :
         farthest_point_downsample(welded, params.downsample_max_vertices, min_spacing))
      nodes.push_back(welded[idx]);
  } else {
    nodes = std::move(welded);
  }
  if (nodes.size() < 2)
    throw ProcessingError("extract_medial_axis: downsampling left fewer than 2 nodes");

  const NeighborGraph tree = minimum_spanning_tree(nodes, params.mst);
  MedialAxis axis = partition_polylines(tree, nodes);

  if (params.simplify_tolerance > 0.0) {
    for (auto& line : axis.polylines) {
      line.vertices = douglas_peucker(line.vertices, params.simplify_tolerance);
      line.source_indices.clear();
    }
  }
  return axis;
}

}  // namespace enstrect
