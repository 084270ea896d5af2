#include "enstrect/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

bool lex_less(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

constexpr int kLeafSize = 16;

}  // namespace

void PointCloud::validate() const {
  if (!normals.empty() && normals.size() != positions.size())
    throw ValidationError("point cloud invariant: normals length mismatch");
  if (!colors.empty() && colors.size() != positions.size())
    throw ValidationError("point cloud invariant: colors length mismatch");
  for (const auto& p : positions) {
    if (!p.allFinite())
      throw ValidationError("point cloud invariant: non-finite coordinate");
  }
  for (const auto& n : normals) {
    if (std::abs(n.norm() - 1.0) > 1e-6)
      throw ValidationError("point cloud invariant: normal is not unit length");
  }
}

KdTree::KdTree(const std::vector<Eigen::Vector3d>& points) : points_(&points) {
  order_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order_[i] = static_cast<int>(i);
  if (!points.empty()) build(0, static_cast<int>(points.size()));
}

int KdTree::build(int begin, int end) {
  const auto& pts = *points_;
  Node node;
  node.begin = begin;
  node.end = end;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = pts[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(pts[order_[i]]);
    hi = hi.cwiseMax(pts[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide: keep as leaf

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     if (pts[a][axis] != pts[b][axis]) return pts[a][axis] < pts[b][axis];
                     return lex_less(pts[a], pts[b]);
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = pts[order_[mid]][axis];
  const int left = build(begin, mid);
  nodes_[id].left = left;
  const int right = build(mid, end);
  nodes_[id].right = right;
  return id;
}

bool KdTree::closer(const Candidate& a, const Candidate& b) const {
  if (a.d2 != b.d2) return a.d2 < b.d2;
  const auto& pa = (*points_)[a.index];
  const auto& pb = (*points_)[b.index];
  if (pa != pb) return lex_less(pa, pb);
  return a.index < b.index;
}

std::vector<int> KdTree::knn(const Eigen::Vector3d& query, int k, int skip) const {
  std::vector<Candidate> heap;  // max-heap on closer(): worst candidate on top
  heap.reserve(static_cast<std::size_t>(k) + 1);
  auto heap_cmp = [this](const Candidate& a, const Candidate& b) { return closer(a, b); };

  auto consider = [&](int idx) {
    if (idx == skip) return;
    Candidate c{((*points_)[idx] - query).squaredNorm(), idx};
    if (static_cast<int>(heap.size()) < k) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), heap_cmp);
    } else if (closer(c, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), heap_cmp);
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end(), heap_cmp);
    }
  };

  // Depth-first with near-side preference; prune strictly so equal-distance
  // candidates across the plane still get visited for the lex tie-break.
  std::vector<int> stack{nodes_.empty() ? -1 : 0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (id < 0) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) consider(order_[i]);
      continue;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta < 0 ? node.left : node.right;
    const int far = delta < 0 ? node.right : node.left;
    if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().d2)
      stack.push_back(far);
    stack.push_back(near);
  }

  std::sort(heap.begin(), heap.end(), heap_cmp);
  std::vector<int> out;
  out.reserve(heap.size());
  for (const auto& c : heap) out.push_back(c.index);
  return out;
}

std::vector<int> KdTree::radius(const Eigen::Vector3d& query, double r2) const {
  std::vector<int> out;
  if (nodes_.empty()) return out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if (((*points_)[idx] - query).squaredNorm() <= r2) out.push_back(idx);
      }
      continue;
    }
    const double delta = query[node.axis] - node.split;
    if (delta * delta <= r2) {
      stack.push_back(node.left);
      stack.push_back(node.right);
    } else {
      stack.push_back(delta < 0 ? node.left : node.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void NeighborGraph::validate() const {
  if (static_cast<int>(adjacency.size()) != node_count)
    throw ValidationError("neighbor graph invariant: adjacency size mismatch");
  if (edges.size() != weights.size())
    throw ValidationError("neighbor graph invariant: edge/weight size mismatch");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (a == b) throw ValidationError("neighbor graph invariant: self-edge");
    if (a < 0 || b < 0 || a >= node_count || b >= node_count)
      throw ValidationError("neighbor graph invariant: edge index out of range");
    if (!(weights[e] > 0.0) || !std::isfinite(weights[e]))
      throw ValidationError("neighbor graph invariant: non-positive or non-finite weight");
    if (e > 0 && edges[e] == edges[e - 1])
      throw ValidationError("neighbor graph invariant: duplicate edge");
  }
}

NeighborGraph NeighborGraph::from_edges(
    int node_count, int k, std::vector<std::pair<std::pair<int, int>, double>> raw) {
  for (auto& [e, w] : raw) {
    if (e.first > e.second) std::swap(e.first, e.second);
    (void)w;
  }
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  raw.erase(std::unique(raw.begin(), raw.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            raw.end());

  NeighborGraph g;
  g.node_count = node_count;
  g.k = k;
  g.adjacency.resize(node_count);
  g.edges.reserve(raw.size());
  g.weights.reserve(raw.size());
  for (const auto& [e, w] : raw) {
    g.edges.push_back(e);
    g.weights.push_back(w);
    g.adjacency[e.first].emplace_back(e.second, w);
    g.adjacency[e.second].emplace_back(e.first, w);
  }
  g.validate();
  return g;
}

PointCloud estimate_normals(const PointCloud& cloud, const NormalEstimationOptions& opts) {
  if (opts.k < 3) throw ValidationError("estimate_normals: k must be >= 3");
  if (cloud.size() < static_cast<std::size_t>(opts.k) + 1)
    throw ValidationError("estimate_normals: too few points for k=" + std::to_string(opts.k));
  cloud.validate();

  PointCloud out = cloud;
  out.normals.assign(cloud.size(), Eigen::Vector3d::Zero());
  const KdTree tree(cloud.positions);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = tree.knn(cloud.positions[i], opts.k, static_cast<int>(i));
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nbrs) mean += cloud.positions[j];
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : nbrs) {
      const Eigen::Vector3d d = cloud.positions[j] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d n = eig.eigenvectors().col(0);  // smallest eigenvalue
    n.normalize();

    if (opts.reference_viewpoint) {
      if (n.dot(*opts.reference_viewpoint - cloud.positions[i]) < 0.0) n = -n;
    } else {
      if (n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0))))
        n = -n;
    }
    out.normals[i] = n;
  }
  return out;
}

NeighborGraph build_knn_graph(const PointCloud& cloud, int k) {
  if (k < 1) throw ValidationError("build_knn_graph: k must be >= 1");
  if (cloud.size() < static_cast<std::size_t>(k) + 1)
    throw ValidationError("build_knn_graph: too few points for k=" + std::to_string(k));

  const KdTree tree(cloud.positions);
  std::vector<std::pair<std::pair<int, int>, double>> raw;
  raw.reserve(cloud.size() * static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = tree.knn(cloud.positions[i], k, static_cast<int>(i));
    for (int j : nbrs) {
      const double w = (cloud.positions[i] - cloud.positions[j]).norm();
      if (w <= 0.0)
        throw ValidationError("build_knn_graph: degenerate duplicate points");
      raw.push_back({{static_cast<int>(i), j}, w});
    }
  }
  return NeighborGraph::from_edges(static_cast<int>(cloud.size()), k, std::move(raw));
}

std::vector<std::vector<int>> knn_adjacency(const std::vector<Eigen::Vector3d>& points, int k) {
  const KdTree tree(points);
  std::vector<std::vector<int>> adj(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    adj[i] = tree.knn(points[i], k, static_cast<int>(i));
  return adj;
}

}  // namespace enstrect
