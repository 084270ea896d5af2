#include "enstrect/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

double auto_eps(const std::vector<Eigen::Vector3d>& points, const KdTree& tree, double factor) {
  std::vector<double> nn(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nbr = tree.knn(points[i], 1, static_cast<int>(i));
    nn[i] = nbr.empty() ? 0.0 : (points[i] - points[nbr[0]]).norm();
  }
  std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
  return factor * nn[nn.size() / 2];
}

}  // namespace

void DbscanParams::validate() const {
  if (!(eps > 0.0) && !(eps_auto_factor > 0.0))
    throw ValidationError("dbscan: eps or eps_auto_factor must be positive");
  if (min_pts < 1) throw ValidationError("dbscan: min_pts must be >= 1");
}

std::vector<int> dbscan(const std::vector<Eigen::Vector3d>& points, const DbscanParams& params) {
  if (points.empty()) throw ValidationError("dbscan: empty point set");
  params.validate();

  const KdTree tree(points);
  double eps = params.eps;
  if (!(eps > 0.0)) {
    eps = auto_eps(points, tree, params.eps_auto_factor);
    if (!(eps > 0.0)) throw ValidationError("dbscan: auto eps degenerate (coincident points)");
  }
  const double eps2 = eps * eps;

  const int n = static_cast<int>(points.size());
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int next_cluster = 0;

  for (int i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto neighbors = tree.radius(points[i], eps2);  // includes i itself
    if (static_cast<int>(neighbors.size()) < params.min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    label[i] = cluster;
    std::deque<int> queue(neighbors.begin(), neighbors.end());
    while (!queue.empty()) {
      const int j = queue.front();
      queue.pop_front();
      if (label[j] == kNoise) label[j] = cluster;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = cluster;
      auto reach = tree.radius(points[j], eps2);
      if (static_cast<int>(reach.size()) >= params.min_pts)
        queue.insert(queue.end(), reach.begin(), reach.end());
    }
  }
  return label;
}

DbscanParams InstanceSplitOptions::params_for(const std::string& class_name) const {
  const auto it = overrides.find(class_name);
  if (it != overrides.end()) return it->second;
  return crack_classes.count(class_name) ? crack_defaults : areal_defaults;
}

std::vector<InstanceCloud> split_instances(const SegmentedCloud& seg,
                                           const InstanceSplitOptions& opts) {
  seg.validate();
  std::vector<InstanceCloud> instances;

  for (int cls = 0; cls < seg.catalog.size(); ++cls) {
    if (cls == seg.catalog.background) continue;
    std::vector<int> member;
    for (std::size_t i = 0; i < seg.cloud.size(); ++i)
      if (seg.labels[i] == cls) member.push_back(static_cast<int>(i));
    if (member.empty()) continue;

    std::vector<Eigen::Vector3d> pts;
    pts.reserve(member.size());
    for (int idx : member) pts.push_back(seg.cloud.positions[idx]);

    const auto labels = dbscan(pts, opts.params_for(seg.catalog.names[cls]));
    const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

    std::vector<InstanceCloud> per_class(std::max(n_clusters, 0));
    for (auto& inst : per_class) inst.class_index = cls;
    for (std::size_t i = 0; i < member.size(); ++i) {
      if (labels[i] < 0) continue;  // noise dropped
      auto& inst = per_class[labels[i]];
      inst.point_indices.push_back(member[i]);
      inst.positions.push_back(pts[i]);
      if (seg.cloud.has_normals()) inst.normals.push_back(seg.cloud.normals[member[i]]);
    }
    std::stable_sort(per_class.begin(), per_class.end(),
                     [](const InstanceCloud& a, const InstanceCloud& b) {
                       if (a.size() != b.size()) return a.size() > b.size();
                       return a.point_indices.front() < b.point_indices.front();
                     });
    for (auto& inst : per_class)
      if (!inst.point_indices.empty()) instances.push_back(std::move(inst));
  }
  return instances;
}

}  // namespace enstrect
