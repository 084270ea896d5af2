#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "enstrect/mapping.hpp"

namespace enstrect {

struct DbscanParams {
  double eps = 0.0;              // meters; 0 selects the auto rule below
  int min_pts = 10;              // includes the point itself
  double eps_auto_factor = 4.0;  // eps = factor * median nearest-neighbor distance
  void validate() const;
};

// Standard DBSCAN, deterministic: seeds scan in ascending index order and
// border points join the first core cluster that reaches them.
// Returns per-point cluster ids, -1 for noise.
std::vector<int> dbscan(const std::vector<Eigen::Vector3d>& points, const DbscanParams& params);

// One damage instance: a same-class subcloud of the segmented cloud.
struct InstanceCloud {
  int class_index = -1;
  std::vector<int> point_indices;  // into the parent SegmentedCloud
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> normals;  // empty when parent has none

  std::size_t size() const { return point_indices.size(); }
};

struct InstanceSplitOptions {
  DbscanParams crack_defaults{0.0, 5, 4.0};
  DbscanParams areal_defaults{0.0, 10, 4.0};
  std::set<std::string> crack_classes{"crack"};
  std::map<std::string, DbscanParams> overrides;  // by class name

  DbscanParams params_for(const std::string& class_name) const;
};

// Per-class DBSCAN over the labeled points; noise is dropped. Instances are
// ordered by (class index, descending size, first point index).
std::vector<InstanceCloud> split_instances(const SegmentedCloud& seg,
                                           const InstanceSplitOptions& opts = {});

}  // namespace enstrect
