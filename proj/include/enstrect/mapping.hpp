#pragma once

#include <string>
#include <vector>

#include "enstrect/camera.hpp"
#include "enstrect/geometry.hpp"

namespace enstrect {

struct ClassCatalog {
  std::vector<std::string> names;
  int background = 0;

  // {background, crack, spalling, corrosion}
  static ClassCatalog standard();

  int size() const { return static_cast<int>(names.size()); }
  int index_of(const std::string& name) const;  // -1 when absent
  void validate() const;
};

// Fusion output: per-point per-class aggregated scores, winner-takes-all
// labels, and the per-point valid-view count N.
struct SegmentedCloud {
  PointCloud cloud;
  ClassCatalog catalog;
  std::vector<double> scores;     // size() * catalog.size(), row-major by point
  std::vector<int> labels;
  std::vector<int> view_counts;   // N per point

  double score(std::size_t point, int cls) const {
    return scores[point * catalog.names.size() + cls];
  }
  void validate() const;
};

// Angular view weight: 1/N when the angle between the point normal and the
// viewing direction lies strictly inside (130deg, 230deg), else 0. With the
// unsigned angle in [0deg, 180deg] an anti-parallel pair (surface facing the
// camera) measures 180deg, so the interval accepts (130deg, 180deg].
double view_weight(const Eigen::Vector3d& point_normal, const Eigen::Vector3d& view_direction,
                   int valid_view_count);

struct FuseOptions {
  VisibilityOptions visibility;
  // Alternative reading of N: count every view the point is visible in,
  // not only views inside the angular interval.
  bool count_all_visible_views = false;
  int threads = 1;
};

// Fuses per-view heatmaps onto the cloud. Points with no valid view get the
// background label, N = 0, and zero scores. Accumulation runs in ascending
// view order so results are bit-reproducible.
SegmentedCloud fuse(const PointCloud& cloud, const std::vector<CameraView>& views,
                    const ClassCatalog& catalog, const FuseOptions& opts = {});

}  // namespace enstrect
