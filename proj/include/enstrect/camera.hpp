#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "enstrect/geometry.hpp"

namespace enstrect {

// Per-class probability raster, row-major, values in [0, 1].
// Pixel centers sit at integer coordinates.
struct Heatmap {
  int width = 0, height = 0;
  std::vector<float> values;

  float at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  bool empty() const { return values.empty(); }
};

// Pinhole view: camera point X_c = R * X_w + t, pixel u = fx*x/z + cx.
struct CameraView {
  std::string name;
  int width = 0, height = 0;
  double fx = 0, fy = 0, cx = 0, cy = 0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // world -> camera
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::string heatmap_prefix;
  std::vector<Heatmap> heatmaps;  // one per class, catalog order; empty before attach

  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

  // Throws ValidationError on non-orthonormal rotation, bad intrinsics,
  // or heatmap dimension mismatch.
  void validate() const;
};

struct Projection {
  double u = 0, v = 0;
  double depth = 0;       // along the optical axis, meters
  bool in_bounds = false;
};

// nullopt when the point is behind the camera (depth <= 0).
std::optional<Projection> project_point(const CameraView& view, const Eigen::Vector3d& point);

// Inverse of project_point for depth > 0.
Eigen::Vector3d unproject(const CameraView& view, double u, double v, double depth);

struct VisibilityOptions {
  bool occlusion = true;           // disable for the occlusion-free mode
  double splat_radius_px = 2.0;
  double depth_tol_rel = 0.01;
};

// Per-point visibility in one view. With occlusion enabled a point must not
// lie more than (1 + depth_tol_rel) behind the minimum splatted depth around
// its pixel.
std::vector<char> visibility_mask(const CameraView& view, const PointCloud& cloud,
                                  const VisibilityOptions& opts = {});

// Bilinear interpolation, clamped at raster borders. (u, v) must be in-bounds.
double sample_heatmap(const Heatmap& map, double u, double v);
double sample_heatmap(const CameraView& view, int class_id, double u, double v);

}  // namespace enstrect
