#include "enstrect/camera.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "enstrect/error.hpp"

namespace enstrect {

void CameraView::validate() const {
  const Eigen::Matrix3d rtr = rotation.transpose() * rotation;
  if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-4)
    throw ValidationError("camera '" + name + "': rotation is not orthonormal");
  if (rotation.determinant() < 0.0)
    throw ValidationError("camera '" + name + "': improper rotation (determinant -1)");
  if (width <= 0 || height <= 0)
    throw ValidationError("camera '" + name + "': non-positive image dimensions");
  if (!(fx > 0.0) || !(fy > 0.0))
    throw ValidationError("camera '" + name + "': focal lengths must be positive");
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
    throw ValidationError("camera '" + name + "': principal point outside image");
  for (const auto& h : heatmaps) {
    if (h.empty()) continue;
    if (h.width != width || h.height != height)
      throw ValidationError("camera '" + name + "': heatmap dimensions mismatch");
    for (float v : h.values)
      if (!(v >= 0.0f && v <= 1.0f))
        throw ValidationError("camera '" + name + "': heatmap value outside [0,1]");
  }
}

std::optional<Projection> project_point(const CameraView& view, const Eigen::Vector3d& point) {
  const Eigen::Vector3d pc = view.rotation * point + view.translation;
  if (pc.z() <= 0.0) return std::nullopt;
  Projection proj;
  proj.depth = pc.z();
  proj.u = view.fx * pc.x() / pc.z() + view.cx;
  proj.v = view.fy * pc.y() / pc.z() + view.cy;
  proj.in_bounds = proj.u >= 0.0 && proj.u < view.width && proj.v >= 0.0 && proj.v < view.height;
  return proj;
}

Eigen::Vector3d unproject(const CameraView& view, double u, double v, double depth) {
  const Eigen::Vector3d pc((u - view.cx) / view.fx * depth, (v - view.cy) / view.fy * depth, depth);
  return view.rotation.transpose() * (pc - view.translation);
}

std::vector<char> visibility_mask(const CameraView& view, const PointCloud& cloud,
                                  const VisibilityOptions& opts) {
  if (cloud.size() == 0) throw ValidationError("visibility_mask: empty cloud");
  if (opts.occlusion && (!(opts.splat_radius_px > 0.0) || !(opts.depth_tol_rel > 0.0)))
    throw ValidationError("visibility_mask: non-positive splat radius or depth tolerance");

  const std::size_t n = cloud.size();
  std::vector<char> visible(n, 0);
  std::vector<Projection> projs(n);
  std::vector<char> valid(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = project_point(view, cloud.positions[i]);
    if (p && p->in_bounds) {
      projs[i] = *p;
      valid[i] = 1;
    }
  }

  if (!opts.occlusion) {
    for (std::size_t i = 0; i < n; ++i) visible[i] = valid[i];
    return visible;
  }

  // Min-depth buffer at pixel resolution; the splat neighborhood is applied
  // at query time, which is equivalent to splatting at write time.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> depth(static_cast<std::size_t>(view.width) * view.height, inf);
  auto pix = [&](const Projection& p, int& px, int& py) {
    px = std::clamp(static_cast<int>(std::lround(p.u)), 0, view.width - 1);
    py = std::clamp(static_cast<int>(std::lround(p.v)), 0, view.height - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    int px, py;
    pix(projs[i], px, py);
    double& d = depth[static_cast<std::size_t>(py) * view.width + px];
    d = std::min(d, projs[i].depth);
  }

  const int r = static_cast<int>(std::ceil(opts.splat_radius_px));
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    int px, py;
    pix(projs[i], px, py);
    double dmin = inf;
    for (int dy = -r; dy <= r; ++dy) {
      const int y = py + dy;
      if (y < 0 || y >= view.height) continue;
      for (int dx = -r; dx <= r; ++dx) {
        const int x = px + dx;
        if (x < 0 || x >= view.width) continue;
        dmin = std::min(dmin, depth[static_cast<std::size_t>(y) * view.width + x]);
      }
    }
    visible[i] = projs[i].depth <= (1.0 + opts.depth_tol_rel) * dmin ? 1 : 0;
  }
  return visible;
}

double sample_heatmap(const Heatmap& map, double u, double v) {
  if (map.empty()) throw ValidationError("sample_heatmap: heatmap not attached");
  if (u < 0.0 || u >= map.width || v < 0.0 || v >= map.height)
    throw ValidationError("sample_heatmap: coordinates out of bounds");
  const int u0 = std::min(static_cast<int>(std::floor(u)), map.width - 1);
  const int v0 = std::min(static_cast<int>(std::floor(v)), map.height - 1);
  const int u1 = std::min(u0 + 1, map.width - 1);
  const int v1 = std::min(v0 + 1, map.height - 1);
  const double fu = u - u0, fv = v - v0;
  const double a = map.at(u0, v0) * (1.0 - fu) + map.at(u1, v0) * fu;
  const double b = map.at(u0, v1) * (1.0 - fu) + map.at(u1, v1) * fu;
  return a * (1.0 - fv) + b * fv;
}

double sample_heatmap(const CameraView& view, int class_id, double u, double v) {
  if (class_id < 0 || class_id >= static_cast<int>(view.heatmaps.size()))
    throw ValidationError("sample_heatmap: unknown class id " + std::to_string(class_id));
  return sample_heatmap(view.heatmaps[class_id], u, v);
}

}  // namespace enstrect
