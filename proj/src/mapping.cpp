#include "enstrect/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <thread>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

// cos(130 deg); theta > 130 <=> cos(theta) < kCos130 on [0, 180].
const double kCos130 = std::cos(130.0 * M_PI / 180.0);

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
  if (threads <= 1 || n < 2048) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(n, t * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back(body, begin, end);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ClassCatalog ClassCatalog::standard() {
  return ClassCatalog{{"background", "crack", "spalling", "corrosion"}, 0};
}

int ClassCatalog::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

void ClassCatalog::validate() const {
  if (names.empty()) throw ValidationError("class catalog: no classes");
  if (background < 0 || background >= size())
    throw ValidationError("class catalog: background index out of range");
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size())
    throw ValidationError("class catalog: duplicate class names");
}

void SegmentedCloud::validate() const {
  cloud.validate();
  catalog.validate();
  const std::size_t n = cloud.size();
  const std::size_t c = catalog.names.size();
  if (scores.size() != n * c)
    throw ValidationError("segmented cloud invariant: score array shape mismatch");
  if (labels.size() != n || view_counts.size() != n)
    throw ValidationError("segmented cloud invariant: per-point array length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= static_cast<int>(c))
      throw ValidationError("segmented cloud invariant: label out of range");
    if (view_counts[i] == 0 && labels[i] != catalog.background)
      throw ValidationError("segmented cloud invariant: unviewed point not background");
  }
}

double view_weight(const Eigen::Vector3d& point_normal, const Eigen::Vector3d& view_direction,
                   int valid_view_count) {
  const double nn = point_normal.norm();
  const double nv = view_direction.norm();
  if (nn < 1e-12 || nv < 1e-12) throw ValidationError("view_weight: zero-length vector");
  if (valid_view_count <= 0) throw ValidationError("view_weight: view count must be >= 1");
  const double c = point_normal.dot(view_direction) / (nn * nv);
  return c < kCos130 ? 1.0 / valid_view_count : 0.0;
}

SegmentedCloud fuse(const PointCloud& cloud, const std::vector<CameraView>& views,
                    const ClassCatalog& catalog, const FuseOptions& opts) {
  if (!cloud.has_normals()) throw ValidationError("fuse: cloud has no normals");
  if (views.empty()) throw ValidationError("fuse: empty view list");
  catalog.validate();
  cloud.validate();
  for (const auto& v : views) {
    v.validate();
    if (static_cast<int>(v.heatmaps.size()) != catalog.size())
      throw ValidationError("fuse: view '" + v.name + "' is missing class heatmaps");
  }

  const std::size_t n = cloud.size();
  const int nc = catalog.size();

  SegmentedCloud seg;
  seg.cloud = cloud;
  seg.catalog = catalog;
  seg.scores.assign(n * nc, 0.0);
  seg.labels.assign(n, catalog.background);
  seg.view_counts.assign(n, 0);

  std::vector<std::vector<char>> visible(views.size());
  for (std::size_t vi = 0; vi < views.size(); ++vi)
    visible[vi] = visibility_mask(views[vi], cloud, opts.visibility);
  std::vector<Eigen::Vector3d> centers(views.size());
  for (std::size_t vi = 0; vi < views.size(); ++vi) centers[vi] = views[vi].center();

  parallel_for(n, opts.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> probs(nc);
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d& p = cloud.positions[i];
      const Eigen::Vector3d& normal = cloud.normals[i];

      int n_visible = 0;
      int n_in_interval = 0;
      for (std::size_t vi = 0; vi < views.size(); ++vi) {
        if (!visible[vi][i]) continue;
        ++n_visible;
        const Eigen::Vector3d dir = (p - centers[vi]).normalized();
        if (normal.dot(dir) < kCos130) ++n_in_interval;
      }
      const int count = opts.count_all_visible_views ? n_visible : n_in_interval;
      seg.view_counts[i] = count;
      if (count == 0 || n_in_interval == 0) {
        seg.labels[i] = catalog.background;
        continue;
      }

      double* row = &seg.scores[i * nc];
      for (std::size_t vi = 0; vi < views.size(); ++vi) {
        if (!visible[vi][i]) continue;
        const Eigen::Vector3d dir = (p - centers[vi]).normalized();
        if (!(normal.dot(dir) < kCos130)) continue;
        const auto proj = project_point(views[vi], p);
        for (int c = 0; c < nc; ++c) {
          row[c] += sample_heatmap(views[vi], c, proj->u, proj->v) / count;
        }
      }

      // Argmax with ties resolved toward background, then lowest class index.
      int label = catalog.background;
      double best = row[catalog.background];
      for (int c = 0; c < nc; ++c) {
        if (c == catalog.background) continue;
        if (row[c] > best) {
          best = row[c];
          label = c;
        }
      }
      seg.labels[i] = label;
    }
  });
  return seg;
}

}  // namespace enstrect
