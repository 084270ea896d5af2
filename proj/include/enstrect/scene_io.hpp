#pragma once

#include <string>
#include <vector>

#include "enstrect/camera.hpp"
#include "enstrect/mapping.hpp"

namespace enstrect {

// Camera manifest: JSON array of objects with name, width, height, fx, fy,
// cx, cy, rotation (9 numbers, row-major world->camera), translation
// (3 numbers), heatmap_prefix. Heatmaps are not attached here.
std::vector<CameraView> read_cameras(const std::string& path);
void write_cameras(const std::vector<CameraView>& views, const std::string& path);

// Attaches one grayscale PNG per class, named <heatmap_prefix>_<class>.png.
void read_heatmaps(CameraView& view, const std::string& directory, const ClassCatalog& catalog);

// Scene bundle manifest: resolved file locations plus optional per-stage
// parameters carried as raw JSON text.
struct SceneBundle {
  std::string cloud_path;
  std::string cameras_path;
  std::string heatmap_dir;
  ClassCatalog catalog;
  std::string params_json;  // "{}" when absent

  static SceneBundle load(const std::string& scene_dir_or_json);
};

}  // namespace enstrect
