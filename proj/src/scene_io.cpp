#include "enstrect/scene_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "enstrect/error.hpp"
#include "enstrect/png_io.hpp"

namespace enstrect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace

std::vector<CameraView> read_cameras(const std::string& path) {
  const json doc = load_json_file(path);
  if (!doc.is_array()) throw ValidationError("cameras '" + path + "': expected a JSON array");

  std::vector<CameraView> views;
  views.reserve(doc.size());
  for (const auto& item : doc) {
    CameraView v;
    try {
      v.name = item.at("name").get<std::string>();
      v.width = item.at("width").get<int>();
      v.height = item.at("height").get<int>();
      v.fx = item.at("fx").get<double>();
      v.fy = item.at("fy").get<double>();
      v.cx = item.at("cx").get<double>();
      v.cy = item.at("cy").get<double>();
      const auto rot = item.at("rotation").get<std::vector<double>>();
      const auto tr = item.at("translation").get<std::vector<double>>();
      if (rot.size() != 9) throw ValidationError("rotation must hold 9 numbers");
      if (tr.size() != 3) throw ValidationError("translation must hold 3 numbers");
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) v.rotation(r, c) = rot[r * 3 + c];
      v.translation = {tr[0], tr[1], tr[2]};
      v.heatmap_prefix = item.value("heatmap_prefix", v.name);
    } catch (const json::exception& e) {
      throw ValidationError("cameras '" + path + "': missing or malformed field (" +
                            std::string(e.what()) + ")");
    }
    v.validate();
    views.push_back(std::move(v));
  }
  return views;
}

void write_cameras(const std::vector<CameraView>& views, const std::string& path) {
  json doc = json::array();
  for (const auto& v : views) {
    json item;
    item["name"] = v.name;
    item["width"] = v.width;
    item["height"] = v.height;
    item["fx"] = v.fx;
    item["fy"] = v.fy;
    item["cx"] = v.cx;
    item["cy"] = v.cy;
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot[r * 3 + c] = v.rotation(r, c);
    item["rotation"] = rot;
    item["translation"] = std::vector<double>{v.translation.x(), v.translation.y(),
                                              v.translation.z()};
    item["heatmap_prefix"] = v.heatmap_prefix;
    doc.push_back(item);
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

void read_heatmaps(CameraView& view, const std::string& directory, const ClassCatalog& catalog) {
  catalog.validate();
  view.heatmaps.clear();
  view.heatmaps.reserve(catalog.names.size());
  for (const auto& cls : catalog.names) {
    const fs::path file = fs::path(directory) / (view.heatmap_prefix + "_" + cls + ".png");
    if (!fs::exists(file))
      throw ValidationError("heatmap raster missing for class '" + cls + "': " + file.string());
    const GrayImage img = read_png_gray(file.string());
    if (img.width != view.width || img.height != view.height)
      throw ValidationError("heatmap '" + file.string() + "' dimensions " +
                            std::to_string(img.width) + "x" + std::to_string(img.height) +
                            " do not match view " + std::to_string(view.width) + "x" +
                            std::to_string(view.height));
    Heatmap map;
    map.width = img.width;
    map.height = img.height;
    map.values.resize(img.pixels.size());
    const double scale = 1.0 / img.max_value();
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      map.values[i] = static_cast<float>(img.pixels[i] * scale);
    view.heatmaps.push_back(std::move(map));
  }
  view.validate();
}

SceneBundle SceneBundle::load(const std::string& scene_dir_or_json) {
  fs::path manifest(scene_dir_or_json);
  if (fs::is_directory(manifest)) manifest /= "scene.json";
  if (!fs::exists(manifest))
    throw ValidationError("scene manifest not found: " + manifest.string());
  const json doc = load_json_file(manifest.string());
  const fs::path base = manifest.parent_path();

  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (base / path).string();
  };

  SceneBundle bundle;
  try {
    bundle.cloud_path = resolve(doc.at("cloud").get<std::string>());
    bundle.cameras_path = resolve(doc.at("cameras").get<std::string>());
    bundle.heatmap_dir = resolve(doc.at("heatmaps").get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError("scene manifest '" + manifest.string() +
                          "': missing field (" + std::string(e.what()) + ")");
  }
  if (doc.contains("classes")) {
    bundle.catalog.names = doc.at("classes").get<std::vector<std::string>>();
    bundle.catalog.background = doc.value("background_index", 0);
  } else {
    bundle.catalog = ClassCatalog::standard();
  }
  bundle.catalog.validate();
  bundle.params_json = doc.contains("params") ? doc.at("params").dump() : "{}";

  for (const auto& p : {bundle.cloud_path, bundle.cameras_path, bundle.heatmap_dir})
    if (!fs::exists(p)) throw ValidationError("scene bundle references missing path: " + p);
  return bundle;
}

}  // namespace enstrect
