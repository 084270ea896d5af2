#include "enstrect/synthetic.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "enstrect/error.hpp"
#include "enstrect/png_io.hpp"
#include "enstrect/ply_io.hpp"
#include "enstrect/scene_io.hpp"

namespace enstrect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double segment_distance_2d(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double polyline_distance_2d(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i)
    best = std::min(best, segment_distance_2d(p, line[i], line[i + 1]));
  return best;
}

bool point_in_polygon_2d(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(mix(a) ^ b) ^ c);
}

}  // namespace

void SynthSpec::validate() const {
  if (!(wall_width > 0.0) || !(wall_height > 0.0) || !(spacing > 0.0))
    throw ValidationError("synth: wall dimensions and spacing must be positive");
  const double points = (wall_width / spacing + 1) * (wall_height / spacing + 1);
  if (points > 5e7) throw ValidationError("synth: spacing yields more than 5e7 points");
  if (cameras.count < 1) throw ValidationError("synth: need at least one camera");
  if (cameras.image_width <= 0 || cameras.image_height <= 0 || !(cameras.fx > 0) ||
      !(cameras.fy > 0) || !(cameras.standoff > 0))
    throw ValidationError("synth: malformed camera ring parameters");
  if (noise < 0.0) throw ValidationError("synth: noise must be >= 0");
  if (png_bit_depth != 8 && png_bit_depth != 16)
    throw ValidationError("synth: png_bit_depth must be 8 or 16");
  const ClassCatalog catalog = ClassCatalog::standard();
  for (const auto& patch : patches) {
    if (catalog.index_of(patch.class_name) < 0)
      throw ValidationError("synth: unknown patch class '" + patch.class_name + "'");
    if (patch.polygon.size() < 3)
      throw ValidationError("synth: patch polygon needs at least 3 vertices");
  }
  for (const auto& crack : cracks) {
    if (!(crack.width > 0.0)) throw ValidationError("synth: crack width must be positive");
    if (crack.branches.empty()) throw ValidationError("synth: crack without branches");
    for (const auto& b : crack.branches)
      if (b.size() < 2) throw ValidationError("synth: crack branch needs at least 2 vertices");
  }
}

SynthScene generate_synthetic_scene(const SynthSpec& spec) {
  spec.validate();
  SynthScene scene;
  scene.catalog = ClassCatalog::standard();
  const int crack_cls = scene.catalog.index_of("crack");

  const double half_w = 0.5 * spec.wall_width;
  auto surface_z = [&](double x) {
    if (spec.curvature == 0.0) return 0.0;
    return -spec.curvature * std::sin(M_PI * x / spec.wall_width);
  };
  auto surface_normal = [&](double x) {
    if (spec.curvature == 0.0) return Eigen::Vector3d(0, 0, -1);
    const double dz = -spec.curvature * M_PI / spec.wall_width *
                      std::cos(M_PI * x / spec.wall_width);
    return Eigen::Vector3d(dz, 0.0, -1.0).normalized();
  };

  // Wall sample grid.
  const int nx = static_cast<int>(std::floor(spec.wall_width / spec.spacing)) + 1;
  const int ny = static_cast<int>(std::floor(spec.wall_height / spec.spacing)) + 1;
  std::mt19937_64 rng(mix_seed(spec.seed, 0xc10d, 0));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  scene.cloud.positions.reserve(static_cast<std::size_t>(nx) * ny);
  scene.cloud.normals.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double x = ix * spec.spacing;
      double y = iy * spec.spacing;
      if (spec.jitter > 0.0) {
        x = std::clamp(x + uni(rng) * spec.jitter * spec.spacing, 0.0, spec.wall_width);
        y = std::clamp(y + uni(rng) * spec.jitter * spec.spacing, 0.0, spec.wall_height);
      }
      scene.cloud.positions.emplace_back(x, y, surface_z(x));
      scene.cloud.normals.push_back(surface_normal(x));
    }
  }

  // Camera ring in front of the wall, all aimed at the wall center.
  const Eigen::Vector3d target(half_w, 0.5 * spec.wall_height,
                               surface_z(half_w));
  for (int k = 0; k < spec.cameras.count; ++k) {
    const double phi = 2.0 * M_PI * k / spec.cameras.count;
    CameraView v;
    v.name = "cam" + std::to_string(k);
    v.heatmap_prefix = v.name;
    v.width = spec.cameras.image_width;
    v.height = spec.cameras.image_height;
    v.fx = spec.cameras.fx;
    v.fy = spec.cameras.fy;
    v.cx = 0.5 * v.width;
    v.cy = 0.5 * v.height;
    const Eigen::Vector3d center(target.x() + spec.cameras.ring_radius * std::cos(phi),
                                 target.y() + spec.cameras.ring_radius * std::sin(phi),
                                 -spec.cameras.standoff);
    const Eigen::Vector3d forward = (target - center).normalized();
    const Eigen::Vector3d up(0, 1, 0);
    const Eigen::Vector3d right = up.cross(forward).normalized();
    const Eigen::Vector3d down = forward.cross(right);
    v.rotation.row(0) = right;
    v.rotation.row(1) = down;
    v.rotation.row(2) = forward;
    v.translation = -(v.rotation * center);
    scene.views.push_back(std::move(v));
  }

  // Class of a wall-plane point: cracks take precedence over patches.
  auto class_at = [&](const Eigen::Vector2d& p) {
    for (const auto& crack : spec.cracks)
      for (const auto& branch : crack.branches)
        if (polyline_distance_2d(p, branch) <= 0.5 * crack.width) return crack_cls;
    for (const auto& patch : spec.patches)
      if (point_in_polygon_2d(p, patch.polygon)) return scene.catalog.index_of(patch.class_name);
    return scene.catalog.background;
  };

  // Ideal per-view heatmaps by per-pixel ray casting against the wall,
  // optionally noise-corrupted, quantized exactly like the PNG round trip.
  const double max_value = spec.png_bit_depth == 16 ? 65535.0 : 255.0;
  for (std::size_t vi = 0; vi < scene.views.size(); ++vi) {
    CameraView& view = scene.views[vi];
    const Eigen::Vector3d origin = view.center();
    const Eigen::Matrix3d r_t = view.rotation.transpose();
    view.heatmaps.assign(scene.catalog.names.size(), Heatmap{});
    for (auto& h : view.heatmaps) {
      h.width = view.width;
      h.height = view.height;
      h.values.assign(static_cast<std::size_t>(view.width) * view.height, 0.0f);
    }
    for (int j = 0; j < view.height; ++j) {
      for (int i = 0; i < view.width; ++i) {
        const Eigen::Vector3d dir =
            r_t * Eigen::Vector3d((i - view.cx) / view.fx, (j - view.cy) / view.fy, 1.0);
        int cls = scene.catalog.background;
        double t = std::numeric_limits<double>::quiet_NaN();
        if (spec.curvature == 0.0) {
          if (dir.z() != 0.0) t = -origin.z() / dir.z();
        } else {
          // Bisection on f(t) = z(t) - surface_z(x(t)).
          double t_lo = 0.0, t_hi = 4.0 * (spec.cameras.standoff + spec.curvature);
          auto f = [&](double s) {
            const Eigen::Vector3d q = origin + s * dir;
            return q.z() - surface_z(std::clamp(q.x(), 0.0, spec.wall_width));
          };
          if (f(t_lo) < 0.0 && f(t_hi) > 0.0) {
            for (int it = 0; it < 60; ++it) {
              const double mid = 0.5 * (t_lo + t_hi);
              (f(mid) < 0.0 ? t_lo : t_hi) = mid;
            }
            t = 0.5 * (t_lo + t_hi);
          }
        }
        if (std::isfinite(t) && t > 0.0) {
          const Eigen::Vector3d q = origin + t * dir;
          if (q.x() >= 0.0 && q.x() <= spec.wall_width && q.y() >= 0.0 &&
              q.y() <= spec.wall_height)
            cls = class_at({q.x(), q.y()});
        }
        const std::size_t pix = static_cast<std::size_t>(j) * view.width + i;
        view.heatmaps[cls].values[pix] = 1.0f;
      }
    }
    if (spec.noise > 0.0) {
      for (std::size_t c = 0; c < view.heatmaps.size(); ++c) {
        std::mt19937_64 noise_rng(mix_seed(spec.seed, vi + 1, c + 1));
        std::normal_distribution<double> gauss(0.0, spec.noise);
        for (auto& val : view.heatmaps[c].values)
          val = static_cast<float>(std::clamp(val + gauss(noise_rng), 0.0, 1.0));
      }
    }
    for (auto& h : view.heatmaps)
      for (auto& val : h.values)
        val = static_cast<float>(std::round(val * max_value) / max_value);
  }

  // Exact ground truth; vertices lifted onto the wall surface.
  auto lift = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector3d(p.x(), p.y(), surface_z(p.x()));
  };
  int next_id = 0;
  for (const auto& crack : spec.cracks) {
    InstanceRecord rec;
    rec.id = next_id++;
    rec.class_name = "crack";
    rec.kind = "medial_axis";
    for (const auto& branch : crack.branches) {
      std::vector<Eigen::Vector3d> line;
      line.reserve(branch.size());
      for (const auto& p : branch) line.push_back(lift(p));
      rec.polylines.push_back(std::move(line));
    }
    scene.annotations.push_back(std::move(rec));
  }
  for (const auto& patch : spec.patches) {
    InstanceRecord rec;
    rec.id = next_id++;
    rec.class_name = patch.class_name;
    rec.kind = "polygon";
    for (const auto& p : patch.polygon) rec.loop.push_back(lift(p));
    scene.annotations.push_back(std::move(rec));
  }

  // Projection markers, computed with standalone arithmetic so the camera
  // manifest can be cross-checked after a write/read cycle.
  const std::vector<Eigen::Vector3d> marker_points = {
      lift({0.25 * spec.wall_width, 0.25 * spec.wall_height}),
      lift({0.75 * spec.wall_width, 0.5 * spec.wall_height}),
      lift({0.5 * spec.wall_width, 0.75 * spec.wall_height}),
  };
  for (std::size_t vi = 0; vi < scene.views.size(); ++vi) {
    const CameraView& view = scene.views[vi];
    for (const auto& w : marker_points) {
      const Eigen::Vector3d pc = view.rotation * w + view.translation;
      if (pc.z() <= 0.0) continue;
      SynthMarker m;
      m.view = static_cast<int>(vi);
      m.world = w;
      m.u = view.fx * pc.x() / pc.z() + view.cx;
      m.v = view.fy * pc.y() / pc.z() + view.cy;
      if (m.u >= 0 && m.u < view.width && m.v >= 0 && m.v < view.height)
        scene.markers.push_back(m);
    }
  }
  return scene;
}

void write_scene_bundle(const SynthScene& scene, const SynthSpec& spec,
                        const std::string& directory) {
  fs::create_directories(fs::path(directory) / "heatmaps");

  write_ply(scene.cloud, (fs::path(directory) / "cloud.ply").string(), true);
  write_cameras(scene.views, (fs::path(directory) / "cameras.json").string());

  const double max_value = spec.png_bit_depth == 16 ? 65535.0 : 255.0;
  for (const auto& view : scene.views) {
    for (std::size_t c = 0; c < scene.catalog.names.size(); ++c) {
      GrayImage img;
      img.width = view.width;
      img.height = view.height;
      img.bit_depth = spec.png_bit_depth;
      img.pixels.resize(view.heatmaps[c].values.size());
      for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<std::uint16_t>(
            std::lround(view.heatmaps[c].values[i] * max_value));
      const std::string file = view.heatmap_prefix + "_" + scene.catalog.names[c] + ".png";
      write_png_gray(img, (fs::path(directory) / "heatmaps" / file).string());
    }
  }

  write_instances_json(scene.annotations, (fs::path(directory) / "annotations.json").string());

  json markers = json::array();
  for (const auto& m : scene.markers)
    markers.push_back({{"view", m.view},
                       {"world", {m.world.x(), m.world.y(), m.world.z()}},
                       {"u", m.u},
                       {"v", m.v}});
  std::ofstream mout((fs::path(directory) / "markers.json").string());
  mout << markers.dump(2) << "\n";

  json manifest;
  manifest["cloud"] = "cloud.ply";
  manifest["cameras"] = "cameras.json";
  manifest["heatmaps"] = "heatmaps";
  manifest["classes"] = scene.catalog.names;
  manifest["background_index"] = scene.catalog.background;
  manifest["annotations"] = "annotations.json";
  manifest["generator"] = spec.to_json();
  std::ofstream sout((fs::path(directory) / "scene.json").string());
  sout << manifest.dump(2) << "\n";
  if (!sout) throw ProcessingError("synth: failed writing scene manifest");
}

SynthSpec SynthSpec::from_json(const json& doc) {
  SynthSpec spec;
  try {
    if (doc.contains("wall")) {
      const auto& w = doc["wall"];
      spec.wall_width = w.value("width", spec.wall_width);
      spec.wall_height = w.value("height", spec.wall_height);
      spec.spacing = w.value("spacing", spec.spacing);
      spec.curvature = w.value("curvature", spec.curvature);
      spec.jitter = w.value("jitter", spec.jitter);
    }
    for (const auto& c : doc.value("cracks", json::array())) {
      SynthCrack crack;
      crack.width = c.value("width", 0.01);
      for (const auto& branch : c.at("branches")) {
        std::vector<Eigen::Vector2d> line;
        for (const auto& p : branch) line.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        crack.branches.push_back(std::move(line));
      }
      spec.cracks.push_back(std::move(crack));
    }
    for (const auto& p : doc.value("patches", json::array())) {
      SynthPatch patch;
      patch.class_name = p.value("class", "spalling");
      for (const auto& v : p.at("polygon"))
        patch.polygon.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      spec.patches.push_back(std::move(patch));
    }
    if (doc.contains("cameras")) {
      const auto& c = doc["cameras"];
      spec.cameras.count = c.value("count", spec.cameras.count);
      spec.cameras.standoff = c.value("standoff", spec.cameras.standoff);
      spec.cameras.ring_radius = c.value("ring_radius", spec.cameras.ring_radius);
      spec.cameras.image_width = c.value("image_width", spec.cameras.image_width);
      spec.cameras.image_height = c.value("image_height", spec.cameras.image_height);
      spec.cameras.fx = c.value("fx", spec.cameras.fx);
      spec.cameras.fy = c.value("fy", spec.cameras.fy);
    }
    spec.noise = doc.value("noise", spec.noise);
    spec.seed = doc.value("seed", spec.seed);
    spec.png_bit_depth = doc.value("png_bit_depth", spec.png_bit_depth);
  } catch (const json::exception& e) {
    throw ValidationError("synth spec: malformed document (" + std::string(e.what()) + ")");
  }
  spec.validate();
  return spec;
}

json SynthSpec::to_json() const {
  json doc;
  doc["wall"] = {{"width", wall_width},
                 {"height", wall_height},
                 {"spacing", spacing},
                 {"curvature", curvature},
                 {"jitter", jitter}};
  json cracks_json = json::array();
  for (const auto& c : cracks) {
    json branches = json::array();
    for (const auto& b : c.branches) {
      json line = json::array();
      for (const auto& p : b) line.push_back({p.x(), p.y()});
      branches.push_back(line);
    }
    cracks_json.push_back({{"width", c.width}, {"branches", branches}});
  }
  doc["cracks"] = cracks_json;
  json patches_json = json::array();
  for (const auto& p : patches) {
    json poly = json::array();
    for (const auto& v : p.polygon) poly.push_back({v.x(), v.y()});
    patches_json.push_back({{"class", p.class_name}, {"polygon", poly}});
  }
  doc["patches"] = patches_json;
  doc["cameras"] = {{"count", cameras.count},
                    {"standoff", cameras.standoff},
                    {"ring_radius", cameras.ring_radius},
                    {"image_width", cameras.image_width},
                    {"image_height", cameras.image_height},
                    {"fx", cameras.fx},
                    {"fy", cameras.fy}};
  doc["noise"] = noise;
  doc["seed"] = seed;
  doc["png_bit_depth"] = png_bit_depth;
  return doc;
}

}  // namespace enstrect
