#pragma once

#include <Eigen/Core>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "enstrect/camera.hpp"
#include "enstrect/instance_io.hpp"
#include "enstrect/mapping.hpp"

namespace enstrect {

// Damage primitives live in wall coordinates: x in [0, width], y in
// [0, height]; the wall surface is the plane z = 0 (optionally bulged).
struct SynthCrack {
  // One crack instance; a branching crack carries one centerline per branch
  // (branches share their junction vertex).
  std::vector<std::vector<Eigen::Vector2d>> branches;
  double width = 0.01;  // meters
};

struct SynthPatch {
  std::string class_name = "spalling";
  std::vector<Eigen::Vector2d> polygon;   // CCW loop
};

struct SynthCameraRing {
  int count = 12;
  double standoff = 2.0;      // meters in front of the wall
  double ring_radius = 0.5;   // meters around the wall center
  int image_width = 800;
  int image_height = 600;
  double fx = 520.0, fy = 520.0;
};

struct SynthSpec {
  double wall_width = 2.0;
  double wall_height = 1.0;
  double spacing = 0.002;     // point grid step, meters
  double curvature = 0.0;     // sagitta of a cylindrical bulge, meters
  double jitter = 0.0;        // in-plane position noise, fraction of spacing
  std::vector<SynthCrack> cracks;
  std::vector<SynthPatch> patches;
  SynthCameraRing cameras;
  double noise = 0.0;         // heatmap Gaussian noise sigma, probability units
  std::uint64_t seed = 0;
  int png_bit_depth = 16;

  void validate() const;
  static SynthSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// A marker ties a known world point to its generator-recorded pixel in one
// view; read_cameras consumers use these as a projection oracle.
struct SynthMarker {
  int view = 0;
  Eigen::Vector3d world;
  double u = 0, v = 0;
};

struct SynthScene {
  PointCloud cloud;
  std::vector<CameraView> views;  // heatmaps attached
  ClassCatalog catalog;
  std::vector<InstanceRecord> annotations;
  std::vector<SynthMarker> markers;
};

SynthScene generate_synthetic_scene(const SynthSpec& spec);

// Writes cloud.ply, cameras.json, heatmaps/, annotations.json, markers.json
// and the scene.json manifest into `directory`.
void write_scene_bundle(const SynthScene& scene, const SynthSpec& spec,
                        const std::string& directory);

}  // namespace enstrect
