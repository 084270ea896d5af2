#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "enstrect/clustering.hpp"
#include "enstrect/metrics.hpp"
#include "enstrect/polygon.hpp"
#include "enstrect/skeleton.hpp"

namespace enstrect {

// Stage options. Every field is addressable from JSON / TOML config files
// and from CLI flags; merge precedence is defaults < scene bundle params <
// config file < explicit flags.

struct MapStageOptions {
  std::string scene;      // bundle dir or scene.json; overrides the three paths
  std::string cloud;
  std::string cameras;
  std::string heatmaps;
  std::string out = "segmented.ply";
  std::vector<std::string> classes;  // empty -> bundle catalog or standard
  int background_index = 0;
  int normals_k = 16;
  bool occlusion = true;
  double splat_radius_px = 2.0;
  double depth_tol_rel = 0.01;
  bool count_all_visible = false;
  bool ascii_ply = false;
  int threads = 1;
};

struct ClusterStageOptions {
  std::string segmented = "segmented.ply";
  std::string out = "clusters.json";
  double crack_eps = 0.0;  // 0 -> auto from sampling density
  int crack_min_pts = 5;
  double areal_eps = 0.0;
  int areal_min_pts = 10;
  double eps_auto_factor = 4.0;
};

struct ExtractStageOptions {
  std::string segmented = "segmented.ply";
  std::string clusters = "clusters.json";
  std::string out = "instances.json";
  std::string obj_out;      // empty -> alongside `out` with .obj extension
  // medial axis
  int contraction_k = 8;
  double w_l0 = 1.0;
  double w_h0 = 1.0;
  double s_l = 3.0;
  int max_iterations = 20;
  double convergence_ratio = 0.01;
  int downsample_max_vertices = 500;
  double downsample_min_spacing_factor = 2.0;
  double simplify_tolerance = 0.001;
  int mst_complete_threshold = 2000;
  // polygons
  double alpha = 100.0;
  double planarity_threshold = 0.95;
  bool joint_normalization = false;
};

struct EvaluateStageOptions {
  std::string predictions = "instances.json";
  std::string annotations;
  std::string report_json = "report.json";
  std::string report_txt = "report.txt";
  std::vector<double> tolerances{0.01, 0.02, 0.04, 0.06, 0.08};
  double resample_spacing = 0.005;  // 0 disables (strict raw-vertex parity)
  std::vector<std::string> classes;  // empty -> standard catalog
};

struct PipelineStageOptions {
  std::string scene;
  std::string out_dir = "out";
  std::string annotations;  // optional; triggers evaluate
  MapStageOptions map;
  ClusterStageOptions cluster;
  ExtractStageOptions extract;
  EvaluateStageOptions evaluate;
  std::uint64_t seed = 0;
};

struct SynthStageOptions {
  std::string out_dir = "scene";
  std::string spec_json;   // path to a generator spec; empty -> built-in default
  std::uint64_t seed = 0;
  double noise = -1.0;     // >= 0 overrides the spec
};

// JSON (de)serialization used by the config file, the scene bundle params
// block, and the C API. Unknown keys are rejected.
void options_from_json(MapStageOptions& o, const nlohmann::json& j);
void options_from_json(ClusterStageOptions& o, const nlohmann::json& j);
void options_from_json(ExtractStageOptions& o, const nlohmann::json& j);
void options_from_json(EvaluateStageOptions& o, const nlohmann::json& j);
void options_from_json(PipelineStageOptions& o, const nlohmann::json& j);
void options_from_json(SynthStageOptions& o, const nlohmann::json& j);
nlohmann::json options_to_json(const PipelineStageOptions& o);

// Loads a config file; `.json` documents are parsed as-is, anything else is
// parsed as TOML (flat `key = value` pairs under `[stage]` sections).
nlohmann::json load_config_file(const std::string& path);

// Builds final stage options from a JSON patch (typically explicit CLI
// flags). Precedence: defaults < scene bundle params < config file (the
// patch's "config" key names it) < the patch itself.
MapStageOptions resolve_map_options(const nlohmann::json& patch);
ClusterStageOptions resolve_cluster_options(const nlohmann::json& patch);
ExtractStageOptions resolve_extract_options(const nlohmann::json& patch);
EvaluateStageOptions resolve_evaluate_options(const nlohmann::json& patch);
PipelineStageOptions resolve_pipeline_options(const nlohmann::json& patch);
SynthStageOptions resolve_synth_options(const nlohmann::json& patch);

// Stage runners; throw ValidationError / ProcessingError.
void run_map(const MapStageOptions& opts);
void run_cluster(const ClusterStageOptions& opts);
void run_extract(const ExtractStageOptions& opts);
std::string run_evaluate(const EvaluateStageOptions& opts);  // returns the text report
std::string run_pipeline(const PipelineStageOptions& opts);  // report text or ""
void run_synth(const SynthStageOptions& opts);

}  // namespace enstrect
