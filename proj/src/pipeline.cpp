#include "enstrect/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enstrect/error.hpp"
#include "enstrect/instance_io.hpp"
#include "enstrect/ply_io.hpp"
#include "enstrect/scene_io.hpp"
#include "enstrect/synthetic.hpp"

namespace enstrect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- option plumbing ------------------------------------------------------

class OptionReader {
 public:
  OptionReader(const json& j, const std::string& context) : j_(j), context_(context) {
    if (!j.is_object())
      throw ValidationError(context + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    known_.push_back(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(context_ + ": malformed value for '" + std::string(key) + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* section(const char* key) {
    known_.push_back(key);
    if (!j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (std::find(known_.begin(), known_.end(), key) == known_.end())
        throw ValidationError(context_ + ": unknown option '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string context_;
  std::vector<std::string> known_;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

json parse_toml_scalar(const std::string& raw, const std::string& context) {
  const std::string v = trim(raw);
  if (v.empty()) throw ValidationError(context + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ValidationError(context + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    std::size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos) {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return i;
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError(context + ": cannot parse value '" + v + "'");
}

}  // namespace

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path);

  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("config '" + path + "': invalid JSON: " + e.what());
    }
  }

  // TOML subset: [section] headers, key = value, arrays of scalars, comments.
  json doc = json::object();
  json* scope = &doc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string context = path + ":" + std::to_string(lineno);
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(context + ": malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ValidationError(context + ": empty section name");
      scope = &doc[name];
      if (scope->is_null()) *scope = json::object();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(context + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError(context + ": empty key");
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') throw ValidationError(context + ": unterminated array");
      json arr = json::array();
      std::string body = value.substr(1, value.size() - 2);
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        arr.push_back(parse_toml_scalar(item, context));
      }
      (*scope)[key] = arr;
    } else {
      (*scope)[key] = parse_toml_scalar(value, context);
    }
  }
  return doc;
}

void options_from_json(MapStageOptions& o, const json& j) {
  OptionReader r(j, "map options");
  r.get("scene", o.scene);
  r.get("cloud", o.cloud);
  r.get("cameras", o.cameras);
  r.get("heatmaps", o.heatmaps);
  r.get("out", o.out);
  r.get("classes", o.classes);
  r.get("background_index", o.background_index);
  r.get("normals_k", o.normals_k);
  r.get("occlusion", o.occlusion);
  r.get("splat_radius_px", o.splat_radius_px);
  r.get("depth_tol_rel", o.depth_tol_rel);
  r.get("count_all_visible", o.count_all_visible);
  r.get("ascii_ply", o.ascii_ply);
  r.get("threads", o.threads);
  r.finish();
}

void options_from_json(ClusterStageOptions& o, const json& j) {
  OptionReader r(j, "cluster options");
  r.get("segmented", o.segmented);
  r.get("out", o.out);
  r.get("crack_eps", o.crack_eps);
  r.get("crack_min_pts", o.crack_min_pts);
  r.get("areal_eps", o.areal_eps);
  r.get("areal_min_pts", o.areal_min_pts);
  r.get("eps_auto_factor", o.eps_auto_factor);
  r.finish();
}

void options_from_json(ExtractStageOptions& o, const json& j) {
  OptionReader r(j, "extract options");
  r.get("segmented", o.segmented);
  r.get("clusters", o.clusters);
  r.get("out", o.out);
  r.get("obj_out", o.obj_out);
  r.get("contraction_k", o.contraction_k);
  r.get("w_l0", o.w_l0);
  r.get("w_h0", o.w_h0);
  r.get("s_l", o.s_l);
  r.get("max_iterations", o.max_iterations);
  r.get("convergence_ratio", o.convergence_ratio);
  r.get("downsample_max_vertices", o.downsample_max_vertices);
  r.get("downsample_min_spacing_factor", o.downsample_min_spacing_factor);
  r.get("simplify_tolerance", o.simplify_tolerance);
  r.get("mst_complete_threshold", o.mst_complete_threshold);
  r.get("alpha", o.alpha);
  r.get("planarity_threshold", o.planarity_threshold);
  r.get("joint_normalization", o.joint_normalization);
  r.finish();
}

void options_from_json(EvaluateStageOptions& o, const json& j) {
  OptionReader r(j, "evaluate options");
  r.get("predictions", o.predictions);
  r.get("annotations", o.annotations);
  r.get("report_json", o.report_json);
  r.get("report_txt", o.report_txt);
  r.get("tolerances", o.tolerances);
  r.get("resample_spacing", o.resample_spacing);
  r.get("classes", o.classes);
  r.finish();
}

void options_from_json(PipelineStageOptions& o, const json& j) {
  OptionReader r(j, "pipeline options");
  r.get("scene", o.scene);
  r.get("out_dir", o.out_dir);
  r.get("annotations", o.annotations);
  r.get("seed", o.seed);
  if (const json* s = r.section("map")) options_from_json(o.map, *s);
  if (const json* s = r.section("cluster")) options_from_json(o.cluster, *s);
  if (const json* s = r.section("extract")) options_from_json(o.extract, *s);
  if (const json* s = r.section("evaluate")) options_from_json(o.evaluate, *s);
  r.finish();
}

void options_from_json(SynthStageOptions& o, const json& j) {
  OptionReader r(j, "synth options");
  r.get("out_dir", o.out_dir);
  r.get("spec_json", o.spec_json);
  r.get("seed", o.seed);
  r.get("noise", o.noise);
  r.finish();
}

json options_to_json(const PipelineStageOptions& o) {
  json j;
  j["scene"] = o.scene;
  j["out_dir"] = o.out_dir;
  j["annotations"] = o.annotations;
  j["seed"] = o.seed;
  j["map"] = {{"normals_k", o.map.normals_k},
              {"occlusion", o.map.occlusion},
              {"splat_radius_px", o.map.splat_radius_px},
              {"depth_tol_rel", o.map.depth_tol_rel},
              {"count_all_visible", o.map.count_all_visible},
              {"threads", o.map.threads}};
  j["cluster"] = {{"crack_eps", o.cluster.crack_eps},
                  {"crack_min_pts", o.cluster.crack_min_pts},
                  {"areal_eps", o.cluster.areal_eps},
                  {"areal_min_pts", o.cluster.areal_min_pts},
                  {"eps_auto_factor", o.cluster.eps_auto_factor}};
  j["extract"] = {{"contraction_k", o.extract.contraction_k},
                  {"w_l0", o.extract.w_l0},
                  {"w_h0", o.extract.w_h0},
                  {"s_l", o.extract.s_l},
                  {"max_iterations", o.extract.max_iterations},
                  {"convergence_ratio", o.extract.convergence_ratio},
                  {"downsample_max_vertices", o.extract.downsample_max_vertices},
                  {"downsample_min_spacing_factor", o.extract.downsample_min_spacing_factor},
                  {"simplify_tolerance", o.extract.simplify_tolerance},
                  {"mst_complete_threshold", o.extract.mst_complete_threshold},
                  {"alpha", o.extract.alpha},
                  {"planarity_threshold", o.extract.planarity_threshold},
                  {"joint_normalization", o.extract.joint_normalization}};
  j["evaluate"] = {{"tolerances", o.evaluate.tolerances},
                   {"resample_spacing", o.evaluate.resample_spacing}};
  return j;
}

// --- option resolution ----------------------------------------------------

namespace {

// Splits off the "config" key and returns the parsed config document.
json split_config(json& patch) {
  json config = json::object();
  if (patch.is_object() && patch.contains("config")) {
    config = load_config_file(patch.at("config").get<std::string>());
    patch.erase("config");
  }
  return config;
}

std::string scene_params_json(const std::string& scene_path) {
  if (scene_path.empty()) return "{}";
  return SceneBundle::load(scene_path).params_json;
}

template <typename Options>
Options resolve_stage(const json& raw_patch, const char* section) {
  json patch = raw_patch.is_null() ? json::object() : raw_patch;
  const json config = split_config(patch);
  Options opts;
  const std::string scene =
      patch.value("scene", config.value("scene", std::string()));
  if (!scene.empty()) {
    const json params = json::parse(scene_params_json(scene));
    if (params.contains(section)) options_from_json(opts, params.at(section));
  }
  if (config.contains(section)) options_from_json(opts, config.at(section));
  options_from_json(opts, patch);
  return opts;
}

}  // namespace

MapStageOptions resolve_map_options(const json& patch) {
  return resolve_stage<MapStageOptions>(patch, "map");
}

ClusterStageOptions resolve_cluster_options(const json& raw_patch) {
  json patch = raw_patch.is_null() ? json::object() : raw_patch;
  const json config = split_config(patch);
  ClusterStageOptions opts;
  if (config.contains("cluster")) options_from_json(opts, config.at("cluster"));
  options_from_json(opts, patch);
  return opts;
}

ExtractStageOptions resolve_extract_options(const json& raw_patch) {
  json patch = raw_patch.is_null() ? json::object() : raw_patch;
  const json config = split_config(patch);
  ExtractStageOptions opts;
  if (config.contains("extract")) options_from_json(opts, config.at("extract"));
  options_from_json(opts, patch);
  return opts;
}

EvaluateStageOptions resolve_evaluate_options(const json& raw_patch) {
  json patch = raw_patch.is_null() ? json::object() : raw_patch;
  const json config = split_config(patch);
  EvaluateStageOptions opts;
  if (config.contains("evaluate")) options_from_json(opts, config.at("evaluate"));
  options_from_json(opts, patch);
  return opts;
}

PipelineStageOptions resolve_pipeline_options(const json& raw_patch) {
  json patch = raw_patch.is_null() ? json::object() : raw_patch;
  const json config = split_config(patch);
  PipelineStageOptions opts;
  const std::string scene =
      patch.value("scene", config.value("scene", std::string()));
  if (!scene.empty()) {
    const json params = json::parse(scene_params_json(scene));
    if (!params.empty()) options_from_json(opts, params);
  }
  if (!config.empty()) options_from_json(opts, config);
  options_from_json(opts, patch);
  return opts;
}

SynthStageOptions resolve_synth_options(const json& raw_patch) {
  json patch = raw_patch.is_null() ? json::object() : raw_patch;
  const json config = split_config(patch);
  SynthStageOptions opts;
  if (config.contains("synth")) options_from_json(opts, config.at("synth"));
  options_from_json(opts, patch);
  return opts;
}

// --- stage runners --------------------------------------------------------

void run_map(const MapStageOptions& opts) {
  MapStageOptions o = opts;
  ClassCatalog catalog = ClassCatalog::standard();
  if (!o.scene.empty()) {
    const SceneBundle bundle = SceneBundle::load(o.scene);
    if (o.cloud.empty()) o.cloud = bundle.cloud_path;
    if (o.cameras.empty()) o.cameras = bundle.cameras_path;
    if (o.heatmaps.empty()) o.heatmaps = bundle.heatmap_dir;
    catalog = bundle.catalog;
  }
  if (o.cloud.empty() || o.cameras.empty() || o.heatmaps.empty())
    throw ValidationError("map: cloud, cameras and heatmaps paths are required");
  if (!o.classes.empty()) {
    catalog.names = o.classes;
    catalog.background = o.background_index;
  }
  catalog.validate();

  PointCloud cloud = read_ply(o.cloud);
  if (cloud.size() == 0) throw ValidationError("map: point cloud is empty");
  std::vector<CameraView> views = read_cameras(o.cameras);
  if (views.empty()) throw ValidationError("map: camera manifest holds no views");
  for (auto& view : views) read_heatmaps(view, o.heatmaps, catalog);

  if (!cloud.has_normals()) {
    Eigen::Vector3d reference = Eigen::Vector3d::Zero();
    for (const auto& v : views) reference += v.center();
    reference /= static_cast<double>(views.size());
    NormalEstimationOptions nopts;
    nopts.k = o.normals_k;
    nopts.reference_viewpoint = reference;
    cloud = estimate_normals(cloud, nopts);
  }

  FuseOptions fopts;
  fopts.visibility.occlusion = o.occlusion;
  fopts.visibility.splat_radius_px = o.splat_radius_px;
  fopts.visibility.depth_tol_rel = o.depth_tol_rel;
  fopts.count_all_visible_views = o.count_all_visible;
  fopts.threads = std::max(1, o.threads);
  const SegmentedCloud seg = fuse(cloud, views, catalog, fopts);
  write_segmented_ply(seg, o.out, !o.ascii_ply);
}

void run_cluster(const ClusterStageOptions& opts) {
  const SegmentedCloud seg = read_segmented_ply(opts.segmented);

  InstanceSplitOptions sopts;
  sopts.crack_defaults = {opts.crack_eps, opts.crack_min_pts, opts.eps_auto_factor};
  sopts.areal_defaults = {opts.areal_eps, opts.areal_min_pts, opts.eps_auto_factor};
  const auto instances = split_instances(seg, sopts);

  json doc;
  doc["schema_version"] = 1;
  doc["classes"] = seg.catalog.names;
  json arr = json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    json item;
    item["id"] = static_cast<int>(i);
    item["class"] = seg.catalog.names[instances[i].class_index];
    item["point_indices"] = instances[i].point_indices;
    arr.push_back(std::move(item));
  }
  doc["instances"] = arr;
  std::ofstream out(opts.out);
  if (!out) throw ValidationError("cluster: cannot open '" + opts.out + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw ProcessingError("cluster: write failed");
}

void run_extract(const ExtractStageOptions& opts) {
  const SegmentedCloud seg = read_segmented_ply(opts.segmented);

  std::ifstream in(opts.clusters);
  if (!in) throw ValidationError("extract: cannot open '" + opts.clusters + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("extract: clusters file is not valid JSON: " + std::string(e.what()));
  }
  if (doc.value("schema_version", -1) != 1)
    throw ValidationError("extract: unsupported clusters schema_version");

  MedialAxisParams axis_params;
  axis_params.contraction.k = opts.contraction_k;
  axis_params.contraction.w_l0 = opts.w_l0;
  axis_params.contraction.w_h0 = opts.w_h0;
  axis_params.contraction.s_l = opts.s_l;
  axis_params.contraction.max_iterations = opts.max_iterations;
  axis_params.contraction.convergence_ratio = opts.convergence_ratio;
  axis_params.downsample_max_vertices = opts.downsample_max_vertices;
  axis_params.downsample_min_spacing_factor = opts.downsample_min_spacing_factor;
  axis_params.simplify_tolerance = opts.simplify_tolerance;
  axis_params.mst.complete_threshold = opts.mst_complete_threshold;

  PolygonParams poly_params;
  poly_params.alpha = opts.alpha;
  poly_params.pca.planarity_threshold = opts.planarity_threshold;
  poly_params.pca.joint_normalization = opts.joint_normalization;

  json provenance;
  provenance["stage"] = "extract";
  provenance["params"] = {{"contraction_k", opts.contraction_k},
                          {"w_l0", opts.w_l0},
                          {"w_h0", opts.w_h0},
                          {"s_l", opts.s_l},
                          {"max_iterations", opts.max_iterations},
                          {"convergence_ratio", opts.convergence_ratio},
                          {"downsample_max_vertices", opts.downsample_max_vertices},
                          {"downsample_min_spacing_factor", opts.downsample_min_spacing_factor},
                          {"simplify_tolerance", opts.simplify_tolerance},
                          {"alpha", opts.alpha},
                          {"planarity_threshold", opts.planarity_threshold}};

  std::vector<InstanceRecord> records;
  for (const auto& item : doc.value("instances", json::array())) {
    InstanceCloud inst;
    const std::string class_name = item.at("class").get<std::string>();
    inst.class_index = seg.catalog.index_of(class_name);
    if (inst.class_index < 0)
      throw ValidationError("extract: cluster class '" + class_name +
                            "' is not in the segmented catalog");
    for (const auto& idx : item.at("point_indices")) {
      const int i = idx.get<int>();
      if (i < 0 || i >= static_cast<int>(seg.cloud.size()))
        throw ValidationError("extract: cluster point index out of range");
      inst.point_indices.push_back(i);
      inst.positions.push_back(seg.cloud.positions[i]);
      if (seg.cloud.has_normals()) inst.normals.push_back(seg.cloud.normals[i]);
    }
    if (inst.point_indices.empty()) continue;

    double confidence = 0.0;
    for (int i : inst.point_indices) confidence += seg.score(i, inst.class_index);
    confidence /= static_cast<double>(inst.point_indices.size());

    InstanceRecord rec;
    rec.id = item.at("id").get<int>();
    rec.class_name = class_name;
    rec.confidence = confidence;
    rec.provenance = provenance;
    if (class_name == "crack") {
      rec.kind = "medial_axis";
      const MedialAxis axis = extract_medial_axis(inst, axis_params);
      for (const auto& line : axis.polylines) rec.polylines.push_back(line.vertices);
    } else {
      rec.kind = "polygon";
      const BoundingPolygon25D poly = extract_polygon(inst, poly_params);
      rec.loop = poly.vertices;
      rec.aux_loops = poly.aux_loops;
      rec.planar = poly.planar;
      rec.alpha = poly.alpha;
    }
    records.push_back(std::move(rec));
  }

  write_instances_json(records, opts.out);
  std::string obj = opts.obj_out;
  if (obj.empty()) {
    obj = opts.out;
    const auto dot = obj.find_last_of('.');
    obj = (dot == std::string::npos ? obj : obj.substr(0, dot)) + ".obj";
  }
  write_instances_obj(records, obj);
}

std::string run_evaluate(const EvaluateStageOptions& opts) {
  if (opts.annotations.empty())
    throw ValidationError("evaluate: annotations path is required");
  const auto pred_records = read_instances_json(opts.predictions);
  const auto truth_records = read_instances_json(opts.annotations);
  const std::vector<std::string> classes =
      opts.classes.empty() ? ClassCatalog::standard().names : opts.classes;
  if (opts.tolerances.empty())
    throw ValidationError("evaluate: tolerance grid is empty");
  for (double t : opts.tolerances)
    if (!(t > 0.0)) throw ValidationError("evaluate: tolerances must be positive");

  const auto predictions = to_eval_instances(pred_records, classes);
  const auto truth = to_eval_instances(truth_records, classes);
  const MetricsReport report =
      evaluate_metrics(truth, predictions, classes, opts.tolerances, opts.resample_spacing);

  json j;
  j["tolerances_m"] = report.tolerances;
  j["resample_spacing_m"] = report.resample_spacing;
  json per_class = json::object();
  for (const auto& [name, m] : report.per_class) {
    json cm;
    cm["truth_instances"] = m.truth_instances;
    cm["predicted_instances"] = m.predicted_instances;
    json by_tau = json::object();
    for (const double tau : report.tolerances) {
      char key[32];
      std::snprintf(key, sizeof key, "%g", tau);
      const auto& counts = m.counts.at(tau);
      by_tau[key] = {{"iou", m.iou.at(tau)},
                     {"ap50", m.ap.at(tau)},
                     {"tp", counts.tp},
                     {"fn", counts.fn},
                     {"fp", counts.fp}};
    }
    cm["by_tolerance"] = by_tau;
    per_class[name] = cm;
  }
  j["per_class"] = per_class;

  if (!opts.report_json.empty()) {
    std::ofstream out(opts.report_json);
    if (!out) throw ValidationError("evaluate: cannot open '" + opts.report_json + "'");
    out << j.dump(2) << "\n";
  }
  const std::string text = report_text(report);
  if (!opts.report_txt.empty()) {
    std::ofstream out(opts.report_txt);
    if (!out) throw ValidationError("evaluate: cannot open '" + opts.report_txt + "'");
    out << text;
  }
  return text;
}

std::string run_pipeline(const PipelineStageOptions& opts) {
  if (opts.scene.empty()) throw ValidationError("pipeline: scene bundle path is required");
  fs::create_directories(opts.out_dir);
  const fs::path out(opts.out_dir);

  MapStageOptions map = opts.map;
  map.scene = opts.scene;
  map.out = (out / "segmented.ply").string();
  run_map(map);

  ClusterStageOptions cluster = opts.cluster;
  cluster.segmented = map.out;
  cluster.out = (out / "clusters.json").string();
  run_cluster(cluster);

  ExtractStageOptions extract = opts.extract;
  extract.segmented = map.out;
  extract.clusters = cluster.out;
  extract.out = (out / "instances.json").string();
  extract.obj_out = (out / "instances.obj").string();
  run_extract(extract);

  std::string annotations = opts.annotations;
  if (annotations.empty()) {
    // A bundle may carry its own ground truth (the synthetic generator does).
    fs::path manifest(opts.scene);
    if (fs::is_directory(manifest)) manifest /= "scene.json";
    std::ifstream in(manifest);
    if (in) {
      try {
        const json doc = json::parse(in);
        if (doc.contains("annotations")) {
          const fs::path p = doc.at("annotations").get<std::string>();
          annotations =
              p.is_absolute() ? p.string() : (manifest.parent_path() / p).string();
        }
      } catch (const json::parse_error&) {
      }
    }
  }
  if (annotations.empty()) return "";

  EvaluateStageOptions evaluate = opts.evaluate;
  evaluate.predictions = extract.out;
  evaluate.annotations = annotations;
  evaluate.report_json = (out / "report.json").string();
  evaluate.report_txt = (out / "report.txt").string();
  return run_evaluate(evaluate);
}

void run_synth(const SynthStageOptions& opts) {
  SynthSpec spec;
  if (!opts.spec_json.empty()) {
    std::ifstream in(opts.spec_json);
    if (!in) throw ValidationError("synth: spec file not found: " + opts.spec_json);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("synth: spec is not valid JSON: " + std::string(e.what()));
    }
    spec = SynthSpec::from_json(doc);
  } else {
    // Demo wall: one straight crack, one forking crack, two patches.
    spec.cracks.push_back({{{{0.2, 0.25}, {1.0, 0.32}}}, 0.012});
    spec.cracks.push_back({{{{1.3, 0.2}, {1.55, 0.5}},
                            {{1.55, 0.5}, {1.4, 0.85}},
                            {{1.55, 0.5}, {1.8, 0.8}}},
                           0.012});
    spec.patches.push_back({"spalling", {{0.35, 0.55}, {0.75, 0.55}, {0.75, 0.85}, {0.35, 0.85}}});
    spec.patches.push_back({"corrosion", {{0.9, 0.6}, {1.15, 0.6}, {1.15, 0.8}, {0.9, 0.8}}});
  }
  spec.seed = opts.seed;
  if (opts.noise >= 0.0) spec.noise = opts.noise;
  const SynthScene scene = generate_synthetic_scene(spec);
  write_scene_bundle(scene, spec, opts.out_dir);
}

}  // namespace enstrect
