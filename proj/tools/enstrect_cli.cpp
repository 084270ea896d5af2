// Command-line front end for the 2.5D damage extraction pipeline. All work
// happens behind the C API; this translates flags into per-stage JSON option
// documents. Flags override config-file values, which override scene-bundle
// parameters, which override built-in defaults.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>
#include <sstream>

#include "enstrect.h"

namespace {

using nlohmann::json;

struct FlagSink {
  CLI::App* cmd = nullptr;
  json patch = json::object();

  template <typename T>
  void set(const std::string& flag, const char* key, const T& value) {
    if (cmd->count(flag) > 0) patch[key] = value;
  }
};

int finish(int rc) {
  if (rc != ENSTRECT_OK) std::fprintf(stderr, "error: %s\n", enstrect_last_error());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"enstrect — 2.5D structural damage mapping, extraction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(enstrect_version()));

  int exit_code = 0;

  // --- map ------------------------------------------------------------
  auto* map_cmd = app.add_subcommand(
      "map", "Fuse per-view class heatmaps onto a point cloud (segmented PLY out)");
  struct {
    std::string scene, cloud, cameras, heatmaps, out, config, classes_csv;
    int normals_k = 16, threads = 1, background_index = 0;
    double splat_radius = 2.0, depth_tol = 0.01;
    bool no_occlusion = false, count_all_visible = false, ascii = false;
    std::uint64_t seed = 0;
  } map_opts;
  map_cmd->add_option("--scene", map_opts.scene, "Scene bundle directory or scene.json");
  map_cmd->add_option("--cloud", map_opts.cloud, "Input point cloud (PLY)");
  map_cmd->add_option("--cameras", map_opts.cameras, "Camera manifest (JSON)");
  map_cmd->add_option("--heatmaps", map_opts.heatmaps, "Heatmap directory");
  map_cmd->add_option("--out", map_opts.out, "Output segmented PLY");
  map_cmd->add_option("--config", map_opts.config, "Config file (TOML or JSON)");
  map_cmd->add_option("--classes", map_opts.classes_csv, "Comma-separated class names");
  map_cmd->add_option("--background-index", map_opts.background_index, "Background class index");
  map_cmd->add_option("--normals-k", map_opts.normals_k, "k for normal estimation");
  map_cmd->add_option("--splat-radius", map_opts.splat_radius, "Depth-buffer splat radius [px]");
  map_cmd->add_option("--depth-tol", map_opts.depth_tol, "Relative depth tolerance");
  map_cmd->add_flag("--no-occlusion", map_opts.no_occlusion, "Disable the occlusion test");
  map_cmd->add_flag("--count-all-visible", map_opts.count_all_visible,
                    "Count every visible view in N, not only in-interval views");
  map_cmd->add_flag("--ascii-ply", map_opts.ascii, "Write ASCII instead of binary PLY");
  map_cmd->add_option("--threads", map_opts.threads, "Worker threads")
      ->envname("ENSTRECT_THREADS");
  map_cmd->add_option("--seed", map_opts.seed, "Random seed")->envname("ENSTRECT_SEED");
  map_cmd->callback([&] {
    FlagSink sink{map_cmd};
    sink.set("--scene", "scene", map_opts.scene);
    sink.set("--cloud", "cloud", map_opts.cloud);
    sink.set("--cameras", "cameras", map_opts.cameras);
    sink.set("--heatmaps", "heatmaps", map_opts.heatmaps);
    sink.set("--out", "out", map_opts.out);
    sink.set("--config", "config", map_opts.config);
    if (map_cmd->count("--classes")) {
      json arr = json::array();
      std::string item;
      std::stringstream ss(map_opts.classes_csv);
      while (std::getline(ss, item, ',')) arr.push_back(item);
      sink.patch["classes"] = arr;
    }
    sink.set("--background-index", "background_index", map_opts.background_index);
    sink.set("--normals-k", "normals_k", map_opts.normals_k);
    sink.set("--splat-radius", "splat_radius_px", map_opts.splat_radius);
    sink.set("--depth-tol", "depth_tol_rel", map_opts.depth_tol);
    if (map_cmd->count("--no-occlusion")) sink.patch["occlusion"] = false;
    sink.set("--count-all-visible", "count_all_visible", map_opts.count_all_visible);
    sink.set("--ascii-ply", "ascii_ply", map_opts.ascii);
    sink.set("--threads", "threads", map_opts.threads);
    exit_code = finish(enstrect_map_run(sink.patch.dump().c_str()));
  });

  // --- cluster ----------------------------------------------------------
  auto* cluster_cmd =
      app.add_subcommand("cluster", "Split a segmented cloud into damage instances (DBSCAN)");
  struct {
    std::string segmented, out, config;
    double crack_eps = 0, areal_eps = 0, eps_factor = 4.0;
    int crack_min_pts = 5, areal_min_pts = 10;
  } cl_opts;
  cluster_cmd->add_option("--segmented", cl_opts.segmented, "Segmented PLY in");
  cluster_cmd->add_option("--out", cl_opts.out, "Instance index JSON out");
  cluster_cmd->add_option("--config", cl_opts.config, "Config file (TOML or JSON)");
  cluster_cmd->add_option("--crack-eps", cl_opts.crack_eps, "DBSCAN eps for cracks [m] (0=auto)");
  cluster_cmd->add_option("--areal-eps", cl_opts.areal_eps,
                          "DBSCAN eps for areal classes [m] (0=auto)");
  cluster_cmd->add_option("--crack-min-pts", cl_opts.crack_min_pts, "min_pts for cracks");
  cluster_cmd->add_option("--areal-min-pts", cl_opts.areal_min_pts, "min_pts for areal classes");
  cluster_cmd->add_option("--eps-auto-factor", cl_opts.eps_factor,
                          "eps = factor * median NN distance");
  cluster_cmd->callback([&] {
    FlagSink sink{cluster_cmd};
    sink.set("--segmented", "segmented", cl_opts.segmented);
    sink.set("--out", "out", cl_opts.out);
    sink.set("--config", "config", cl_opts.config);
    sink.set("--crack-eps", "crack_eps", cl_opts.crack_eps);
    sink.set("--areal-eps", "areal_eps", cl_opts.areal_eps);
    sink.set("--crack-min-pts", "crack_min_pts", cl_opts.crack_min_pts);
    sink.set("--areal-min-pts", "areal_min_pts", cl_opts.areal_min_pts);
    sink.set("--eps-auto-factor", "eps_auto_factor", cl_opts.eps_factor);
    exit_code = finish(enstrect_cluster_run(sink.patch.dump().c_str()));
  });

  // --- extract ----------------------------------------------------------
  auto* extract_cmd = app.add_subcommand(
      "extract", "Extract medial axes (cracks) and bounding polygons (areal damages)");
  struct {
    std::string segmented, clusters, out, obj_out, config;
    int contraction_k = 8, max_iter = 20, downsample = 500, mst_threshold = 2000;
    double w_l0 = 1.0, w_h0 = 1.0, s_l = 3.0, conv_ratio = 0.01, simplify = 0.001;
    double alpha = 100.0, planarity = 0.95;
    bool joint_norm = false;
  } ex_opts;
  extract_cmd->add_option("--segmented", ex_opts.segmented, "Segmented PLY in");
  extract_cmd->add_option("--clusters", ex_opts.clusters, "Instance index JSON in");
  extract_cmd->add_option("--out", ex_opts.out, "Instance records JSON out");
  extract_cmd->add_option("--obj-out", ex_opts.obj_out, "Companion OBJ path");
  extract_cmd->add_option("--config", ex_opts.config, "Config file (TOML or JSON)");
  extract_cmd->add_option("--contraction-k", ex_opts.contraction_k, "Laplacian neighborhood k");
  extract_cmd->add_option("--w-l0", ex_opts.w_l0, "Initial contraction weight");
  extract_cmd->add_option("--w-h0", ex_opts.w_h0, "Initial attraction weight");
  extract_cmd->add_option("--s-l", ex_opts.s_l, "Contraction amplification per iteration");
  extract_cmd->add_option("--max-iterations", ex_opts.max_iter, "Contraction iteration cap");
  extract_cmd->add_option("--convergence-ratio", ex_opts.conv_ratio,
                          "Stop when mean extent shrinks below this fraction");
  extract_cmd->add_option("--downsample", ex_opts.downsample,
                          "Max skeleton vertices before MST (0=off)");
  extract_cmd->add_option("--simplify", ex_opts.simplify,
                          "Douglas-Peucker tolerance [m] (0=off)");
  extract_cmd->add_option("--mst-complete-threshold", ex_opts.mst_threshold,
                          "Exact complete-graph MST up to this many points");
  extract_cmd->add_option("--alpha", ex_opts.alpha, "Alpha (normalized space)");
  extract_cmd->add_option("--planarity-threshold", ex_opts.planarity,
                          "Explained-variance ratio below which polygons are flagged");
  extract_cmd->add_flag("--joint-normalization", ex_opts.joint_norm,
                        "Share one scale across both PCA axes");
  extract_cmd->callback([&] {
    FlagSink sink{extract_cmd};
    sink.set("--segmented", "segmented", ex_opts.segmented);
    sink.set("--clusters", "clusters", ex_opts.clusters);
    sink.set("--out", "out", ex_opts.out);
    sink.set("--obj-out", "obj_out", ex_opts.obj_out);
    sink.set("--config", "config", ex_opts.config);
    sink.set("--contraction-k", "contraction_k", ex_opts.contraction_k);
    sink.set("--w-l0", "w_l0", ex_opts.w_l0);
    sink.set("--w-h0", "w_h0", ex_opts.w_h0);
    sink.set("--s-l", "s_l", ex_opts.s_l);
    sink.set("--max-iterations", "max_iterations", ex_opts.max_iter);
    sink.set("--convergence-ratio", "convergence_ratio", ex_opts.conv_ratio);
    sink.set("--downsample", "downsample_max_vertices", ex_opts.downsample);
    sink.set("--simplify", "simplify_tolerance", ex_opts.simplify);
    sink.set("--mst-complete-threshold", "mst_complete_threshold", ex_opts.mst_threshold);
    sink.set("--alpha", "alpha", ex_opts.alpha);
    sink.set("--planarity-threshold", "planarity_threshold", ex_opts.planarity);
    sink.set("--joint-normalization", "joint_normalization", ex_opts.joint_norm);
    exit_code = finish(enstrect_extract_run(sink.patch.dump().c_str()));
  });

  // --- evaluate -----------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Tolerance-based IoU and AP50 of predictions against annotations");
  struct {
    std::string predictions, annotations, report_json, report_txt, config;
    std::vector<double> tolerances;
    double spacing = 0.005;
  } ev_opts;
  eval_cmd->add_option("--predictions", ev_opts.predictions, "Predicted instances JSON");
  eval_cmd->add_option("--annotations", ev_opts.annotations, "Ground-truth instances JSON");
  eval_cmd->add_option("--report-json", ev_opts.report_json, "Report JSON out");
  eval_cmd->add_option("--report-txt", ev_opts.report_txt, "Report text out");
  eval_cmd->add_option("--config", ev_opts.config, "Config file (TOML or JSON)");
  eval_cmd->add_option("--tol", ev_opts.tolerances, "Tolerance grid [m]");
  eval_cmd->add_option("--resample-spacing", ev_opts.spacing,
                       "Vertex resampling spacing [m] (0=strict raw vertices)");
  eval_cmd->callback([&] {
    FlagSink sink{eval_cmd};
    sink.set("--predictions", "predictions", ev_opts.predictions);
    sink.set("--annotations", "annotations", ev_opts.annotations);
    sink.set("--report-json", "report_json", ev_opts.report_json);
    sink.set("--report-txt", "report_txt", ev_opts.report_txt);
    sink.set("--config", "config", ev_opts.config);
    if (eval_cmd->count("--tol")) sink.patch["tolerances"] = ev_opts.tolerances;
    sink.set("--resample-spacing", "resample_spacing", ev_opts.spacing);
    char* text = nullptr;
    exit_code = finish(enstrect_evaluate_run(sink.patch.dump().c_str(), &text));
    if (text != nullptr) {
      std::fputs(text, stdout);
      enstrect_string_free(text);
    }
  });

  // --- pipeline -----------------------------------------------------------
  auto* pipe_cmd =
      app.add_subcommand("pipeline", "Run map, cluster, extract (and evaluate) end to end");
  struct {
    std::string scene, out_dir, annotations, config;
    std::uint64_t seed = 0;
    int threads = 1;
  } pp_opts;
  pipe_cmd->add_option("--scene", pp_opts.scene, "Scene bundle directory or scene.json");
  pipe_cmd->add_option("--out", pp_opts.out_dir, "Output directory");
  pipe_cmd->add_option("--annotations", pp_opts.annotations,
                       "Ground-truth instances JSON (enables evaluate)");
  pipe_cmd->add_option("--config", pp_opts.config, "Config file (TOML or JSON)");
  pipe_cmd->add_option("--seed", pp_opts.seed, "Random seed")->envname("ENSTRECT_SEED");
  pipe_cmd->add_option("--threads", pp_opts.threads, "Worker threads")
      ->envname("ENSTRECT_THREADS");
  pipe_cmd->callback([&] {
    FlagSink sink{pipe_cmd};
    sink.set("--scene", "scene", pp_opts.scene);
    sink.set("--out", "out_dir", pp_opts.out_dir);
    sink.set("--annotations", "annotations", pp_opts.annotations);
    sink.set("--config", "config", pp_opts.config);
    sink.set("--seed", "seed", pp_opts.seed);
    if (pipe_cmd->count("--threads")) sink.patch["map"] = {{"threads", pp_opts.threads}};
    char* text = nullptr;
    exit_code = finish(enstrect_pipeline_run(sink.patch.dump().c_str(), &text));
    if (text != nullptr) {
      if (text[0] != '\0') std::fputs(text, stdout);
      enstrect_string_free(text);
    }
  });

  // --- synth --------------------------------------------------------------
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic scene bundle with exact ground truth");
  struct {
    std::string out_dir, spec;
    std::uint64_t seed = 0;
    double noise = -1.0;
  } sy_opts;
  synth_cmd->add_option("--out", sy_opts.out_dir, "Bundle directory to create");
  synth_cmd->add_option("--spec", sy_opts.spec, "Generator spec JSON (default: demo wall)");
  synth_cmd->add_option("--seed", sy_opts.seed, "Random seed")->envname("ENSTRECT_SEED");
  synth_cmd->add_option("--noise", sy_opts.noise, "Heatmap noise sigma (overrides spec)");
  synth_cmd->callback([&] {
    FlagSink sink{synth_cmd};
    sink.set("--out", "out_dir", sy_opts.out_dir);
    sink.set("--spec", "spec_json", sy_opts.spec);
    sink.set("--seed", "seed", sy_opts.seed);
    sink.set("--noise", "noise", sy_opts.noise);
    exit_code = finish(enstrect_synth_run(sink.patch.dump().c_str()));
  });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
