#include "enstrect.h"

#include <cstring>
#include <string>
#include <memory>

#include "enstrect/error.hpp"
#include "enstrect/geometry.hpp"
#include "enstrect/pipeline.hpp"
#include "enstrect/ply_io.hpp"

namespace {

thread_local std::string g_last_error;

nlohmann::json parse_options(const char* options_json) {
  if (options_json == nullptr || options_json[0] == '\0') return nlohmann::json::object();
  try {
    return nlohmann::json::parse(options_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw enstrect::ValidationError(std::string("options document is not valid JSON: ") +
                                    e.what());
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return ENSTRECT_OK;
  } catch (const enstrect::ValidationError& e) {
    g_last_error = e.what();
    return ENSTRECT_ERR_VALIDATION;
  } catch (const enstrect::ProcessingError& e) {
    g_last_error = e.what();
    return ENSTRECT_ERR_PROCESSING;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ENSTRECT_ERR_PROCESSING;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct enstrect_cloud {
  enstrect::PointCloud cloud;
};

extern "C" {

const char* enstrect_version(void) { return "1.0.0"; }

const char* enstrect_last_error(void) { return g_last_error.c_str(); }

void enstrect_string_free(char* s) { delete[] s; }

int enstrect_map_run(const char* options_json) {
  return guarded([&] { enstrect::run_map(enstrect::resolve_map_options(parse_options(options_json))); });
}

int enstrect_cluster_run(const char* options_json) {
  return guarded(
      [&] { enstrect::run_cluster(enstrect::resolve_cluster_options(parse_options(options_json))); });
}

int enstrect_extract_run(const char* options_json) {
  return guarded(
      [&] { enstrect::run_extract(enstrect::resolve_extract_options(parse_options(options_json))); });
}

int enstrect_evaluate_run(const char* options_json, char** report_text) {
  return guarded([&] {
    const std::string text =
        enstrect::run_evaluate(enstrect::resolve_evaluate_options(parse_options(options_json)));
    if (report_text != nullptr) *report_text = dup_string(text);
  });
}

int enstrect_pipeline_run(const char* options_json, char** report_text) {
  return guarded([&] {
    const std::string text =
        enstrect::run_pipeline(enstrect::resolve_pipeline_options(parse_options(options_json)));
    if (report_text != nullptr) *report_text = dup_string(text);
  });
}

int enstrect_synth_run(const char* options_json) {
  return guarded(
      [&] { enstrect::run_synth(enstrect::resolve_synth_options(parse_options(options_json))); });
}

int enstrect_cloud_load(const char* ply_path, enstrect_cloud** out) {
  return guarded([&] {
    if (ply_path == nullptr || out == nullptr)
      throw enstrect::ValidationError("cloud_load: null argument");
    auto handle = std::make_unique<enstrect_cloud>();
    handle->cloud = enstrect::read_ply(ply_path);
    *out = handle.release();
  });
}

int enstrect_cloud_create(const double* xyz, uint64_t count, enstrect_cloud** out) {
  return guarded([&] {
    if ((xyz == nullptr && count > 0) || out == nullptr)
      throw enstrect::ValidationError("cloud_create: null argument");
    auto handle = std::make_unique<enstrect_cloud>();
    handle->cloud.positions.reserve(count);
    for (uint64_t i = 0; i < count; ++i)
      handle->cloud.positions.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
    handle->cloud.validate();
    *out = handle.release();
  });
}

int enstrect_cloud_size(const enstrect_cloud* cloud, uint64_t* count) {
  return guarded([&] {
    if (cloud == nullptr || count == nullptr)
      throw enstrect::ValidationError("cloud_size: null argument");
    *count = cloud->cloud.size();
  });
}

int enstrect_cloud_positions(const enstrect_cloud* cloud, double* xyz) {
  return guarded([&] {
    if (cloud == nullptr || xyz == nullptr)
      throw enstrect::ValidationError("cloud_positions: null argument");
    for (std::size_t i = 0; i < cloud->cloud.size(); ++i)
      for (int a = 0; a < 3; ++a) xyz[3 * i + a] = cloud->cloud.positions[i][a];
  });
}

int enstrect_cloud_has_normals(const enstrect_cloud* cloud, int* has_normals) {
  return guarded([&] {
    if (cloud == nullptr || has_normals == nullptr)
      throw enstrect::ValidationError("cloud_has_normals: null argument");
    *has_normals = cloud->cloud.has_normals() ? 1 : 0;
  });
}

int enstrect_cloud_normals(const enstrect_cloud* cloud, double* xyz) {
  return guarded([&] {
    if (cloud == nullptr || xyz == nullptr)
      throw enstrect::ValidationError("cloud_normals: null argument");
    if (!cloud->cloud.has_normals())
      throw enstrect::ValidationError("cloud_normals: cloud has no normals");
    for (std::size_t i = 0; i < cloud->cloud.size(); ++i)
      for (int a = 0; a < 3; ++a) xyz[3 * i + a] = cloud->cloud.normals[i][a];
  });
}

int enstrect_cloud_estimate_normals(enstrect_cloud* cloud, int k) {
  return guarded([&] {
    if (cloud == nullptr) throw enstrect::ValidationError("estimate_normals: null handle");
    enstrect::NormalEstimationOptions opts;
    opts.k = k;
    cloud->cloud = enstrect::estimate_normals(cloud->cloud, opts);
  });
}

int enstrect_cloud_save(const enstrect_cloud* cloud, const char* ply_path, int binary) {
  return guarded([&] {
    if (cloud == nullptr || ply_path == nullptr)
      throw enstrect::ValidationError("cloud_save: null argument");
    enstrect::write_ply(cloud->cloud, ply_path, binary != 0);
  });
}

void enstrect_cloud_free(enstrect_cloud* cloud) { delete cloud; }

}  // extern "C"
