#pragma once

#include <Eigen/Core>

#include <json.hpp>

#include <string>
#include <vector>

#include "enstrect/metrics.hpp"

namespace enstrect {

// Pipeline end product: one measurable damage instance, either a medial
// axis (cracks) or a bounding polygon (areal damages).
struct InstanceRecord {
  int id = 0;
  std::string class_name;
  std::string kind;  // "medial_axis" | "polygon"
  double confidence = 1.0;
  std::vector<std::vector<Eigen::Vector3d>> polylines;       // medial_axis
  std::vector<Eigen::Vector3d> loop;                         // polygon, closed implicitly
  std::vector<std::vector<Eigen::Vector3d>> aux_loops;
  bool planar = true;
  double alpha = 0.0;
  nlohmann::json provenance;  // parameters echo; free-form

  void validate() const;
};

constexpr int kInstanceSchemaVersion = 1;

void write_instances_json(const std::vector<InstanceRecord>& records, const std::string& path);
std::vector<InstanceRecord> read_instances_json(const std::string& path);

// Companion OBJ export: `v` records plus `l` polyline records (loops closed).
void write_instances_obj(const std::vector<InstanceRecord>& records, const std::string& path);

// Evaluation view of a record set: polylines become open instances,
// polygons closed loops. Classes are mapped through `class_names`.
std::vector<EvalInstance> to_eval_instances(const std::vector<InstanceRecord>& records,
                                            const std::vector<std::string>& class_names);

}  // namespace enstrect
