#pragma once

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace enstrect {

// One geometry part: a polyline (open) or a polygon loop (closed).
struct EvalPart {
  bool closed = false;
  std::vector<Eigen::Vector3d> vertices;
};

// Ground-truth or predicted instance for evaluation. A crack medial axis may
// contribute several branch polylines; they resample independently but match
// as one instance.
struct EvalInstance {
  int class_index = -1;
  double confidence = 1.0;  // ignored for ground truth
  std::vector<EvalPart> parts;
};

using AnnotationSet = std::vector<EvalInstance>;

// Pooled (optionally resampled) vertices of all parts; spacing <= 0 pools
// the raw vertices.
std::vector<Eigen::Vector3d> instance_vertices(const EvalInstance& instance, double spacing);

// Arc-length resampling at the given spacing; endpoints preserved for open
// polylines. spacing <= 0 is rejected.
std::vector<Eigen::Vector3d> resample_vertices(const std::vector<Eigen::Vector3d>& vertices,
                                               double spacing, bool closed = false);

struct ToleranceCounts {
  long long tp = 0, fn = 0, fp = 0;
  double tau = 0.0;
};

// Vertex-set matching under positional tolerance tau: a truth vertex counts
// as TP when its nearest predicted vertex lies within tau; a predicted vertex
// counts as FP when its nearest truth vertex lies beyond tau.
ToleranceCounts tolerance_counts(const std::vector<Eigen::Vector3d>& truth_vertices,
                                 const std::vector<Eigen::Vector3d>& predicted_vertices,
                                 double tau);

// TP / (TP + FN + FP); defined as 1 when all three are zero (both sets empty).
double iou_tol(const ToleranceCounts& counts);

struct ApResult {
  double ap = 0.0;
  std::vector<std::pair<int, int>> matches;  // (prediction index, truth index)
  std::vector<double> matched_ious;
  double tau = 0.0;
};

struct ApOptions {
  double resample_spacing = 0.005;  // meters; 0 disables resampling
  double iou_threshold = 0.5;
};

// Instance-level average precision: predictions sorted by descending
// confidence, greedily matched to the unmatched same-class truth with the
// highest pairwise IoU(tau); a match is TP iff that IoU reaches the
// threshold. AP integrates the PR curve with all-point interpolation.
ApResult ap50(const AnnotationSet& truth, const std::vector<EvalInstance>& predictions,
              double tau, const ApOptions& opts = {});

// Per-class tolerance sweep used by the `evaluate` stage.
struct ClassMetrics {
  std::map<double, double> iou;    // tau -> pooled vertex IoU
  std::map<double, double> ap;     // tau -> AP50
  std::map<double, ToleranceCounts> counts;
  int truth_instances = 0;
  int predicted_instances = 0;
};

struct MetricsReport {
  std::vector<double> tolerances;          // meters
  std::vector<std::string> class_names;    // non-background classes present
  std::map<std::string, ClassMetrics> per_class;
  double resample_spacing = 0.005;
};

MetricsReport evaluate_metrics(const AnnotationSet& truth,
                               const std::vector<EvalInstance>& predictions,
                               const std::vector<std::string>& class_names,
                               const std::vector<double>& tolerances,
                               double resample_spacing);

// Aligned text table mirroring the tolerance-grid report rows.
std::string report_text(const MetricsReport& report);

}  // namespace enstrect
