#include "enstrect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "enstrect/error.hpp"
#include "enstrect/geometry.hpp"

namespace enstrect {

namespace {

double polyline_length(const std::vector<Eigen::Vector3d>& v, bool closed) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) len += (v[i + 1] - v[i]).norm();
  if (closed && v.size() >= 2) len += (v.front() - v.back()).norm();
  return len;
}

Eigen::Vector3d point_at_arclength(const std::vector<Eigen::Vector3d>& v, bool closed,
                                   double s) {
  const std::size_t n = v.size();
  const std::size_t segments = closed ? n : n - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const Eigen::Vector3d& a = v[i];
    const Eigen::Vector3d& b = v[(i + 1) % n];
    const double seg = (b - a).norm();
    if (s <= seg || i + 1 == segments) {
      if (seg <= 0.0) return a;
      return a + std::clamp(s / seg, 0.0, 1.0) * (b - a);
    }
    s -= seg;
  }
  return v.back();
}

}  // namespace

std::vector<Eigen::Vector3d> resample_vertices(const std::vector<Eigen::Vector3d>& vertices,
                                               double spacing, bool closed) {
  if (!(spacing > 0.0)) throw ValidationError("resample_vertices: spacing must be positive");
  if (vertices.size() < 2) return vertices;

  const double length = polyline_length(vertices, closed);
  if (!(length > 0.0)) return {vertices.front()};

  if (closed) {
    const std::size_t intervals =
        std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(length / spacing - 1e-9)));
    std::vector<Eigen::Vector3d> out;
    out.reserve(intervals);
    for (std::size_t i = 0; i < intervals; ++i)
      out.push_back(point_at_arclength(vertices, true, length * i / intervals));
    return out;
  }
  const std::size_t intervals =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / spacing - 1e-9)));
  std::vector<Eigen::Vector3d> out;
  out.reserve(intervals + 1);
  for (std::size_t i = 0; i < intervals; ++i)
    out.push_back(point_at_arclength(vertices, false, length * i / intervals));
  out.push_back(vertices.back());
  return out;
}

ToleranceCounts tolerance_counts(const std::vector<Eigen::Vector3d>& truth_vertices,
                                 const std::vector<Eigen::Vector3d>& predicted_vertices,
                                 double tau) {
  if (!(tau > 0.0)) throw ValidationError("tolerance_counts: tau must be positive");
  ToleranceCounts counts;
  counts.tau = tau;
  const double tau2 = tau * tau;

  auto count_within = [tau2](const std::vector<Eigen::Vector3d>& from,
                             const std::vector<Eigen::Vector3d>& to) {
    if (from.empty() || to.empty()) return 0LL;
    long long within = 0;
    if (to.size() > 32) {
      const KdTree tree(to);
      for (const auto& p : from) {
        const auto nn = tree.knn(p, 1);
        if (!nn.empty() && (to[nn[0]] - p).squaredNorm() <= tau2) ++within;
      }
    } else {
      for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to) best = std::min(best, (q - p).squaredNorm());
        if (best <= tau2) ++within;
      }
    }
    return within;
  };

  counts.tp = count_within(truth_vertices, predicted_vertices);
  counts.fn = static_cast<long long>(truth_vertices.size()) - counts.tp;
  counts.fp = static_cast<long long>(predicted_vertices.size()) -
              count_within(predicted_vertices, truth_vertices);
  if (predicted_vertices.empty()) counts.fp = 0;
  if (truth_vertices.empty()) {
    counts.tp = 0;
    counts.fn = 0;
    counts.fp = static_cast<long long>(predicted_vertices.size());
  }
  return counts;
}

double iou_tol(const ToleranceCounts& counts) {
  const long long denom = counts.tp + counts.fn + counts.fp;
  if (denom == 0) return 1.0;  // vacuous agreement of two empty sets
  return static_cast<double>(counts.tp) / static_cast<double>(denom);
}

std::vector<Eigen::Vector3d> instance_vertices(const EvalInstance& instance, double spacing) {
  std::vector<Eigen::Vector3d> pool;
  for (const auto& part : instance.parts) {
    if (spacing > 0.0 && part.vertices.size() >= 2) {
      const auto pts = resample_vertices(part.vertices, spacing, part.closed);
      pool.insert(pool.end(), pts.begin(), pts.end());
    } else {
      pool.insert(pool.end(), part.vertices.begin(), part.vertices.end());
    }
  }
  return pool;
}

ApResult ap50(const AnnotationSet& truth, const std::vector<EvalInstance>& predictions,
              double tau, const ApOptions& opts) {
  if (!(tau > 0.0)) throw ValidationError("ap50: tau must be positive");
  ApResult result;
  result.tau = tau;
  if (truth.empty() && predictions.empty()) {
    result.ap = 1.0;
    return result;
  }
  if (truth.empty() || predictions.empty()) {
    result.ap = 0.0;
    return result;
  }

  std::vector<std::vector<Eigen::Vector3d>> truth_pts, pred_pts;
  for (const auto& t : truth) truth_pts.push_back(instance_vertices(t, opts.resample_spacing));
  for (const auto& p : predictions)
    pred_pts.push_back(instance_vertices(p, opts.resample_spacing));

  std::vector<int> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return predictions[a].confidence > predictions[b].confidence;
  });

  std::vector<char> truth_used(truth.size(), 0);
  std::vector<char> is_tp(predictions.size(), 0);
  for (const int pi : order) {
    int best_t = -1;
    double best_iou = -1.0;
    for (std::size_t ti = 0; ti < truth.size(); ++ti) {
      if (truth_used[ti] || truth[ti].class_index != predictions[pi].class_index) continue;
      const double iou = iou_tol(tolerance_counts(truth_pts[ti], pred_pts[pi], tau));
      if (iou > best_iou) {
        best_iou = iou;
        best_t = static_cast<int>(ti);
      }
    }
    if (best_t >= 0 && best_iou >= opts.iou_threshold) {
      truth_used[best_t] = 1;
      is_tp[pi] = 1;
      result.matches.emplace_back(pi, best_t);
      result.matched_ious.push_back(best_iou);
    }
  }

  // Precision-recall curve in confidence order, all-point interpolation.
  const double n_truth = static_cast<double>(truth.size());
  std::vector<double> precision, recall;
  double tp = 0, fp = 0;
  for (const int pi : order) {
    if (is_tp[pi])
      ++tp;
    else
      ++fp;
    precision.push_back(tp / (tp + fp));
    recall.push_back(tp / n_truth);
  }
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i)
    precision[i] = std::max(precision[i], precision[i + 1]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  result.ap = ap;
  return result;
}

MetricsReport evaluate_metrics(const AnnotationSet& truth,
                               const std::vector<EvalInstance>& predictions,
                               const std::vector<std::string>& class_names,
                               const std::vector<double>& tolerances,
                               double resample_spacing) {
  MetricsReport report;
  report.tolerances = tolerances;
  report.resample_spacing = resample_spacing;

  std::vector<int> classes_present;
  for (const auto& t : truth)
    if (std::find(classes_present.begin(), classes_present.end(), t.class_index) ==
        classes_present.end())
      classes_present.push_back(t.class_index);
  for (const auto& p : predictions)
    if (std::find(classes_present.begin(), classes_present.end(), p.class_index) ==
        classes_present.end())
      classes_present.push_back(p.class_index);
  std::sort(classes_present.begin(), classes_present.end());

  for (const int cls : classes_present) {
    const std::string name = cls >= 0 && cls < static_cast<int>(class_names.size())
                                 ? class_names[cls]
                                 : "class_" + std::to_string(cls);
    report.class_names.push_back(name);
    ClassMetrics metrics;

    AnnotationSet t_cls;
    std::vector<EvalInstance> p_cls;
    std::vector<Eigen::Vector3d> t_pool, p_pool;
    for (const auto& t : truth) {
      if (t.class_index != cls) continue;
      t_cls.push_back(t);
      const auto pts = instance_vertices(t, resample_spacing);
      t_pool.insert(t_pool.end(), pts.begin(), pts.end());
    }
    for (const auto& p : predictions) {
      if (p.class_index != cls) continue;
      p_cls.push_back(p);
      const auto pts = instance_vertices(p, resample_spacing);
      p_pool.insert(p_pool.end(), pts.begin(), pts.end());
    }
    metrics.truth_instances = static_cast<int>(t_cls.size());
    metrics.predicted_instances = static_cast<int>(p_cls.size());

    for (const double tau : tolerances) {
      const auto counts = tolerance_counts(t_pool, p_pool, tau);
      metrics.counts[tau] = counts;
      metrics.iou[tau] = iou_tol(counts);
      ApOptions opts;
      opts.resample_spacing = resample_spacing;
      metrics.ap[tau] = ap50(t_cls, p_cls, tau, opts).ap;
    }
    report.per_class[name] = std::move(metrics);
  }
  return report;
}

std::string report_text(const MetricsReport& report) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os << std::setw(10) << "";
  for (const auto& name : report.class_names) os << std::setw(20) << name;
  os << "\n" << std::setw(10) << "Tol. [cm]";
  for (std::size_t i = 0; i < report.class_names.size(); ++i)
    os << std::setw(10) << "IoU[%]" << std::setw(10) << "AP50[%]";
  os << "\n";
  os.precision(1);
  for (const double tau : report.tolerances) {
    os << std::setw(10) << tau * 100.0;
    for (const auto& name : report.class_names) {
      const auto& m = report.per_class.at(name);
      os << std::setw(10) << m.iou.at(tau) * 100.0 << std::setw(10) << m.ap.at(tau) * 100.0;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace enstrect
