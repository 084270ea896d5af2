#include "enstrect/polygon.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "enstrect/error.hpp"

namespace enstrect {

double polygon_area(const std::vector<Eigen::Vector2d>& loop) {
  double twice = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = loop[i];
    const auto& b = loop[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

PcaProjection pca_project(const std::vector<Eigen::Vector3d>& points,
                          const PcaProjectOptions& opts) {
  if (points.size() < 3) throw ValidationError("pca_project: need at least 3 points");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
  if (!(lambda[2] > 0.0) || lambda[1] <= opts.condition_tolerance * lambda[2])
    throw ValidationError("pca_project: degenerate covariance (collinear or coincident points)");

  PcaProjection out;
  out.frame.centroid = centroid;
  out.frame.e1 = eig.eigenvectors().col(2);
  out.frame.e2 = eig.eigenvectors().col(1);
  // Canonical signs: dominant component positive, right-handed frame.
  auto canonical = [](Eigen::Vector3d v) {
    int axis = 0;
    v.cwiseAbs().maxCoeff(&axis);
    return v[axis] < 0.0 ? Eigen::Vector3d(-v) : v;
  };
  out.frame.e1 = canonical(out.frame.e1);
  out.frame.e2 = canonical(out.frame.e2);
  out.frame.e3 = out.frame.e1.cross(out.frame.e2);
  out.frame.explained_variance_ratio = (lambda[2] + lambda[1]) / lambda.sum();
  out.planar = out.frame.explained_variance_ratio >= opts.planarity_threshold;

  std::vector<Eigen::Vector2d> raw(points.size());
  Eigen::Vector2d lo(1e300, 1e300), hi(-1e300, -1e300);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector3d d = points[i] - centroid;
    raw[i] = {d.dot(out.frame.e1), d.dot(out.frame.e2)};
    lo = lo.cwiseMin(raw[i]);
    hi = hi.cwiseMax(raw[i]);
  }
  Eigen::Vector2d range = hi - lo;
  if (opts.joint_normalization) range.setConstant(range.maxCoeff());
  for (int a = 0; a < 2; ++a)
    if (!(range[a] > 0.0)) range[a] = 1.0;

  out.frame.norm_offset = lo;
  out.frame.norm_scale = range;
  out.normalized.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out.normalized[i] = (raw[i] - lo).cwiseQuotient(range);
  return out;
}

PcaProjection pca_project(const InstanceCloud& instance, const PcaProjectOptions& opts) {
  return pca_project(instance.positions, opts);
}

BoundaryLoops alpha_boundary(const std::vector<Eigen::Vector2d>& points, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("alpha_boundary: alpha must be positive");
  if (points.size() < 3) throw ValidationError("alpha_boundary: need at least 3 points");

  const auto triangles = delaunay_triangulation(points);
  const double max_radius = 1.0 / alpha;

  std::vector<DelaunayTriangle> kept;
  for (const auto& t : triangles)
    if (circumradius(points[t.a], points[t.b], points[t.c]) <= max_radius) kept.push_back(t);
  if (kept.empty())
    throw ProcessingError(
        "alpha_boundary: no triangle survives the alpha filter; reduce alpha");

  // Boundary edges appear in exactly one kept triangle; orient them CCW
  // (interior on the left) as inherited from the triangle winding.
  std::map<std::pair<int, int>, int> edge_count;
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (const auto& t : kept) {
    ++edge_count[key(t.a, t.b)];
    ++edge_count[key(t.b, t.c)];
    ++edge_count[key(t.c, t.a)];
  }
  // vertex -> outgoing directed boundary edges
  std::map<int, std::vector<int>> outgoing;
  std::map<std::pair<int, int>, char> directed;
  for (const auto& t : kept) {
    const int vs[4] = {t.a, t.b, t.c, t.a};
    for (int e = 0; e < 3; ++e) {
      if (edge_count[key(vs[e], vs[e + 1])] == 1) {
        outgoing[vs[e]].push_back(vs[e + 1]);
        directed[{vs[e], vs[e + 1]}] = 1;
      }
    }
  }
  for (auto& [v, outs] : outgoing) std::sort(outs.begin(), outs.end());

  std::map<std::pair<int, int>, char> used;
  std::vector<std::vector<int>> loops;
  auto angle_of = [&](int from, int to) {
    const Eigen::Vector2d d = points[to] - points[from];
    return std::atan2(d.y(), d.x());
  };

  for (const auto& [start, outs] : outgoing) {
    for (const int first : outs) {
      if (used.count({start, first})) continue;
      std::vector<int> loop{start};
      int prev = start, cur = first;
      used[{start, first}] = 1;
      while (cur != start) {
        loop.push_back(cur);
        // Pick the sharpest left turn among unused outgoing edges; this
        // traces the boundary of a single connected face at pinch vertices.
        const auto it = outgoing.find(cur);
        if (it == outgoing.end())
          throw ProcessingError("alpha_boundary: open boundary chain");
        int next = -1;
        double best_turn = -1e300;
        const double incoming = angle_of(cur, prev);
        for (const int cand : it->second) {
          if (used.count({cur, cand})) continue;
          double turn = angle_of(cur, cand) - incoming;
          while (turn <= 0.0) turn += 2.0 * M_PI;
          while (turn > 2.0 * M_PI) turn -= 2.0 * M_PI;
          if (turn > best_turn) {
            best_turn = turn;
            next = cand;
          }
        }
        if (next < 0) throw ProcessingError("alpha_boundary: boundary chaining failed");
        used[{cur, next}] = 1;
        prev = cur;
        cur = next;
      }
      if (loop.size() >= 3) loops.push_back(std::move(loop));
    }
  }
  if (loops.empty()) throw ProcessingError("alpha_boundary: no closed boundary loop");

  // Largest absolute area wins; canonicalize to CCW starting at the
  // smallest vertex index.
  std::size_t main_idx = 0;
  double main_area = -1.0;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    std::vector<Eigen::Vector2d> poly;
    poly.reserve(loops[i].size());
    for (int v : loops[i]) poly.push_back(points[v]);
    const double a = std::abs(polygon_area(poly));
    if (a > main_area) {
      main_area = a;
      main_idx = i;
    }
  }

  BoundaryLoops out;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    auto loop = loops[i];
    std::vector<Eigen::Vector2d> poly;
    for (int v : loop) poly.push_back(points[v]);
    if (polygon_area(poly) < 0.0) std::reverse(loop.begin(), loop.end());
    const auto min_it = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), min_it, loop.end());
    if (i == main_idx)
      out.main_loop = std::move(loop);
    else
      out.aux_loops.push_back(std::move(loop));
  }
  return out;
}

BoundingPolygon25D extract_polygon(const InstanceCloud& instance, const PolygonParams& params) {
  const PcaProjection proj = pca_project(instance, params.pca);
  const BoundaryLoops loops = alpha_boundary(proj.normalized, params.alpha);

  BoundingPolygon25D poly;
  poly.alpha = params.alpha;
  poly.planar = proj.planar;
  poly.frame = proj.frame;
  poly.vertex_indices = loops.main_loop;
  poly.vertices.reserve(loops.main_loop.size());
  for (int idx : loops.main_loop) poly.vertices.push_back(instance.positions[idx]);
  for (const auto& aux : loops.aux_loops) {
    std::vector<Eigen::Vector3d> lifted;
    lifted.reserve(aux.size());
    for (int idx : aux) lifted.push_back(instance.positions[idx]);
    poly.aux_loops.push_back(std::move(lifted));
  }
  return poly;
}

}  // namespace enstrect
