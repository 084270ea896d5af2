#pragma once

#include <Eigen/Core>

#include <vector>

#include "enstrect/clustering.hpp"
#include "enstrect/delaunay.hpp"

namespace enstrect {

// Local plane of an areal-damage instance: orthonormal basis with e1/e2
// spanning the dominant plane and e3 the residual direction, plus the
// per-axis normalization applied to the projected 2D coordinates.
struct PlaneFrame {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d e1, e2, e3;
  double explained_variance_ratio = 0.0;  // (lambda1+lambda2)/sum
  Eigen::Vector2d norm_offset = Eigen::Vector2d::Zero();
  Eigen::Vector2d norm_scale = Eigen::Vector2d::Ones();  // divide by this
};

struct PcaProjectOptions {
  double planarity_threshold = 0.95;  // explained-variance ratio below -> flagged
  bool joint_normalization = false;   // one shared scale instead of per-axis
  double condition_tolerance = 1e-10; // covariance degeneracy check
};

struct PcaProjection {
  PlaneFrame frame;
  std::vector<Eigen::Vector2d> normalized;  // each axis spans [0, 1]
  bool planar = true;
};

PcaProjection pca_project(const std::vector<Eigen::Vector3d>& points,
                          const PcaProjectOptions& opts = {});
PcaProjection pca_project(const InstanceCloud& instance, const PcaProjectOptions& opts = {});

// Alpha-complex boundary: Delaunay triangles with circumradius <= 1/alpha,
// chained boundary edges. The loop enclosing the largest area comes back as
// `main_loop`; any further loops are flagged auxiliaries.
struct BoundaryLoops {
  std::vector<int> main_loop;                // CCW vertex indices, first != last
  std::vector<std::vector<int>> aux_loops;
};

BoundaryLoops alpha_boundary(const std::vector<Eigen::Vector2d>& points, double alpha);

// Closed 2.5D polygon around one areal instance; vertices are exact members
// of the instance point set.
struct BoundingPolygon25D {
  std::vector<int> vertex_indices;  // into the instance points
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::vector<Eigen::Vector3d>> aux_loops;
  int source_instance = -1;
  bool planar = true;
  double alpha = 100.0;
  PlaneFrame frame;
};

struct PolygonParams {
  double alpha = 100.0;  // in normalized PCA space
  PcaProjectOptions pca;
};

BoundingPolygon25D extract_polygon(const InstanceCloud& instance,
                                   const PolygonParams& params = {});

// Signed area of a 2D loop (shoelace); positive for CCW.
double polygon_area(const std::vector<Eigen::Vector2d>& loop);

}  // namespace enstrect
