#pragma once

#include <Eigen/Core>

#include <vector>

namespace enstrect {

struct DelaunayTriangle {
  int a = -1, b = -1, c = -1;  // CCW, indices into the input point list
};

// Incremental Bowyer-Watson Delaunay triangulation. Exactly cocircular and
// collinear configurations are disambiguated by a deterministic microscopic
// jitter applied to working copies of the coordinates only; indices refer to
// the unmodified input points. Throws when fewer than 3 points are given or
// all points are collinear.
std::vector<DelaunayTriangle> delaunay_triangulation(const std::vector<Eigen::Vector2d>& points);

// Circumradius from the original coordinates; +inf for degenerate triangles.
double circumradius(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c);

}  // namespace enstrect
