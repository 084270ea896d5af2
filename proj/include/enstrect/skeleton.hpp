#pragma once

#include <vector>

#include "enstrect/contraction.hpp"
#include "enstrect/geometry.hpp"

namespace enstrect {

struct MstOptions {
  // Exact complete-graph MST up to this size; beyond it, MST over the k-NN
  // graph with nearest-pair bridging of disconnected components.
  int complete_threshold = 2000;
  int knn_k = 8;
};

// Minimum spanning tree over Euclidean distances; returned as a NeighborGraph
// with n-1 edges. Coincident points are rejected (zero-length edges).
NeighborGraph minimum_spanning_tree(const std::vector<Eigen::Vector3d>& points,
                                    const MstOptions& opts = {});

struct Polyline3D {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<int> source_indices;  // into the skeleton vertex set; empty after simplify
};

// Branch-free polylines of one crack instance.
struct MedialAxis {
  std::vector<Polyline3D> polylines;
  int source_instance = -1;
  int end_nodes = 0;        // tree nodes of degree 1
  int branching_nodes = 0;  // tree nodes of degree >= 3
};

// Splits a tree at every node of degree >= 3; the branching node is
// duplicated into every incident polyline. Throws unless the graph is a
// connected acyclic tree with at least one edge.
MedialAxis partition_polylines(const NeighborGraph& tree,
                               const std::vector<Eigen::Vector3d>& points);

// Deterministic farthest-point subsampling (seeded at the lexicographically
// smallest point). Stops at `target` points or, when min_spacing > 0, once
// every remaining point lies within min_spacing of a selected one. Returns
// selected indices in ascending order.
std::vector<int> farthest_point_downsample(const std::vector<Eigen::Vector3d>& points,
                                           int target, double min_spacing = 0.0);

// Douglas-Peucker simplification; endpoints preserved, tolerance in meters.
std::vector<Eigen::Vector3d> douglas_peucker(const std::vector<Eigen::Vector3d>& line,
                                             double tolerance);

struct MedialAxisParams {
  ContractionParams contraction;
  MstOptions mst;
  int downsample_max_vertices = 500;  // 0 disables farthest-point downsampling
  // Skeleton node spacing floor as a multiple of the instance's mean
  // nearest-neighbor distance; keeps node spacing well above the residual
  // transverse scatter so the MST cannot zigzag into spurious branches.
  double downsample_min_spacing_factor = 2.0;
  double simplify_tolerance = 0.001;  // meters; 0 disables Douglas-Peucker
};

// contract -> weld duplicates -> farthest-point downsample -> MST ->
// partition at branching nodes -> simplify.
MedialAxis extract_medial_axis(const InstanceCloud& instance,
                               const MedialAxisParams& params = {});

}  // namespace enstrect
