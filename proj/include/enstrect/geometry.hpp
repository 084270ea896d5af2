#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace enstrect {

// Point cloud in world coordinates (meters). Normals, when present, are
// unit length; colors are 8-bit RGB. Parallel arrays share the point index.
struct PointCloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> normals;                 // empty or size()
  std::vector<std::array<std::uint8_t, 3>> colors;      // empty or size()

  std::size_t size() const { return positions.size(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_colors() const { return !colors.empty(); }

  // Throws ValidationError if parallel arrays disagree, a coordinate is
  // non-finite, or a stored normal is not unit length within 1e-6.
  void validate() const;
};

// Static bucketed kd-tree over a borrowed point array. Neighbor ties at
// equal distance are broken by lexicographic coordinate comparison (then
// index), so query results do not depend on the input point order.
class KdTree {
 public:
  explicit KdTree(const std::vector<Eigen::Vector3d>& points);

  // Indices of the k nearest neighbors of `query`, nearest first.
  // `skip` excludes one index (typically the query point itself).
  std::vector<int> knn(const Eigen::Vector3d& query, int k, int skip = -1) const;

  // All indices with squared distance <= r2, in ascending index order.
  std::vector<int> radius(const Eigen::Vector3d& query, double r2) const;

 private:
  struct Node {
    int axis = -1;          // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  struct Candidate {
    double d2;
    int index;
  };

  bool closer(const Candidate& a, const Candidate& b) const;
  int build(int begin, int end);

  const std::vector<Eigen::Vector3d>* points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// Undirected weighted neighbor graph; weights are Euclidean distances.
struct NeighborGraph {
  int node_count = 0;
  int k = 0;  // construction parameter (0 when not built from k-NN)
  std::vector<std::pair<int, int>> edges;  // a < b, unique, sorted
  std::vector<double> weights;
  std::vector<std::vector<std::pair<int, double>>> adjacency;

  int degree(int node) const { return static_cast<int>(adjacency[node].size()); }
  void validate() const;

  // Deduplicates, symmetrizes and checks the invariants.
  static NeighborGraph from_edges(int node_count, int k,
                                  std::vector<std::pair<std::pair<int, int>, double>> raw);
};

struct NormalEstimationOptions {
  int k = 16;
  // Normals are flipped toward this point when set; otherwise toward the
  // +z hemisphere (canonical sign on ties).
  std::optional<Eigen::Vector3d> reference_viewpoint;
};

// PCA normals over each point's k nearest neighbors (smallest-eigenvalue
// direction of the neighborhood covariance).
PointCloud estimate_normals(const PointCloud& cloud, const NormalEstimationOptions& opts = {});

// k-NN graph, union-symmetrized. Rejects duplicate points (zero-length edges).
NeighborGraph build_knn_graph(const PointCloud& cloud, int k);

// Raw k-NN adjacency used by contraction internals; unlike build_knn_graph
// it tolerates coincident points.
std::vector<std::vector<int>> knn_adjacency(const std::vector<Eigen::Vector3d>& points, int k);

}  // namespace enstrect
