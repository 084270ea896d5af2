#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

#include "enstrect/clustering.hpp"

namespace enstrect {

struct ContractionParams {
  int k = 8;                       // Laplacian neighborhood size
  double w_l0 = 1.0;               // initial contraction weight, as a multiplier
                                   // on 1/(10 * mean initial k-NN extent)
  double w_h0 = 1.0;               // initial per-point attraction weight
  double s_l = 3.0;                // contraction amplification per iteration
  int max_iterations = 20;
  double convergence_ratio = 0.01; // stop when mean extent shrinks below this fraction
  // Stop when an iteration improves the mean extent by less than this
  // fraction. Thin inputs finish their transverse collapse in one or two
  // iterations; amplified follow-up iterations would only slide points
  // along the skeleton and wreck junctions.
  double stall_ratio = 0.05;
  double w_l_max = 1e6;            // conditioning guards on the weight schedule
  double w_h_max = 1e6;
  void validate() const;
};

struct ContractionDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> mean_extent;     // [0] is the initial extent, then one per iteration
  std::vector<double> energy_before;   // quadratic energy at fixed weights, previous points
  std::vector<double> energy_after;    // same weights, solved points
};

struct ContractionResult {
  std::vector<Eigen::Vector3d> points;
  ContractionDiagnostics diagnostics;
};

// Graph Laplacian L = D - W on the k-NN graph with Gaussian edge weights
// w_ab = exp(-|pa-pb|^2 / sigma^2), sigma = mean k-NN distance. Rows sum to
// zero. Throws if the graph is disconnected (reports component count).
Eigen::SparseMatrix<double> build_laplacian(const std::vector<Eigen::Vector3d>& points, int k);

// Iterative least-squares contraction: each iteration solves the stacked
// system [w_l * L; diag(w_h)] P' = [0; w_h . P] per coordinate, then
// amplifies the contraction weight, refreshes the attraction weights from
// the local neighborhood extents, and rebuilds the Laplacian.
ContractionResult contract_points(const std::vector<Eigen::Vector3d>& points,
                                  const ContractionParams& params);
ContractionResult contract(const InstanceCloud& instance, const ContractionParams& params);

// Quadratic contraction energy |w_l L X|^2 + sum_i w_h_i^2 |x_i - anchor_i|^2
// evaluated at X. Exposed for the per-iteration energy-decrease property.
double contraction_energy(const Eigen::SparseMatrix<double>& laplacian, double w_l,
                          const std::vector<double>& w_h,
                          const std::vector<Eigen::Vector3d>& x,
                          const std::vector<Eigen::Vector3d>& anchor);

}  // namespace enstrect
