#include "enstrect/contraction.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

// Mean distance to the k nearest neighbors, per point.
std::vector<double> neighborhood_extents(const std::vector<Eigen::Vector3d>& pts, int k) {
  const auto adj = knn_adjacency(pts, k);
  std::vector<double> extent(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double sum = 0.0;
    for (int j : adj[i]) sum += (pts[i] - pts[j]).norm();
    extent[i] = adj[i].empty() ? 0.0 : sum / static_cast<double>(adj[i].size());
  }
  return extent;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

int count_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<char> seen(n, 0);
  int components = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
  }
  return components;
}

}  // namespace

void ContractionParams::validate() const {
  if (k < 1 || !(w_l0 > 0.0) || !(w_h0 > 0.0) || !(convergence_ratio > 0.0))
    throw ValidationError("contraction: parameters must be positive");
  if (!(s_l > 1.0)) throw ValidationError("contraction: s_l must be > 1");
  if (max_iterations < 1) throw ValidationError("contraction: max_iterations must be >= 1");
}

namespace {

std::vector<std::vector<int>> symmetrized_knn(const std::vector<Eigen::Vector3d>& points,
                                              int k) {
  const int n = static_cast<int>(points.size());
  auto adj = knn_adjacency(points, k);
  for (int i = 0; i < n; ++i)
    for (int j : adj[i])
      if (std::find(adj[j].begin(), adj[j].end(), i) == adj[j].end()) adj[j].push_back(i);
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

double mean_adjacency_distance(const std::vector<Eigen::Vector3d>& points,
                               const std::vector<std::vector<int>>& adj) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int j : adj[i]) {
      sum += (points[i] - points[j]).norm();
      ++count;
    }
  }
  return sum / static_cast<double>(std::max<std::size_t>(count, 1));
}

// Gaussian-weighted graph Laplacian over an explicit adjacency at a given
// kernel bandwidth.
Eigen::SparseMatrix<double> laplacian_from_adjacency(
    const std::vector<Eigen::Vector3d>& points, const std::vector<std::vector<int>>& adj,
    double sigma) {
  const int n = static_cast<int>(points.size());
  if (!(sigma > 0.0)) sigma = 1e-12;  // fully coincident neighborhoods
  const double inv_sigma2 = 1.0 / (sigma * sigma);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n * 8);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j : adj[i]) {
      const double w = std::exp(-(points[i] - points[j]).squaredNorm() * inv_sigma2);
      triplets.emplace_back(i, j, -w);
      diag += w;
    }
    triplets.emplace_back(i, i, diag);
  }
  Eigen::SparseMatrix<double> laplacian(n, n);
  laplacian.setFromTriplets(triplets.begin(), triplets.end());
  return laplacian;
}

}  // namespace

Eigen::SparseMatrix<double> build_laplacian(const std::vector<Eigen::Vector3d>& points, int k) {
  const int n = static_cast<int>(points.size());
  if (n < k + 1)
    throw ValidationError("build_laplacian: too few points for k=" + std::to_string(k));

  const auto adj = symmetrized_knn(points, k);
  const int components = count_components(adj);
  if (components > 1)
    throw ProcessingError("build_laplacian: k-NN graph has " + std::to_string(components) +
                          " disconnected components (clustering eps likely too large)");
  return laplacian_from_adjacency(points, adj, mean_adjacency_distance(points, adj));
}

double contraction_energy(const Eigen::SparseMatrix<double>& laplacian, double w_l,
                          const std::vector<double>& w_h,
                          const std::vector<Eigen::Vector3d>& x,
                          const std::vector<Eigen::Vector3d>& anchor) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd coords(n, 3);
  for (int i = 0; i < n; ++i) coords.row(i) = x[i];
  const Eigen::MatrixXd lx = laplacian * coords;
  double energy = w_l * w_l * lx.squaredNorm();
  for (int i = 0; i < n; ++i)
    energy += w_h[i] * w_h[i] * (x[i] - anchor[i]).squaredNorm();
  return energy;
}

ContractionResult contract_points(const std::vector<Eigen::Vector3d>& points,
                                  const ContractionParams& params) {
  params.validate();
  const int n = static_cast<int>(points.size());
  if (n < params.k + 1)
    throw ValidationError("contract: too few points for k=" + std::to_string(params.k));

  ContractionResult result;
  result.points = points;
  auto& diag = result.diagnostics;

  const std::vector<double> extent0 = neighborhood_extents(points, params.k);
  const double mean_extent0 = mean(extent0);
  if (!(mean_extent0 > 0.0))
    throw ValidationError("contract: degenerate input (all points coincide)");
  diag.mean_extent.push_back(mean_extent0);

  // Scale-adaptive initial contraction weight: w_l0 acts as a multiplier on
  // 1/(10 * mean neighborhood extent), following the contraction literature.
  // A fixed unitless weight under-contracts coarse clouds and over-contracts
  // dense ones.
  double w_l = params.w_l0 / (10.0 * mean_extent0);
  std::vector<double> w_h(n, params.w_h0);

  // The instance graph must be connected up front; during the iteration the
  // k-NN graph is rebuilt from the contracted points and unioned with these
  // initial edges, since clumping along the emerging skeleton would otherwise
  // disconnect it.
  const std::vector<std::vector<int>> initial_adj = symmetrized_knn(points, params.k);
  if (count_components(initial_adj) > 1)
    throw ProcessingError("contract: instance k-NN graph has " +
                          std::to_string(count_components(initial_adj)) +
                          " disconnected components (clustering eps likely too large)");
  // Kernel bandwidth stays at the input sampling scale; recomputing it from
  // contracted distances would zero out every cross-clump weight.
  const double sigma0 = mean_adjacency_distance(points, initial_adj);
  std::vector<double> anchor_extent0(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j : initial_adj[i]) anchor_extent0[i] += (points[i] - points[j]).norm();
    anchor_extent0[i] /= static_cast<double>(std::max<std::size_t>(initial_adj[i].size(), 1));
  }

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    Eigen::SparseMatrix<double> laplacian;
    if (iter == 0) {
      laplacian = laplacian_from_adjacency(result.points, initial_adj, sigma0);
    } else {
      auto adj = symmetrized_knn(result.points, params.k);
      for (int i = 0; i < n; ++i)
        for (int j : initial_adj[i])
          if (std::find(adj[i].begin(), adj[i].end(), j) == adj[i].end()) adj[i].push_back(j);
      for (auto& row : adj) std::sort(row.begin(), row.end());
      laplacian = laplacian_from_adjacency(result.points, adj, sigma0);
    }

    // Normal equations of the stacked system [w_l L; diag(w_h)].
    Eigen::SparseMatrix<double> normal = (w_l * w_l) *
        Eigen::SparseMatrix<double>(laplacian.transpose() * laplacian);
    std::vector<Eigen::Triplet<double>> diag_triplets;
    diag_triplets.reserve(n);
    for (int i = 0; i < n; ++i) diag_triplets.emplace_back(i, i, w_h[i] * w_h[i]);
    Eigen::SparseMatrix<double> attraction(n, n);
    attraction.setFromTriplets(diag_triplets.begin(), diag_triplets.end());
    normal += attraction;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(normal);
    if (solver.info() != Eigen::Success)
      throw ProcessingError("contract: factorization failed at iteration " + std::to_string(iter));

    Eigen::MatrixXd rhs(n, 3);
    for (int i = 0; i < n; ++i) rhs.row(i) = (w_h[i] * w_h[i]) * result.points[i];
    const Eigen::MatrixXd solution = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
      throw ProcessingError("contract: solve failed at iteration " + std::to_string(iter));

    std::vector<Eigen::Vector3d> next(n);
    for (int i = 0; i < n; ++i) next[i] = solution.row(i);

    diag.energy_before.push_back(
        contraction_energy(laplacian, w_l, w_h, result.points, result.points));
    diag.energy_after.push_back(contraction_energy(laplacian, w_l, w_h, next, result.points));

    const std::vector<double> extent = neighborhood_extents(next, params.k);
    const double mean_extent = mean(extent);
    if (mean_extent > diag.mean_extent.back() * (1.0 + 1e-9)) break;  // regressed: keep previous

    result.points = std::move(next);
    diag.mean_extent.push_back(mean_extent);
    diag.iterations = iter + 1;

    if (mean_extent < params.convergence_ratio * mean_extent0) {
      diag.converged = true;
      break;
    }
    const double prev = diag.mean_extent[diag.mean_extent.size() - 2];
    if (prev - mean_extent < params.stall_ratio * prev) {
      diag.converged = true;  // transverse collapse finished
      break;
    }

    w_l = std::min(w_l * params.s_l, params.w_l_max);
    // Attraction responds to structural shrinkage measured over the fixed
    // initial adjacency; fresh-kNN extents collapse with the clumps and
    // would freeze the transverse consensus early.
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j : initial_adj[i]) s += (result.points[i] - result.points[j]).norm();
      s /= static_cast<double>(std::max<std::size_t>(initial_adj[i].size(), 1));
      s = std::max(s, 1e-12 * mean_extent0);
      w_h[i] = std::min(params.w_h0 * anchor_extent0[i] / s, params.w_h_max);
    }
  }
  return result;
}

ContractionResult contract(const InstanceCloud& instance, const ContractionParams& params) {
  if (instance.positions.empty()) throw ValidationError("contract: empty instance");
  return contract_points(instance.positions, params);
}

}  // namespace enstrect
