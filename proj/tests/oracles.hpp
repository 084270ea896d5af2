// Independent reference implementations used as test oracles. These stay
// deliberately naive (quadratic scans, exhaustive enumeration) and must not
// share code with the library paths they check.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace oracles {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::vector<Eigen::Vector3d> random_cloud(std::size_t n, std::uint64_t seed,
                                                 double extent = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(-extent, extent);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = {uni(gen), uni(gen), uni(gen)};
  return pts;
}

inline Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss;
  Eigen::Quaterniond q(gauss(gen), gauss(gen), gauss(gen), gauss(gen));
  q.normalize();
  return q.toRotationMatrix();
}

// All-pairs k nearest neighbors with the same tie rule the library
// documents: distance, then lexicographic coordinates, then index.
inline std::vector<int> brute_knn(const std::vector<Eigen::Vector3d>& pts,
                                  const Eigen::Vector3d& query, int k, int skip) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    if (i != skip) idx.push_back(i);
  auto lex_less = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double da = (pts[a] - query).squaredNorm();
    const double db = (pts[b] - query).squaredNorm();
    if (da != db) return da < db;
    if (pts[a] != pts[b]) return lex_less(pts[a], pts[b]);
    return a < b;
  });
  idx.resize(std::min<std::size_t>(k, idx.size()));
  return idx;
}

// Textbook DBSCAN: all-pairs neighborhoods, explicit seed-set expansion.
inline std::vector<int> reference_dbscan(const std::vector<Eigen::Vector3d>& pts, double eps,
                                         int min_pts) {
  const int n = static_cast<int>(pts.size());
  const double eps2 = eps * eps;
  auto region = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
      if ((pts[i] - pts[j]).squaredNorm() <= eps2) out.push_back(j);
    return out;
  };
  std::vector<int> label(n, -2);
  int cluster = -1;
  for (int i = 0; i < n; ++i) {
    if (label[i] != -2) continue;
    auto seeds = region(i);
    if (static_cast<int>(seeds.size()) < min_pts) {
      label[i] = -1;
      continue;
    }
    ++cluster;
    label[i] = cluster;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const int j = seeds[s];
      if (label[j] == -1) label[j] = cluster;
      if (label[j] != -2) continue;
      label[j] = cluster;
      const auto reach = region(j);
      if (static_cast<int>(reach.size()) >= min_pts)
        seeds.insert(seeds.end(), reach.begin(), reach.end());
    }
  }
  return label;
}

// True iff two clusterings are identical up to a renaming of cluster ids
// (noise must match exactly).
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    const auto f = fwd.emplace(a[i], b[i]);
    if (!f.second && f.first->second != b[i]) return false;
    const auto g = bwd.emplace(b[i], a[i]);
    if (!g.second && g.first->second != a[i]) return false;
  }
  return true;
}

// Exhaustive minimum spanning tree weight via Prüfer sequences (n <= 8).
inline double exhaustive_mst_weight(const std::vector<Eigen::Vector3d>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n == 2) return (pts[0] - pts[1]).norm();
  auto weight = [&](int a, int b) { return (pts[a] - pts[b]).norm(); };

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> seq(n - 2, 0);
  while (true) {
    // Decode the Prufer sequence into tree edges.
    std::vector<int> degree(n, 1);
    for (int v : seq) ++degree[v];
    double total = 0.0;
    std::vector<int> deg = degree;
    std::vector<char> used(n, 0);
    for (int v : seq) {
      int leaf = -1;
      for (int u = 0; u < n; ++u) {
        if (!used[u] && deg[u] == 1) {
          leaf = u;
          break;
        }
      }
      total += weight(leaf, v);
      used[leaf] = 1;
      --deg[v];
    }
    int a = -1, b = -1;
    for (int u = 0; u < n; ++u) {
      if (!used[u] && deg[u] == 1) {
        if (a < 0)
          a = u;
        else
          b = u;
      }
    }
    total += weight(a, b);
    best = std::min(best, total);

    // Next sequence.
    int pos = n - 3;
    while (pos >= 0 && seq[pos] == n - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  return best;
}

inline double shoelace(const std::vector<Eigen::Vector2d>& loop) {
  double twice = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto& a = loop[i];
    const auto& b = loop[(i + 1) % loop.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

inline bool point_in_loop(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& loop,
                          double boundary_tol = 1e-12) {
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Eigen::Vector2d a = loop[i];
    const Eigen::Vector2d b = loop[(i + 1) % loop.size()];
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    if ((p - (a + t * ab)).norm() <= boundary_tol) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    if ((loop[i].y() > p.y()) != (loop[j].y() > p.y()) &&
        p.x() < (loop[j].x() - loop[i].x()) * (p.y() - loop[i].y()) /
                    (loop[j].y() - loop[i].y()) +
                loop[i].x())
      inside = !inside;
  }
  return inside;
}

// Segment vs axis-aligned-in-z rectangle (slab) intersection for the
// ray-cast visibility oracle. Rectangle is {x in [x0,x1], y in [y0,y1],
// z == z0}.
inline bool segment_hits_rectangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                   double x0, double x1, double y0, double y1, double z0) {
  const double dz = b.z() - a.z();
  if (std::abs(dz) < 1e-15) return false;
  const double t = (z0 - a.z()) / dz;
  if (t <= 1e-9 || t >= 1.0 - 1e-9) return false;
  const Eigen::Vector3d q = a + t * (b - a);
  return q.x() >= x0 && q.x() <= x1 && q.y() >= y0 && q.y() <= y1;
}

}  // namespace oracles
