#include "enstrect/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

struct Tri {
  int v[3];    // CCW
  int nbr[3];  // nbr[i] is across edge (v[i], v[(i+1)%3]); -1 at the hull
  bool alive = true;
};

long double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  const long double abx = static_cast<long double>(b.x()) - a.x();
  const long double aby = static_cast<long double>(b.y()) - a.y();
  const long double acx = static_cast<long double>(c.x()) - a.x();
  const long double acy = static_cast<long double>(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// > 0 when p lies strictly inside the circumcircle of CCW triangle (a,b,c).
long double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const Eigen::Vector2d& c, const Eigen::Vector2d& p) {
  const long double ax = static_cast<long double>(a.x()) - p.x();
  const long double ay = static_cast<long double>(a.y()) - p.y();
  const long double bx = static_cast<long double>(b.x()) - p.x();
  const long double by = static_cast<long double>(b.y()) - p.y();
  const long double cx = static_cast<long double>(c.x()) - p.x();
  const long double cy = static_cast<long double>(c.y()) - p.y();
  const long double a2 = ax * ax + ay * ay;
  const long double b2 = bx * bx + by * by;
  const long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double jitter_unit(std::uint64_t seed) {
  return static_cast<double>(splitmix64(seed) >> 11) / 9007199254740992.0 * 2.0 - 1.0;
}

}  // namespace

double circumradius(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c) {
  const double la = (b - c).norm();
  const double lb = (a - c).norm();
  const double lc = (a - b).norm();
  const double area2 = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  if (area2 <= 0.0) return std::numeric_limits<double>::infinity();
  return la * lb * lc / (2.0 * area2);
}

std::vector<DelaunayTriangle> delaunay_triangulation(const std::vector<Eigen::Vector2d>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw ValidationError("delaunay: need at least 3 points");

  Eigen::Vector2d lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diag = std::max((hi - lo).norm(), 1e-30);

  bool collinear = true;
  for (int i = 2; i < n && collinear; ++i)
    if (std::abs(static_cast<double>(orient(points[0], points[1], points[i]))) >
        1e-12 * diag * diag)
      collinear = false;
  if (collinear) throw ValidationError("delaunay: all points are collinear");

  // Working coordinates with a deterministic microscopic jitter; breaks
  // exact cocircularity (grids) without moving any alpha-scale decision.
  std::vector<Eigen::Vector2d> work(n + 3);
  for (int i = 0; i < n; ++i) {
    const double jx = jitter_unit(2 * static_cast<std::uint64_t>(i)) * 1e-7 * diag;
    const double jy = jitter_unit(2 * static_cast<std::uint64_t>(i) + 1) * 1e-7 * diag;
    work[i] = points[i] + Eigen::Vector2d(jx, jy);
  }
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  work[n] = mid + Eigen::Vector2d(0.0, 40.0 * diag);
  work[n + 1] = mid + Eigen::Vector2d(-40.0 * diag, -30.0 * diag);
  work[n + 2] = mid + Eigen::Vector2d(40.0 * diag, -30.0 * diag);

  std::vector<Tri> tris;
  tris.push_back(Tri{{n, n + 1, n + 2}, {-1, -1, -1}, true});

  // Insert points sorted along x for short location walks.
  std::vector<int> insert_order(n);
  std::iota(insert_order.begin(), insert_order.end(), 0);
  std::sort(insert_order.begin(), insert_order.end(), [&](int a, int b) {
    if (work[a].x() != work[b].x()) return work[a].x() < work[b].x();
    if (work[a].y() != work[b].y()) return work[a].y() < work[b].y();
    return a < b;
  });

  auto contains = [&](int t, const Eigen::Vector2d& p) {
    return orient(work[tris[t].v[0]], work[tris[t].v[1]], p) >= 0 &&
           orient(work[tris[t].v[1]], work[tris[t].v[2]], p) >= 0 &&
           orient(work[tris[t].v[2]], work[tris[t].v[0]], p) >= 0;
  };

  auto locate = [&](int hint, const Eigen::Vector2d& p) -> int {
    int t = hint;
    for (std::size_t step = 0; step < 4 * tris.size() + 16; ++step) {
      if (t < 0 || !tris[t].alive) break;
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        if (orient(work[tris[t].v[e]], work[tris[t].v[(e + 1) % 3]], p) < 0) {
          next = tris[t].nbr[e];
          break;
        }
      }
      if (next == -1) return t;  // no edge has p strictly outside
      t = next;
    }
    for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
      if (tris[i].alive && contains(i, p)) return i;
    throw ProcessingError("delaunay: point location failed");
  };

  int hint = 0;
  std::vector<int> cavity, stack;
  std::vector<char> in_cavity;
  for (const int pi : insert_order) {
    const Eigen::Vector2d& p = work[pi];
    const int start = locate(hint, p);

    cavity.clear();
    stack.assign(1, start);
    in_cavity.assign(tris.size(), 0);
    in_cavity[start] = 1;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      for (int e = 0; e < 3; ++e) {
        const int nb = tris[t].nbr[e];
        if (nb < 0 || in_cavity[nb]) continue;
        if (in_circle(work[tris[nb].v[0]], work[tris[nb].v[1]], work[tris[nb].v[2]], p) > 0) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // Boundary edges (a -> b) keep the cavity (and p) on their left.
    struct BoundaryEdge {
      int a, b, outer;
    };
    std::vector<BoundaryEdge> boundary;
    for (const int t : cavity) {
      for (int e = 0; e < 3; ++e) {
        const int nb = tris[t].nbr[e];
        if (nb >= 0 && in_cavity[nb]) continue;
        boundary.push_back({tris[t].v[e], tris[t].v[(e + 1) % 3], nb});
      }
    }
    for (const int t : cavity) tris[t].alive = false;

    std::map<int, int> tri_starting_at;  // boundary start vertex -> new triangle
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& be : boundary) {
      const int id = static_cast<int>(tris.size());
      tris.push_back(Tri{{be.a, be.b, pi}, {be.outer, -1, -1}, true});
      if (be.outer >= 0) {
        for (int e = 0; e < 3; ++e)
          if (tris[be.outer].v[e] == be.b && tris[be.outer].v[(e + 1) % 3] == be.a)
            tris[be.outer].nbr[e] = id;
      }
      tri_starting_at[be.a] = id;
      created.push_back(id);
    }
    for (const int id : created)
      tris[id].nbr[1] = tri_starting_at.at(tris[id].v[1]);  // across (b, p)
    for (const int id : created)
      tris[tris[id].nbr[1]].nbr[2] = id;                    // across (p, a)
    hint = created.empty() ? hint : created.front();
  }

  std::vector<DelaunayTriangle> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(DelaunayTriangle{t.v[0], t.v[1], t.v[2]});
  }
  if (out.empty()) throw ProcessingError("delaunay: no triangles produced");
  return out;
}

}  // namespace enstrect
