#pragma once

// Incremental convex hull in R^n for small n (2..5) with merged coplanar
// facets, plus Wolfe's minimum-norm-point algorithm over a finite point set.
//
// The hull keeps simplicial facets during insertion and only skips points
// lying on (not beyond) current facet planes; since the hull only grows, a
// skipped point can never become strictly exterior later, so the final facet
// planes are exact for the input set. Vertex status and facet incidence are
// recovered afterwards from the merged planes: a point is a hull vertex iff
// the normals of its incident facets span R^n.

#include <map>
#include <optional>
#include <set>

#include "spherill/core.hpp"

namespace spherill {

struct HullFacet {
  Vec normal;              // unit outer normal
  double offset = 0.0;     // facet plane { x : <normal, x> = offset }
  std::vector<int> verts;  // indices of hull vertices on the facet, sorted
};

struct HullResult {
  std::vector<HullFacet> facets;
  std::vector<int> vertices;  // indices of extreme input points, sorted
};

namespace hull_detail {

struct SimpFacet {
  std::vector<int> verts;      // n vertex indices
  std::vector<int> neighbors;  // neighbors[i] lies across the ridge omitting verts[i]
  Vec normal;
  double offset = 0.0;
  bool alive = true;
};

inline void facet_plane(const std::vector<Vec>& pts, SimpFacet& f,
                        const Vec& interior, double eps_rank) {
  const size_t n = pts[0].size();
  std::vector<Vec> rows;
  const Vec& base = pts[f.verts[0]];
  for (size_t i = 1; i < f.verts.size(); ++i) rows.push_back(pts[f.verts[i]] - base);
  f.normal = nullspace1(rows, n, eps_rank);
  f.offset = dot(f.normal, base);
  if (dot(f.normal, interior) > f.offset) {
    f.normal = -f.normal;
    f.offset = -f.offset;
  }
}

}  // namespace hull_detail

inline HullResult convex_hull(const std::vector<Vec>& pts) {
  using hull_detail::SimpFacet;
  const size_t n = pts.empty() ? 0 : pts[0].size();
  const size_t npts = pts.size();
  if (npts < n + 1)
    fail(Err::DegenerateDimension, "too few points for a full-dimensional hull");

  double scale = 1e-300;
  for (const Vec& p : pts)
    for (double x : p) scale = std::max(scale, std::fabs(x));
  // eps_vis sits well above coordinate noise so exactly-coplanar points are
  // classified "not beyond" and never spawn sliver facets
  const double eps_vis = 1e-9 * scale;
  const double eps_on = 1e-8 * scale;
  const double eps_rank = 1e-7;

  // initial affinely independent simplex, greedy by orthogonal residual
  std::vector<int> simplex;
  {
    int start = 0;
    for (size_t i = 1; i < npts; ++i)
      if (pts[i] < pts[start]) start = static_cast<int>(i);
    simplex.push_back(start);
    std::vector<Vec> basis;  // orthonormal directions of the affine span
    while (simplex.size() < n + 1) {
      int best = -1;
      double best_res = 0.0;
      Vec best_dir;
      for (size_t i = 0; i < npts; ++i) {
        Vec w = pts[i] - pts[simplex[0]];
        for (const Vec& b : basis) w -= dot(w, b) * b;
        double r = norm(w);
        if (r > best_res) {
          best_res = r;
          best = static_cast<int>(i);
          best_dir = w;
        }
      }
      if (best < 0 || best_res <= 1e-9 * scale)
        fail(Err::DegenerateDimension, "input points span a lower-dimensional flat");
      basis.push_back((1.0 / best_res) * best_dir);
      simplex.push_back(best);
    }
  }

  Vec interior = zeros(n);
  for (int i : simplex) interior += pts[i];
  interior *= 1.0 / static_cast<double>(simplex.size());

  std::vector<SimpFacet> facets;
  for (size_t skip = 0; skip < simplex.size(); ++skip) {
    SimpFacet f;
    for (size_t i = 0; i < simplex.size(); ++i)
      if (i != skip) f.verts.push_back(simplex[i]);
    f.neighbors.assign(n, -1);
    hull_detail::facet_plane(pts, f, interior, eps_rank);
    facets.push_back(std::move(f));
  }
  // wire the initial simplex: facet skip=i and skip=j share the ridge lacking both
  for (size_t i = 0; i < facets.size(); ++i)
    for (size_t j = 0; j < facets.size(); ++j) {
      if (i == j) continue;
      // neighbor of facet i across the ridge omitting vertex simplex[j]
      int v = simplex[j];
      for (size_t k = 0; k < facets[i].verts.size(); ++k)
        if (facets[i].verts[k] == v) facets[i].neighbors[k] = static_cast<int>(j);
    }

  std::set<int> in_simplex(simplex.begin(), simplex.end());
  for (size_t pi = 0; pi < npts; ++pi) {
    if (in_simplex.count(static_cast<int>(pi))) continue;
    const Vec& p = pts[pi];
    std::vector<int> visible;
    for (size_t fi = 0; fi < facets.size(); ++fi)
      if (facets[fi].alive && dot(facets[fi].normal, p) > facets[fi].offset + eps_vis)
        visible.push_back(static_cast<int>(fi));
    if (visible.empty()) continue;
    std::set<int> vis(visible.begin(), visible.end());

    // horizon ridges: (ridge verts, outside neighbor, slot in that neighbor)
    struct Horizon {
      std::vector<int> ridge;
      int neighbor;
    };
    std::vector<Horizon> horizon;
    for (int fi : visible) {
      const SimpFacet& f = facets[fi];
      for (size_t k = 0; k < f.verts.size(); ++k) {
        int g = f.neighbors[k];
        if (g >= 0 && !vis.count(g)) {
          std::vector<int> ridge;
          for (size_t t = 0; t < f.verts.size(); ++t)
            if (t != k) ridge.push_back(f.verts[t]);
          std::sort(ridge.begin(), ridge.end());
          horizon.push_back({std::move(ridge), g});
        }
      }
    }
    for (int fi : visible) facets[fi].alive = false;

    // new facet per horizon ridge
    std::map<std::vector<int>, std::pair<int, int>> ridge_map;  // sub-ridge -> (facet, slot)
    for (const Horizon& h : horizon) {
      SimpFacet f;
      f.verts = h.ridge;
      f.verts.push_back(static_cast<int>(pi));
      std::sort(f.verts.begin(), f.verts.end());
      f.neighbors.assign(n, -1);
      hull_detail::facet_plane(pts, f, interior, eps_rank);
      int fid = static_cast<int>(facets.size());

      for (size_t k = 0; k < f.verts.size(); ++k) {
        std::vector<int> sub;
        for (size_t t = 0; t < f.verts.size(); ++t)
          if (t != k) sub.push_back(f.verts[t]);
        if (f.verts[k] == static_cast<int>(pi)) {
          // ridge not containing p: this is the horizon ridge, neighbor known
          f.neighbors[k] = h.neighbor;
          SimpFacet& g = facets[h.neighbor];
          for (size_t t = 0; t < g.verts.size(); ++t) {
            std::vector<int> gsub;
            for (size_t u = 0; u < g.verts.size(); ++u)
              if (u != t) gsub.push_back(g.verts[u]);
            std::sort(gsub.begin(), gsub.end());
            if (gsub == h.ridge) g.neighbors[t] = fid;
          }
        } else {
          auto it = ridge_map.find(sub);
          if (it == ridge_map.end()) {
            ridge_map[sub] = {fid, static_cast<int>(k)};
          } else {
            f.neighbors[k] = it->second.first;
            facets[it->second.first].neighbors[it->second.second] = fid;
          }
        }
      }
      facets.push_back(std::move(f));
    }
  }

  // cluster coplanar simplicial facets into merged planes
  struct Plane {
    Vec normal;
    double offset;
  };
  std::vector<Plane> planes;
  for (const SimpFacet& f : facets) {
    if (!f.alive) continue;
    bool found = false;
    for (Plane& pl : planes) {
      if (dot(pl.normal, f.normal) > 1.0 - 1e-8 &&
          std::fabs(pl.offset - f.offset) < 1e-7 * scale) {
        found = true;
        break;
      }
    }
    if (!found) planes.push_back({f.normal, f.offset});
  }

  // refit each plane to all incident points (stabilizes merged facets)
  for (Plane& pl : planes) {
    std::vector<int> on;
    for (size_t i = 0; i < npts; ++i)
      if (std::fabs(dot(pl.normal, pts[i]) - pl.offset) <= eps_on)
        on.push_back(static_cast<int>(i));
    if (on.size() < n) continue;
    Vec centroid = zeros(n);
    for (int i : on) centroid += pts[i];
    centroid *= 1.0 / static_cast<double>(on.size());
    std::vector<Vec> rows;
    for (int i : on) rows.push_back(pts[i] - centroid);
    Vec sing;
    Mat vecs;
    gram_svd(rows, n, sing, vecs);
    Vec nrm = vecs.row(n - 1);
    double nn = norm(nrm);
    if (nn < 0.5) continue;
    nrm *= 1.0 / nn;
    if (dot(nrm, pl.normal) < 0.0) nrm = -nrm;
    pl.normal = nrm;
    pl.offset = dot(nrm, centroid);
  }

  // incidence + vertex recovery
  std::vector<std::vector<int>> on_plane(planes.size());
  std::vector<std::vector<int>> planes_of_point(npts);
  for (size_t pi = 0; pi < planes.size(); ++pi) {
    for (size_t i = 0; i < npts; ++i) {
      double d = dot(planes[pi].normal, pts[i]) - planes[pi].offset;
      if (d > eps_on)
        fail(Err::DegenerateDimension, "hull facet plane violated; input too degenerate");
      if (std::fabs(d) <= eps_on) {
        on_plane[pi].push_back(static_cast<int>(i));
        planes_of_point[i].push_back(static_cast<int>(pi));
      }
    }
  }

  HullResult out;
  std::vector<bool> is_vertex(npts, false);
  for (size_t i = 0; i < npts; ++i) {
    if (planes_of_point[i].size() < n) continue;
    std::vector<Vec> rows;
    for (int pi : planes_of_point[i]) rows.push_back(planes[pi].normal);
    if (numeric_rank(rows, n, eps_rank) == n) {
      is_vertex[i] = true;
      out.vertices.push_back(static_cast<int>(i));
    }
  }
  for (size_t pi = 0; pi < planes.size(); ++pi) {
    HullFacet hf;
    hf.normal = planes[pi].normal;
    hf.offset = planes[pi].offset;
    for (int i : on_plane[pi])
      if (is_vertex[i]) hf.verts.push_back(i);
    if (hf.verts.size() < n)
      fail(Err::DegenerateDimension, "facet with too few vertices");
    out.facets.push_back(std::move(hf));
  }
  return out;
}

// Minimum-norm point of conv(points) by Wolfe's algorithm. Returns the point;
// its norm is the maximal hemisphere margin when the inputs are unit vectors.
inline Vec min_norm_point(const std::vector<Vec>& points) {
  const size_t npts = points.size();
  if (npts == 0) fail(Err::ZeroVector, "min_norm_point: empty set");
  const size_t n = points[0].size();

  size_t start = 0;
  for (size_t i = 1; i < npts; ++i)
    if (norm2(points[i]) < norm2(points[start])) start = i;

  std::vector<size_t> corral{start};
  std::vector<double> alpha{1.0};
  Vec x = points[start];

  auto affine_min = [&](std::vector<double>& lam) {
    const size_t k = corral.size();
    Mat m(k + 1, k + 1);
    Vec rhs(k + 1, 0.0);
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = 0; j < k; ++j) m(i, j) = dot(points[corral[i]], points[corral[j]]);
      m(i, i) += 1e-14;
      m(i, k) = m(k, i) = 1.0;
    }
    rhs[k] = 1.0;
    Vec sol = solve_linear(m, rhs);
    lam.assign(sol.begin(), sol.begin() + k);
  };

  for (int iter = 0; iter < 500; ++iter) {
    // most violated point
    size_t jmin = 0;
    double vmin = dot(x, points[0]);
    for (size_t i = 1; i < npts; ++i) {
      double v = dot(x, points[i]);
      if (v < vmin) { vmin = v; jmin = i; }
    }
    double xx = norm2(x);
    if (vmin >= xx - 1e-14 * std::max(1.0, xx)) break;
    bool present = false;
    for (size_t c : corral)
      if (c == jmin) present = true;
    if (present) break;
    corral.push_back(jmin);
    alpha.push_back(0.0);

    for (int minor = 0; minor < 100; ++minor) {
      std::vector<double> lam;
      affine_min(lam);
      bool ok = true;
      for (double l : lam)
        if (l < -1e-12) ok = false;
      if (ok) {
        alpha = lam;
        break;
      }
      double theta = 1.0;
      for (size_t i = 0; i < lam.size(); ++i)
        if (lam[i] < -1e-12) theta = std::min(theta, alpha[i] / (alpha[i] - lam[i]));
      for (size_t i = 0; i < lam.size(); ++i)
        alpha[i] = (1.0 - theta) * alpha[i] + theta * lam[i];
      std::vector<size_t> nc;
      std::vector<double> na;
      for (size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 1e-12) {
          nc.push_back(corral[i]);
          na.push_back(alpha[i]);
        }
      double asum = 0.0;
      for (double a : na) asum += a;
      for (double& a : na) a /= asum;
      corral = std::move(nc);
      alpha = std::move(na);
    }
    x = zeros(n);
    for (size_t i = 0; i < corral.size(); ++i) x += alpha[i] * points[corral[i]];
  }
  return x;
}

}  // namespace spherill
