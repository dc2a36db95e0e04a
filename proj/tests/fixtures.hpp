#pragma once

// Shared test fixtures: canonical polytopes and seeded random generators.

#include "spherill/bridge.hpp"
#include "spherill/koebe.hpp"

namespace spherill::fixtures {

inline SphericalPolytope oct() { return spherical_simplex(2); }

inline EuclideanPolytope cube3() {
  std::vector<Vec> pts;
  for (int s = 0; s < 8; ++s)
    pts.push_back({s & 1 ? 1.0 : -1.0, s & 2 ? 1.0 : -1.0, s & 4 ? 1.0 : -1.0});
  return euclidean_from_vertices(3, pts);
}

inline EuclideanPolytope dodecahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double inv = 1.0 / phi;
  std::vector<Vec> pts;
  for (int s = 0; s < 8; ++s)
    pts.push_back({s & 1 ? 1.0 : -1.0, s & 2 ? 1.0 : -1.0, s & 4 ? 1.0 : -1.0});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double u = a ? inv : -inv, w = b ? phi : -phi;
      pts.push_back({0.0, u, w});
      pts.push_back({u, w, 0.0});
      pts.push_back({w, 0.0, u});
    }
  return euclidean_from_vertices(3, pts);
}

inline EuclideanPolytope regular_tetrahedron() {
  return euclidean_from_vertices(
      3, {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
}

// Random spherical polytope: points in a cap of angular radius < pi/2 around
// a random center, biased toward the cap boundary so most points stay
// extreme; retried until the hull is full-dimensional with enough vertices.
inline SphericalPolytope random_spolytope(int d, int npts, Rng& rng,
                                          double cap_cos = 0.45,
                                          int min_vertices = -1) {
  const size_t amb = static_cast<size_t>(d) + 1;
  if (min_vertices < 0) min_vertices = d + 2;
  for (int attempt = 0; attempt < 80; ++attempt) {
    Vec center = rng.unit_vector(amb);
    std::vector<Vec> frame = complete_basis({center}, amb);
    std::vector<Vec> pts;
    for (int i = 0; i < npts; ++i) {
      // cos(angle) in a thin band near the cap rim
      double c = cap_cos + (1.0 - cap_cos) * 0.25 * rng.next_double();
      double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      Vec t = rng.unit_vector(amb - 1);
      Vec p = c * center;
      for (size_t k = 0; k + 1 < amb; ++k) p += (s * t[k]) * frame[k + 1];
      pts.push_back((1.0 / norm(p)) * p);
    }
    try {
      SphericalPolytope sp = from_vertices(d, pts);
      if (static_cast<int>(sp.vertices.size()) < min_vertices) continue;
      // reject ill-conditioned instances: near-parallel facet pairs defeat
      // the dedup tolerance once the polytope is polarized
      double closest = 1.0;
      for (size_t i = 0; i < sp.facet_normals.size(); ++i)
        for (size_t j = i + 1; j < sp.facet_normals.size(); ++j)
          closest = std::min(closest, 1.0 - dot(sp.facet_normals[i], sp.facet_normals[j]));
      if (closest > 1e-6) return sp;
    } catch (const Error&) {
    }
  }
  fail(Err::ConstructionFailed, "random polytope generation kept failing");
}

inline EuclideanPolytope random_3polytope(int npts, Rng& rng) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<Vec> pts;
    for (int i = 0; i < npts; ++i) pts.push_back(rng.unit_vector(3));
    try {
      return euclidean_from_vertices(3, pts);
    } catch (const Error&) {
    }
  }
  fail(Err::ConstructionFailed, "random 3-polytope generation kept failing");
}

}  // namespace spherill::fixtures
