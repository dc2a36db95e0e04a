#pragma once

// Euclidean <-> spherical transfer: gnomonic embedding and projection, ideal
// direction extraction for lights on the equator, the Euclidean illumination
// checker, and the combinatorial-illumination pipeline.

#include "spherill/witness.hpp"

namespace spherill {

struct EuclideanPolytope {
  int d = 0;
  std::vector<Vec> vertices;                    // canonical order
  std::vector<Vec> facet_normals;               // unit outer normals
  std::vector<double> facet_offsets;            // facet { x : <n, x> = offset }
  std::vector<std::vector<int>> facet_vertices; // sorted incidence
  Tolerances tol;
  uint64_t id = 0;

  std::vector<int> facets_of_vertex(int v) const {
    std::vector<int> out;
    for (size_t f = 0; f < facet_vertices.size(); ++f)
      if (std::binary_search(facet_vertices[f].begin(), facet_vertices[f].end(), v))
        out.push_back(static_cast<int>(f));
    return out;
  }

  Face vertex_face(int vi) const {
    Face f;
    f.owner = id;
    f.verts = {vi};
    f.dim = 0;
    return f;
  }
};

// Facet enumeration reuses the cone-hull primitive via homogeneous lifting.
EuclideanPolytope euclidean_from_vertices(int d, const std::vector<Vec>& points,
                                          const Tolerances& tol = Tolerances{});

FaceLattice euclidean_face_lattice(const EuclideanPolytope& p);

bool euclidean_is_face_of(const EuclideanPolytope& p, const std::vector<int>& verts);

double default_embed_scale(const EuclideanPolytope& p);

// Inverse gnomonic map x -> normalize((scale*x, 1)); image sits in the open
// hemisphere around e_{d+1}.
SphericalPolytope embed(const EuclideanPolytope& p, double scale);

// Gnomonic projection of a spherical polytope to the tangent hyperplane at c,
// in the deterministic tangent frame of c.
EuclideanPolytope project(const SphericalPolytope& p, const Vec& c);

// Lights on the greatsphere around c become parallel illumination directions
// of the projected body; each light maps to minus itself in the tangent frame.
std::vector<Vec> ideal_directions(const std::vector<Vec>& lights, const Vec& c,
                                  const Tolerances& tol = Tolerances{});

struct EuclideanCheck {
  bool illuminated = false;
  double margin = 0.0;
};

EuclideanCheck euclidean_illuminates(const EuclideanPolytope& p, const Vec& direction,
                                     const Face& f);

struct EuclideanCertificate {
  std::vector<int> assignment;
  std::vector<double> margins;
  double min_margin = 0.0;
  bool fragile = false;
  Tolerances tol;
};

EuclideanCertificate euclidean_verify(const EuclideanPolytope& p,
                                      const std::vector<Vec>& directions);

struct CombinatorialResult {
  EuclideanPolytope image;         // P'', combinatorially equivalent to the input
  std::vector<Vec> directions;     // d+1 illuminating directions
  std::vector<int> vertex_bijection;  // input vertex -> image vertex
  EuclideanCertificate certificate;
  WitnessResult witness;           // the spherical stage (empty for d = 2)
};

CombinatorialResult combinatorial_illuminator(const EuclideanPolytope& p,
                                              uint64_t seed = 20240817ULL);

}  // namespace spherill
