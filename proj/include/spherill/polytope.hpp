#pragma once

// Spherical convex polytopes represented through their polyhedral cones:
// construction from vertices, face lattice, polarity, conjugate faces,
// partial flags and combinatorial comparison.

#include <cstdint>
#include <functional>
#include <optional>

#include "spherill/hull.hpp"

namespace spherill {

// Vertex index sets as 512-bit masks; polars of random 4-polytopes can carry
// a few hundred vertices.
struct Bits {
  static constexpr int kWords = 8;
  std::array<uint64_t, kWords> w{};

  void set(int i) { w[i >> 6] |= (1ULL << (i & 63)); }
  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1ULL; }
  Bits operator&(const Bits& o) const {
    Bits r;
    for (int k = 0; k < kWords; ++k) r.w[k] = w[k] & o.w[k];
    return r;
  }
  Bits operator|(const Bits& o) const {
    Bits r;
    for (int k = 0; k < kWords; ++k) r.w[k] = w[k] | o.w[k];
    return r;
  }
  bool operator==(const Bits& o) const { return w == o.w; }
  bool operator<(const Bits& o) const { return w < o.w; }
  bool none() const {
    for (uint64_t x : w)
      if (x) return false;
    return true;
  }
  bool subset_of(const Bits& o) const {
    for (int k = 0; k < kWords; ++k)
      if (w[k] & ~o.w[k]) return false;
    return true;
  }
  int count() const {
    int c = 0;
    for (uint64_t x : w) c += __builtin_popcountll(x);
    return c;
  }

  static Bits from(const std::vector<int>& idx) {
    Bits b;
    for (int i : idx) b.set(i);
    return b;
  }
  std::vector<int> indices(int n) const {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }
};

struct Face {
  uint64_t owner = 0;       // id of the owning polytope
  std::vector<int> verts;   // sorted vertex indices
  int dim = -1;             // spherical dimension (0 = vertex)
  Vec support_normal;       // greatsphere supporting the face
};

struct FaceLattice {
  int d = 0;
  int n_vertices = 0;
  std::vector<Face> faces;                  // all proper faces, sorted by (dim, verts)
  std::vector<std::vector<int>> by_dim;     // face indices per dimension
  std::vector<std::pair<int, int>> hasse;   // covering pairs (sub, super)

  std::vector<int> f_vector() const {
    std::vector<int> f;
    for (const auto& level : by_dim) f.push_back(static_cast<int>(level.size()));
    return f;
  }
  int find(const std::vector<int>& verts) const;
};

struct PartialFlag {
  std::vector<Face> chain;  // ascending dimensions, F_2 ... F_{d-1}; empty for d = 2
};

struct SphericalPolytope {
  int d = 0;
  std::vector<Vec> vertices;                    // canonical order, unit vectors in E^{d+1}
  std::vector<Vec> facet_normals;               // canonical order, unit; cone is <n,y> <= 0
  std::vector<std::vector<int>> facet_vertices; // sorted incidence per facet
  Vec hemisphere_center;                        // margin witness c
  double hemisphere_margin = 0.0;               // min_i <c, v_i>
  Tolerances tol;
  uint64_t id = 0;

  size_t ambient() const { return static_cast<size_t>(d) + 1; }

  // facets containing a given vertex (indices into facet_normals)
  std::vector<int> facets_of_vertex(int v) const {
    std::vector<int> out;
    for (size_t f = 0; f < facet_vertices.size(); ++f)
      if (std::binary_search(facet_vertices[f].begin(), facet_vertices[f].end(), v))
        out.push_back(static_cast<int>(f));
    return out;
  }

  Vec vertex_centroid_unit() const {
    Vec c = zeros(ambient());
    for (const Vec& v : vertices) c += v;
    return (1.0 / norm(c)) * c;
  }
};

SphericalPolytope from_vertices(int d, const std::vector<Vec>& points,
                                const Tolerances& tol = Tolerances{});

FaceLattice face_lattice(const SphericalPolytope& p);

SphericalPolytope polar(const SphericalPolytope& p);

Face minimal_face_containing(const SphericalPolytope& p, const UnitPoint& q);

// Conjugate face lives in polar(p); verts index polar(p).vertices.
Face conjugate_face(const SphericalPolytope& p, const Face& f);

// Same, against a caller-supplied polar (avoids recomputing it in loops).
Face conjugate_face(const SphericalPolytope& p, const Face& f,
                    const SphericalPolytope& polar_p);

// Coordinates of the conjugate face's vertices (facet normals of p containing f).
std::vector<Vec> conjugate_vertex_coords(const SphericalPolytope& p, const Face& f);

PartialFlag find_partial_flag(const SphericalPolytope& p);

// Dimension- and inclusion-preserving bijection between lattices; returns a
// vertex bijection (l1 vertex i -> l2 vertex map[i]) when isomorphic.
std::optional<std::vector<int>> lattice_isomorphic(const FaceLattice& l1,
                                                   const FaceLattice& l2);

// Shared closure machinery: builds the graded lattice generated by the facet
// vertex sets; dim_of must return the face dimension of a vertex index set.
FaceLattice closure_lattice(int n_vertices, int d,
                            const std::vector<std::vector<int>>& facet_vertices,
                            const std::function<int(const std::vector<int>&)>& dim_of);

// Validates that `verts` is exactly a face of p (closure of itself).
bool is_face_of(const SphericalPolytope& p, const std::vector<int>& verts);

// Canonical fixtures used across tests and docs.
SphericalPolytope spherical_simplex(int d, const Tolerances& tol = Tolerances{});

}  // namespace spherill
