#include "doctest.h"
#include "fixtures.hpp"
#include "spherill/polytope.hpp"

using namespace spherill;
using namespace spherill::fixtures;

namespace {

bool has_vertex(const SphericalPolytope& p, const Vec& v, double eps = 1e-9) {
  for (const Vec& u : p.vertices)
    if (dist(u, v) < eps) return true;
  return false;
}

bool same_vertex_sets(const SphericalPolytope& a, const SphericalPolytope& b,
                      double eps = 1e-7) {
  if (a.vertices.size() != b.vertices.size()) return false;
  for (const Vec& v : a.vertices) {
    bool found = false;
    for (const Vec& u : b.vertices)
      if (dist(u, v) < eps) found = true;
    if (!found) return false;
  }
  return true;
}

// brute-force conjugate face via the defining equation: polar vertices x with
// <x, y> = 0 for all y in F
std::vector<Vec> conjugate_oracle(const SphericalPolytope& p, const Face& f) {
  SphericalPolytope q = polar(p);
  std::vector<Vec> out;
  for (const Vec& x : q.vertices) {
    bool all_zero = true;
    for (int vi : f.verts)
      if (std::fabs(dot(x, p.vertices[vi])) > 1e-7) all_zero = false;
    if (all_zero) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("orthant triangle: facets, margin, center") {
  SphericalPolytope p = oct();
  CHECK(p.vertices.size() == 3);
  CHECK(p.facet_normals.size() == 3);
  CHECK(has_vertex(p, {1, 0, 0}));
  for (const Vec& n : p.facet_normals) {
    // each normal is -e_k
    int nonzero = 0;
    for (double x : n) {
      if (std::fabs(x + 1.0) < 1e-12) ++nonzero;
      else CHECK(std::fabs(x) < 1e-12);
    }
    CHECK(nonzero == 1);
  }
  double s = 1.0 / std::sqrt(3.0);
  CHECK(std::fabs(p.hemisphere_margin - s) < 1e-10);
  CHECK(dist(p.hemisphere_center, {s, s, s}) < 1e-9);
}

TEST_CASE("from_vertices rejects bad inputs") {
  CHECK_THROWS_AS(from_vertices(2, {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}}), Error);
  try {
    from_vertices(2, {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}});
  } catch (const Error& e) {
    CHECK(e.code == Err::NotInOpenHemisphere);
  }
  double s = 1.0 / std::sqrt(2.0);
  try {
    from_vertices(2, {{1, 0, 0}, {0, 1, 0}, {s, s, 0}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::DegenerateDimension);
  }
}

TEST_CASE("coincident vertices merge silently") {
  SphericalPolytope p =
      from_vertices(2, {{1, 0, 0}, {1, 1e-9, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(p.vertices.size() == 3);
}

TEST_CASE("non-extreme points are discarded") {
  double s = 1.0 / std::sqrt(2.0);
  SphericalPolytope p =
      from_vertices(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {s, s, 0}});
  CHECK(p.vertices.size() == 3);  // the edge midpoint is not a vertex
  Vec interior = normalize({1, 1, 1}).coords;
  SphericalPolytope q =
      from_vertices(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, interior});
  CHECK(q.vertices.size() == 3);
}

TEST_CASE("face lattices of the canonical fixtures") {
  CHECK(face_lattice(oct()).f_vector() == std::vector<int>{3, 3});
  CHECK(face_lattice(spherical_simplex(3)).f_vector() == std::vector<int>{4, 6, 4});
  SphericalPolytope cube_s = embed(cube3(), 0.5);
  CHECK(face_lattice(cube_s).f_vector() == std::vector<int>{8, 12, 6});
  // simplex combinatorics oracle: binomial counts in S^4
  FaceLattice s4 = face_lattice(spherical_simplex(4));
  CHECK(s4.f_vector() == std::vector<int>{5, 10, 10, 5});
}

TEST_CASE("polar of the fixtures") {
  SphericalPolytope p = oct();
  SphericalPolytope q = polar(p);
  CHECK(q.vertices.size() == 3);
  CHECK(has_vertex(q, {-1, 0, 0}));
  CHECK(has_vertex(q, {0, -1, 0}));
  CHECK(has_vertex(q, {0, 0, -1}));
  for (int d = 2; d <= 4; ++d) {
    SphericalPolytope s = spherical_simplex(d);
    SphericalPolytope sp = polar(s);
    for (int i = 0; i <= d; ++i) {
      Vec e = basis_vec(static_cast<size_t>(d) + 1, i);
      CHECK(has_vertex(sp, -1.0 * e));
    }
  }
  CHECK(same_vertex_sets(polar(polar(p)), p, 1e-8));
}

TEST_CASE("polar involution on random polytopes") {
  Rng rng(404);
  for (int d = 2; d <= 4; ++d)
    for (int t = 0; t < 5; ++t) {
      SphericalPolytope p = random_spolytope(d, 8 + 3 * d, rng);
      CHECK(same_vertex_sets(polar(polar(p)), p, 1e-7));
    }
}

TEST_CASE("minimal_face_containing on the orthant triangle") {
  SphericalPolytope p = oct();
  Face v = minimal_face_containing(p, UnitPoint({1, 0, 0}));
  CHECK(v.dim == 0);
  CHECK(v.verts.size() == 1);
  double s = 1.0 / std::sqrt(2.0);
  Face e = minimal_face_containing(p, UnitPoint({s, s, 0}));
  CHECK(e.dim == 1);
  CHECK(e.verts.size() == 2);
  CHECK_THROWS_AS(minimal_face_containing(p, normalize({1, 1, 1})), Error);
  try {
    minimal_face_containing(p, normalize({1, 1, 1}));
  } catch (const Error& err) {
    CHECK(err.code == Err::NotOnBoundary);
  }
}

TEST_CASE("conjugate faces of the fixtures match the defining equation") {
  SphericalPolytope p = oct();
  FaceLattice lat = face_lattice(p);
  for (const Face& f : lat.faces) {
    Face conj = conjugate_face(p, f);
    std::vector<Vec> oracle = conjugate_oracle(p, f);
    CHECK(conj.verts.size() == oracle.size());
    CHECK(f.dim + conj.dim == p.d - 1);
  }
  // vertex {e_1} -> edge {-e_2, -e_3}
  Face vf = minimal_face_containing(p, UnitPoint({1, 0, 0}));
  Face conj = conjugate_face(p, vf);
  CHECK(conj.dim == 1);
  SphericalPolytope q = polar(p);
  bool has_me2 = false, has_me3 = false;
  for (int vi : conj.verts) {
    if (dist(q.vertices[vi], {0, -1, 0}) < 1e-9) has_me2 = true;
    if (dist(q.vertices[vi], {0, 0, -1}) < 1e-9) has_me3 = true;
  }
  CHECK(has_me2);
  CHECK(has_me3);
  // edge {e_1, e_2} -> vertex {-e_3}
  double s = 1.0 / std::sqrt(2.0);
  Face ef = minimal_face_containing(p, UnitPoint({s, s, 0}));
  Face econj = conjugate_face(p, ef);
  REQUIRE(econj.verts.size() == 1);
  CHECK(dist(q.vertices[econj.verts[0]], {0, 0, -1}) < 1e-9);

  // simplex facet -> opposite vertex
  SphericalPolytope s3 = spherical_simplex(3);
  FaceLattice l3 = face_lattice(s3);
  for (int fi : l3.by_dim[2]) {
    Face cj = conjugate_face(s3, l3.faces[fi]);
    CHECK(cj.dim == 0);
  }
}

TEST_CASE("double conjugation and inclusion reversal on random polytopes") {
  Rng rng(505);
  for (int d = 2; d <= 4; ++d) {
    SphericalPolytope p = random_spolytope(d, 8 + 3 * d, rng);
    SphericalPolytope q = polar(p);
    FaceLattice lat = face_lattice(p);
    for (const Face& f : lat.faces) {
      Face conj = conjugate_face(p, f);
      CHECK(f.dim + conj.dim == d - 1);
      Face conj_for_q = conj;
      conj_for_q.owner = q.id;
      Face back = conjugate_face(q, conj_for_q);
      // F-hat-hat must equal F as a coordinate set
      CHECK(back.verts.size() == f.verts.size());
      SphericalPolytope qq = polar(q);
      for (int bi : back.verts) {
        bool found = false;
        for (int fi : f.verts)
          if (dist(qq.vertices[bi], p.vertices[fi]) < 1e-7) found = true;
        CHECK(found);
      }
    }
    // inclusion reversal over the Hasse diagram
    for (const auto& [sub, super] : lat.hasse) {
      Face cs = conjugate_face(p, lat.faces[sub]);
      Face cl = conjugate_face(p, lat.faces[super]);
      Bits bl = Bits::from(cl.verts), bs = Bits::from(cs.verts);
      CHECK(bl.subset_of(bs));
    }
  }
}

TEST_CASE("facet normals support the polytope") {
  Rng rng(606);
  for (int d = 2; d <= 4; ++d) {
    SphericalPolytope p = random_spolytope(d, 10, rng);
    for (size_t f = 0; f < p.facet_normals.size(); ++f) {
      int on = 0;
      for (size_t v = 0; v < p.vertices.size(); ++v) {
        double s = dot(p.facet_normals[f], p.vertices[v]);
        CHECK(s <= p.tol.pred);
        if (std::fabs(s) <= p.tol.pred) ++on;
      }
      CHECK(on >= d);
      CHECK(static_cast<int>(p.facet_vertices[f].size()) == on);
    }
  }
}

TEST_CASE("partial flags") {
  PartialFlag f3 = find_partial_flag(spherical_simplex(3));
  REQUIRE(f3.chain.size() == 1);
  CHECK(f3.chain[0].dim == 2);
  PartialFlag f4 = find_partial_flag(spherical_simplex(4));
  REQUIRE(f4.chain.size() == 2);
  CHECK(f4.chain[0].dim == 2);
  CHECK(f4.chain[1].dim == 3);
  CHECK(Bits::from(f4.chain[0].verts).subset_of(Bits::from(f4.chain[1].verts)));
  CHECK(find_partial_flag(oct()).chain.empty());
}

TEST_CASE("lattice isomorphism") {
  SphericalPolytope s3 = spherical_simplex(3);
  std::vector<Vec> neg;
  for (const Vec& v : s3.vertices) neg.push_back(-1.0 * v);
  SphericalPolytope ms3 = from_vertices(3, neg);
  CHECK(lattice_isomorphic(face_lattice(s3), face_lattice(ms3)).has_value());

  SphericalPolytope cube_s = embed(cube3(), 0.5);
  CHECK_FALSE(lattice_isomorphic(face_lattice(s3), face_lattice(cube_s)).has_value());
  // cube vs octahedron: same sizes transposed, not isomorphic
  SphericalPolytope octa = polar(cube_s);
  CHECK_FALSE(lattice_isomorphic(face_lattice(cube_s), face_lattice(octa)).has_value());

  // the returned bijection maps faces to faces
  auto bij = lattice_isomorphic(face_lattice(s3), face_lattice(ms3));
  REQUIRE(bij.has_value());
  FaceLattice l1 = face_lattice(s3), l2 = face_lattice(ms3);
  std::set<std::vector<int>> faces2;
  for (const Face& f : l2.faces) faces2.insert(f.verts);
  for (const Face& f : l1.faces) {
    std::vector<int> img;
    for (int v : f.verts) img.push_back((*bij)[v]);
    std::sort(img.begin(), img.end());
    CHECK(faces2.count(img) == 1);
  }
}
