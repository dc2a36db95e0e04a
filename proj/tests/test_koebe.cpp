#include "doctest.h"
#include "fixtures.hpp"
#include "spherill/koebe.hpp"

using namespace spherill;
using namespace spherill::fixtures;

namespace {

// diagonal intersection point of a quadrilateral face's ideal polygon
Vec diagonal_intersection(const KoebeRealization& k, int face) {
  const auto& cyc = k.graph.faces[face];
  REQUIRE(cyc.size() == 4);
  std::vector<Vec> q;
  for (size_t t = 0; t < cyc.size(); ++t)
    q.push_back(k.tangency[k.graph.edge_index(cyc[t], cyc[(t + 1) % 4])]);
  // solve q0 + s (q2 - q0) = q1 + t (q3 - q1) in the face plane
  Vec d1 = q[2] - q[0], d2 = q[1] - q[3], rhs = q[1] - q[0];
  // least squares via normal equations on the 3x2 system
  Mat m(2, 2);
  m(0, 0) = dot(d1, d1);
  m(0, 1) = dot(d1, d2);
  m(1, 0) = dot(d2, d1);
  m(1, 1) = dot(d2, d2);
  Vec b{dot(d1, rhs), dot(d2, rhs)};
  Vec st = solve_linear(m, b);
  return q[0] + st[0] * d1;
}

}  // namespace

TEST_CASE("graph validation accepts fixtures and rejects bad input") {
  CHECK_NOTHROW(tetrahedron_graph());
  CHECK_NOTHROW(cube_graph());
  PolyhedralGraph dod = dodecahedron_graph();
  CHECK(dod.n == 20);
  CHECK(dod.m() == 12);
  CHECK(dod.e() == 30);

  // two triangles glued along an edge with the same orientation
  try {
    graph_from_faces({{0, 1, 2}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::NotPolyhedralGraph);
  }
  // broken Euler count: a face is missing
  try {
    graph_from_faces({{0, 1, 2}, {0, 3, 1}, {1, 3, 2}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::NotPolyhedralGraph);
  }
}

TEST_CASE("midscribe the tetrahedron") {
  KoebeRealization k = midscribe(tetrahedron_graph());
  CHECK(k.residuals.edge_tangency < 1e-6);
  CHECK(k.residuals.worst() < 1e-6);
  CHECK(k.residuals.solver_defect < 1e-10);
}

TEST_CASE("midscribe the cube recovers the symmetric realization") {
  KoebeRealization k = midscribe(cube_graph());
  CHECK(k.residuals.edge_tangency < 1e-6);
  CHECK(k.residuals.worst() < 1e-6);
  // Mobius balancing of the tangency points lands on the symmetric cube:
  // all vertices at norm sqrt(3/2), all edges at distance 1 from the origin
  for (const Vec& v : k.vertices)
    CHECK(std::fabs(norm(v) - std::sqrt(1.5)) < 1e-7);
}

TEST_CASE("midscribe the dodecahedron") {
  KoebeRealization k = midscribe(dodecahedron_graph());
  CHECK(k.residuals.edge_tangency < 1e-6);
  CHECK(k.residuals.worst() < 1e-6);
}

TEST_CASE("mobius maps preserve the lorentz form and tangencies") {
  KoebeRealization k = midscribe(cube_graph());
  MobiusMap b = MobiusMap::boost_to_origin({0.2, -0.1, 0.35});
  CHECK(b.lorentz_defect() < 1e-12);
  CHECK(b.compose(b.inverse()).lorentz_defect() < 1e-12);

  KoebeRealization moved = k;
  for (auto& c : moved.vertex_circles) c = b.apply(c);
  for (auto& c : moved.face_circles) c = b.apply(c);
  for (auto& t : moved.tangency) t = b.apply_point(t);
  moved.vertices.clear();
  for (auto& c : moved.vertex_circles) moved.vertices.push_back(c.pole());
  KoebeResiduals r = verify_realization(moved);
  CHECK(r.worst() < 1e-8);
}

TEST_CASE("choose_normalization_point on quadrilateral and other faces") {
  KoebeRealization cube = midscribe(cube_graph());
  // symmetric cube face: centroid coincides with the diagonal intersection,
  // so the offset branch must trigger
  Vec p = choose_normalization_point(cube, 0);
  Vec w = diagonal_intersection(cube, 0);
  CHECK(dist(p, w) > 1e-3);

  KoebeRealization tet = midscribe(tetrahedron_graph());
  std::vector<Vec> q;
  const auto& cyc = tet.graph.faces[1];
  for (size_t t = 0; t < cyc.size(); ++t)
    q.push_back(tet.tangency[tet.graph.edge_index(cyc[t], cyc[(t + 1) % cyc.size()])]);
  Vec centroid = (1.0 / 3.0) * (q[0] + q[1] + q[2]);
  CHECK(dist(choose_normalization_point(tet, 1), centroid) < 1e-12);

  KoebeRealization dod = midscribe(dodecahedron_graph());
  Vec pd = choose_normalization_point(dod, 3);
  const CircleOnSphere& fc = dod.face_circles[3];
  CHECK(std::fabs(dot(fc.normal, pd) - fc.offset) < 1e-9);
}

TEST_CASE("poincare_normalize moves the face plane through the origin") {
  KoebeRealization cube = midscribe(cube_graph());
  Vec p = choose_normalization_point(cube, 0);
  auto [mobius, moved] = poincare_normalize(cube, 0, p);
  CHECK(mobius.lorentz_defect() < 1e-11);
  const CircleOnSphere& fc = moved.face_circles[0];
  CHECK(std::fabs(fc.offset) < 1e-9);
  CHECK(moved.residuals.worst() < 1e-7);

  // a point already at the center gives the identity
  auto [id_map, same] = poincare_normalize(moved, 0, zeros(3));
  CHECK(id_map.lorentz_defect() < 1e-12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::fabs(id_map.l(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
  (void)same;

  try {
    poincare_normalize(cube, 0, {2.0, 0.0, 0.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::PointNotOnFacePlane);
  }
}

TEST_CASE("four_directions: parallelogram on the raw cube, success when normalized") {
  KoebeRealization cube = midscribe(cube_graph());
  try {
    four_directions(cube, 0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::ParallelogramFace);
  }
  Vec p = choose_normalization_point(cube, 0);
  auto [mobius, moved] = poincare_normalize(cube, 0, p);
  (void)mobius;
  EuclideanCertificate cert;
  std::vector<Vec> dirs = four_directions(moved, 0, &cert);
  CHECK(dirs.size() == 4);
  CHECK(cert.min_margin > 1e-9);
}

TEST_CASE("rhombus appears exactly at the diagonal intersection") {
  KoebeRealization cube = midscribe(cube_graph());
  Vec w = diagonal_intersection(cube, 0);
  auto [m1, at_center] = poincare_normalize(cube, 0, w);
  (void)m1;
  CHECK_THROWS_AS(four_directions(at_center, 0), Error);  // rhombus face

  Vec q0 = cube.tangency[cube.graph.edge_index(cube.graph.faces[0][0],
                                               cube.graph.faces[0][1])];
  Vec far = w + 0.35 * (q0 - w);
  auto [m2, off_center] = poincare_normalize(cube, 0, far);
  (void)m2;
  CHECK_NOTHROW(four_directions(off_center, 0));
}

TEST_CASE("koebe pipeline on the fixtures") {
  for (const PolyhedralGraph& g :
       {tetrahedron_graph(), cube_graph(), dodecahedron_graph()}) {
    KoebePipelineResult res = koebe_pipeline(g);
    CHECK(res.directions.size() == 4);
    CHECK(res.certificate.min_margin > 1e-9);
    CHECK(res.realization.residuals.edge_tangency < 1e-6);
    CHECK(res.vertex_bijection.size() == static_cast<size_t>(g.n));
  }
}

TEST_CASE("koebe pipeline on a random polyhedron") {
  Rng rng(151);
  EuclideanPolytope p = random_3polytope(14, rng);
  KoebePipelineResult res = koebe_pipeline(graph_from_polytope(p));
  CHECK(res.directions.size() == 4);
  CHECK(res.certificate.min_margin > 1e-9);
  CHECK(res.realization.residuals.edge_tangency < 1e-6);
}

TEST_CASE("koebe pipeline on pyramids, prisms and antiprisms") {
  // square pyramid: a high-degree apex plus a quadrilateral face
  PolyhedralGraph pyramid =
      graph_from_faces({{0, 1, 2, 3}, {0, 4, 1}, {1, 4, 2}, {2, 4, 3}, {3, 4, 0}});
  // hexagonal pyramid: the apex has degree six
  PolyhedralGraph hex_pyramid = graph_from_faces({{0, 1, 2, 3, 4, 5},
                                                  {0, 6, 1},
                                                  {1, 6, 2},
                                                  {2, 6, 3},
                                                  {3, 6, 4},
                                                  {4, 6, 5},
                                                  {5, 6, 0}});
  // pentagonal prism: every side face is a quadrilateral
  PolyhedralGraph prism = graph_from_faces({{0, 1, 2, 3, 4},
                                            {9, 8, 7, 6, 5},
                                            {0, 5, 6, 1},
                                            {1, 6, 7, 2},
                                            {2, 7, 8, 3},
                                            {3, 8, 9, 4},
                                            {4, 9, 5, 0}});
  // square antiprism
  PolyhedralGraph antiprism = graph_from_faces({{0, 1, 2, 3},
                                                {7, 6, 5, 4},
                                                {0, 4, 1},
                                                {1, 4, 5},
                                                {1, 5, 2},
                                                {2, 5, 6},
                                                {2, 6, 3},
                                                {3, 6, 7},
                                                {3, 7, 0},
                                                {0, 7, 4}});
  for (const PolyhedralGraph& g : {pyramid, hex_pyramid, prism, antiprism}) {
    KoebePipelineResult res = koebe_pipeline(g);
    CHECK(res.directions.size() == 4);
    CHECK(res.certificate.min_margin > 1e-9);
    CHECK(res.realization.residuals.edge_tangency < 1e-6);
    CHECK(res.vertex_bijection.size() == static_cast<size_t>(g.n));
  }
}

TEST_CASE("poincare_normalize preserves the face lattice") {
  KoebeRealization dod = midscribe(dodecahedron_graph());
  Vec p = choose_normalization_point(dod, 0);
  auto [mob, moved] = poincare_normalize(dod, 0, p);
  (void)mob;
  FaceLattice before = euclidean_face_lattice(realization_polytope(dod));
  FaceLattice after = euclidean_face_lattice(realization_polytope(moved));
  CHECK(lattice_isomorphic(before, after).has_value());
}
