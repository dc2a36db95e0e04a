#include "doctest.h"
#include "fixtures.hpp"
#include "spherill/bridge.hpp"

using namespace spherill;
using namespace spherill::fixtures;

namespace {
const Tolerances kTol;
}

TEST_CASE("embed the cube at scale one half") {
  EuclideanPolytope cube = cube3();
  SphericalPolytope sp = embed(cube, 0.5);
  CHECK(sp.vertices.size() == 8);
  // vertices are normalize(+-1/2, +-1/2, +-1/2, 1)
  for (const Vec& v : sp.vertices) {
    Vec expect = normalize({v[0] < 0 ? -0.5 : 0.5, v[1] < 0 ? -0.5 : 0.5,
                            v[2] < 0 ? -0.5 : 0.5, 1.0})
                     .coords;
    CHECK(dist(v, expect) < 1e-12);
  }
  CHECK(face_lattice(sp).f_vector() == std::vector<int>{8, 12, 6});
}

TEST_CASE("degenerate euclidean input is rejected") {
  try {
    euclidean_from_vertices(2, {{0, 0}, {1, 0}, {2, 0}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::DegenerateDimension);
  }
}

TEST_CASE("project inverts embed up to the scale") {
  EuclideanPolytope cube = cube3();
  double s = 0.5;
  SphericalPolytope sp = embed(cube, s);
  Vec c = basis_vec(4, 3);
  EuclideanPolytope back = project(sp, c);
  REQUIRE(back.vertices.size() == cube.vertices.size());
  for (size_t i = 0; i < back.vertices.size(); ++i)
    CHECK(dist((1.0 / s) * back.vertices[i], cube.vertices[i]) < 1e-12);
}

TEST_CASE("project the orthant triangle at its center") {
  SphericalPolytope p = oct();
  EuclideanPolytope tri = project(p, p.hemisphere_center);
  CHECK(tri.vertices.size() == 3);
  auto bij = lattice_isomorphic(face_lattice(p), euclidean_face_lattice(tri));
  CHECK(bij.has_value());
  try {
    project(p, {-1, 0, 0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::VertexOnOrBeyondEquator);
  }
}

TEST_CASE("ideal directions read lights in the tangent frame") {
  std::vector<Vec> dirs = ideal_directions({{1, 0, 0}}, {0, 0, 1}, kTol);
  REQUIRE(dirs.size() == 1);
  CHECK(dist(dirs[0], {-1, 0}) < 1e-12);
  try {
    Vec off = normalize({1, 0, 0.1}).coords;
    ideal_directions({off}, {0, 0, 1}, kTol);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::LightOffGreatsphere);
  }
}

TEST_CASE("euclidean illumination of cube vertices") {
  EuclideanPolytope cube = cube3();
  double s = 1.0 / std::sqrt(3.0);
  Vec v{-s, -s, -s};
  int corner = -1, other = -1;
  for (size_t i = 0; i < cube.vertices.size(); ++i) {
    if (dist(cube.vertices[i], {1, 1, 1}) < 1e-12) corner = static_cast<int>(i);
    if (dist(cube.vertices[i], {1, 1, -1}) < 1e-12) other = static_cast<int>(i);
  }
  REQUIRE(corner >= 0);
  REQUIRE(other >= 0);
  EuclideanCheck hit = euclidean_illuminates(cube, v, cube.vertex_face(corner));
  CHECK(hit.illuminated);
  CHECK(std::fabs(hit.margin - s) < 1e-12);
  CHECK_FALSE(euclidean_illuminates(cube, v, cube.vertex_face(other)).illuminated);
  CHECK_FALSE(
      euclidean_illuminates(cube, {0, 0, -1}, cube.vertex_face(corner)).illuminated);
}

TEST_CASE("the canonical eight directions illuminate the cube, seven fail") {
  EuclideanPolytope cube = cube3();
  std::vector<Vec> dirs;
  for (int sgn = 0; sgn < 8; ++sgn)
    dirs.push_back(normalize({sgn & 1 ? -1.0 : 1.0, sgn & 2 ? -1.0 : 1.0,
                              sgn & 4 ? -1.0 : 1.0})
                       .coords);
  EuclideanCertificate cert = euclidean_verify(cube, dirs);
  CHECK(cert.min_margin > kTol.pred);
  // each direction illuminates exactly one vertex
  for (const Vec& d : dirs) {
    int hits = 0;
    for (size_t i = 0; i < cube.vertices.size(); ++i)
      if (euclidean_illuminates(cube, d, cube.vertex_face(static_cast<int>(i)))
              .illuminated)
        ++hits;
    CHECK(hits == 1);
  }
  for (size_t skip = 0; skip < dirs.size(); ++skip) {
    std::vector<Vec> sub;
    for (size_t i = 0; i < dirs.size(); ++i)
      if (i != skip) sub.push_back(dirs[i]);
    CHECK_THROWS_AS(euclidean_verify(cube, sub), Error);
  }
}

TEST_CASE("tetrahedron vertex-to-face directions verify") {
  EuclideanPolytope tet = regular_tetrahedron();
  std::vector<Vec> dirs;
  for (const Vec& v : tet.vertices) dirs.push_back(normalize(-1.0 * v).coords);
  EuclideanCertificate cert = euclidean_verify(tet, dirs);
  CHECK(cert.min_margin > kTol.pred);
}

TEST_CASE("combinatorial illuminator on the cube") {
  CombinatorialResult res = combinatorial_illuminator(cube3());
  CHECK(res.directions.size() == 4);
  CHECK(res.certificate.min_margin > kTol.pred);
  CHECK(res.vertex_bijection.size() == 8);
  CHECK(euclidean_face_lattice(res.image).f_vector() == std::vector<int>{8, 12, 6});
}

TEST_CASE("combinatorial illuminator on the dodecahedron") {
  CombinatorialResult res = combinatorial_illuminator(dodecahedron());
  CHECK(res.directions.size() == 4);
  CHECK(res.certificate.min_margin > kTol.pred);
  CHECK(euclidean_face_lattice(res.image).f_vector() == std::vector<int>{20, 30, 12});
}

TEST_CASE("combinatorial illuminator routes d=2 to levi") {
  std::vector<Vec> pent;
  for (int i = 0; i < 5; ++i) {
    double a = 2.0 * M_PI * i / 5;
    pent.push_back({std::cos(a), std::sin(a)});
  }
  CombinatorialResult res = combinatorial_illuminator(euclidean_from_vertices(2, pent));
  CHECK(res.directions.size() == 3);

  std::vector<Vec> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  try {
    combinatorial_illuminator(euclidean_from_vertices(2, square));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::ParallelogramError);
  }
}
