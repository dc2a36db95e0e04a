#include "doctest.h"
#include "fixtures.hpp"
#include "spherill/core.hpp"

using namespace spherill;

namespace {
const Tolerances kTol;
bool close(const Vec& a, const Vec& b, double eps = 1e-12) { return dist(a, b) <= eps; }
}  // namespace

TEST_CASE("normalize scales and rejects zero") {
  CHECK(close(normalize({2, 0, 0}).coords, {1, 0, 0}));
  double s = 1.0 / std::sqrt(3.0);
  CHECK(close(normalize({1, 1, 1}).coords, {s, s, s}));
  CHECK_THROWS_AS(normalize({0, 0, 0}), Error);
  try {
    normalize({0, 0, 0});
  } catch (const Error& e) {
    CHECK(e.code == Err::ZeroVector);
  }
}

TEST_CASE("normalize is idempotent on unit points") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    Vec v = rng.unit_vector(4);
    CHECK(close(normalize(v).coords, v, 1e-15));
  }
}

TEST_CASE("antipode examples and involution") {
  CHECK(close(antipode(UnitPoint({1, 0, 0})).coords, {-1, 0, 0}));
  CHECK(close(antipode(UnitPoint({0, 0, -1})).coords, {0, 0, 1}));
  double s = 1.0 / std::sqrt(2.0);
  CHECK(close(antipode(UnitPoint({s, s, 0})).coords, {-s, -s, 0}));
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    UnitPoint p(rng.unit_vector(5));
    CHECK(close(antipode(antipode(p)).coords, p.coords, 0.0));
  }
}

TEST_CASE("geodesic_point endpoints, midpoint, degeneracies") {
  UnitPoint e1({1, 0, 0}), e2({0, 1, 0});
  double s = 1.0 / std::sqrt(2.0);
  CHECK(close(geodesic_point(e1, e2, 0.5).coords, {s, s, 0}));
  CHECK(close(geodesic_point(e1, e2, 0.0).coords, e1.coords));
  CHECK(close(geodesic_point(e1, e2, 1.0).coords, e2.coords));
  CHECK_THROWS_AS(geodesic_point(e1, antipode(e1), 0.5), Error);
  CHECK_THROWS_AS(geodesic_point(e1, e1, 0.5), Error);
}

TEST_CASE("geodesic points stay unit and on the acute side") {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    UnitPoint p(rng.unit_vector(4)), q(rng.unit_vector(4));
    if (dot(p.coords, q.coords) < 0.0) q = antipode(q);
    if (dot(p.coords, q.coords) > 1.0 - 1e-6) continue;
    double t = rng.next_double();
    UnitPoint g = geodesic_point(p, q, t);
    CHECK(std::fabs(norm(g.coords) - 1.0) < 1e-12);
    CHECK(dot(g.coords, p.coords) >= -1e-12);
    CHECK(dot(g.coords, q.coords) >= -1e-12);
  }
}

TEST_CASE("side of a hemisphere") {
  Hemisphere h{UnitPoint({0, 0, 1})};
  CHECK(side(h, UnitPoint({0, 0, 1}), kTol) == Side::Inside);
  CHECK(side(h, UnitPoint({1, 0, 0}), kTol) == Side::OnBoundary);
  CHECK(side(h, UnitPoint({0, 0.6, -0.8}), kTol) == Side::Outside);
}

TEST_CASE("side flips under antipode away from the boundary") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    Hemisphere h{UnitPoint(rng.unit_vector(3))};
    UnitPoint p(rng.unit_vector(3));
    Side s = side(h, p, kTol);
    if (s == Side::OnBoundary) continue;
    Side sa = side(h, antipode(p), kTol);
    CHECK(((s == Side::Inside && sa == Side::Outside) ||
           (s == Side::Outside && sa == Side::Inside)));
  }
}

TEST_CASE("rotate_about_subsphere coordinate cases") {
  UnitPoint e1({1, 0, 0}), e3({0, 0, 1});
  CHECK(close(rotate_about_subsphere(e1, {{0, 0, 1}}, M_PI / 2).coords, {0, 1, 0}));
  CHECK(close(rotate_about_subsphere(e3, {{0, 0, 1}}, 1.234).coords, e3.coords));
  CHECK(close(rotate_about_subsphere(e1, {{0, 1, 0}}, M_PI).coords, {-1, 0, 0}));
  CHECK_THROWS_AS(rotate_about_subsphere(e1, {{0, 2, 0}}, 1.0), Error);
}

TEST_CASE("rotation preserves pairwise inner products") {
  Rng rng(47);
  for (int i = 0; i < 50; ++i) {
    size_t amb = 4;
    Vec a1 = rng.unit_vector(amb);
    std::vector<Vec> axis = complete_basis({a1}, amb);
    axis.resize(amb - 2);  // first amb-2 orthonormal vectors
    double angle = rng.next_double() * 6.0;
    UnitPoint p(rng.unit_vector(amb)), q(rng.unit_vector(amb)), r(rng.unit_vector(amb));
    UnitPoint rp = rotate_about_subsphere(p, axis, angle);
    UnitPoint rq = rotate_about_subsphere(q, axis, angle);
    UnitPoint rr = rotate_about_subsphere(r, axis, angle);
    CHECK(std::fabs(dot(rp.coords, rq.coords) - dot(p.coords, q.coords)) < 1e-12);
    CHECK(std::fabs(dot(rp.coords, rr.coords) - dot(p.coords, r.coords)) < 1e-12);
    CHECK(std::fabs(dot(rq.coords, rr.coords) - dot(q.coords, r.coords)) < 1e-12);
  }
}

TEST_CASE("greatsphere normals are canonicalized") {
  GreatSphere g1(UnitPoint({-1, 0, 0}));
  GreatSphere g2(UnitPoint({1, 0, 0}));
  CHECK(close(g1.normal.coords, g2.normal.coords, 0.0));
  CHECK(g1.contains(UnitPoint({0, 1, 0}), kTol));
  CHECK_FALSE(g1.contains(UnitPoint({1, 0, 0}), kTol));
}

TEST_CASE("tolerances validate their range") {
  Tolerances bad;
  bad.pred = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_NOTHROW(Tolerances{}.validate());
}
