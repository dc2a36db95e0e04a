#pragma once

// Elementary spherical geometry on S^d embedded in E^{d+1}: unit points,
// hemispheres, greatspheres, geodesic interpolation and tolerant predicates.
// All values are immutable after construction and all operations are pure.

#include <stdexcept>
#include <string>

#include "spherill/linalg.hpp"

namespace spherill {

enum class Err {
  ZeroVector,
  AntipodalPair,
  CoincidentPair,
  DegenerateBasis,
  NotInOpenHemisphere,
  DegenerateDimension,
  NotOnBoundary,
  InvalidFace,
  PointInsideBody,
  GreatsphereMeetsBody,
  UncoveredVertex,
  NotInterior,
  GridTooCoarse,
  ParallelogramError,
  NotConvex,
  ConstructionFailed,
  VertexOnOrBeyondEquator,
  LightOffGreatsphere,
  NotPolyhedralGraph,
  SolverDiverged,
  PointNotOnFacePlane,
  PointNotInRelint,
  ParallelogramFace,
  VerificationFailed,
  UnsupportedDimension,
  ParseError,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::ZeroVector: return "ZeroVector";
    case Err::AntipodalPair: return "AntipodalPair";
    case Err::CoincidentPair: return "CoincidentPair";
    case Err::DegenerateBasis: return "DegenerateBasis";
    case Err::NotInOpenHemisphere: return "NotInOpenHemisphere";
    case Err::DegenerateDimension: return "DegenerateDimension";
    case Err::NotOnBoundary: return "NotOnBoundary";
    case Err::InvalidFace: return "InvalidFace";
    case Err::PointInsideBody: return "PointInsideBody";
    case Err::GreatsphereMeetsBody: return "GreatsphereMeetsBody";
    case Err::UncoveredVertex: return "UncoveredVertex";
    case Err::NotInterior: return "NotInterior";
    case Err::GridTooCoarse: return "GridTooCoarse";
    case Err::ParallelogramError: return "ParallelogramError";
    case Err::NotConvex: return "NotConvex";
    case Err::ConstructionFailed: return "ConstructionFailed";
    case Err::VertexOnOrBeyondEquator: return "VertexOnOrBeyondEquator";
    case Err::LightOffGreatsphere: return "LightOffGreatsphere";
    case Err::NotPolyhedralGraph: return "NotPolyhedralGraph";
    case Err::SolverDiverged: return "SolverDiverged";
    case Err::PointNotOnFacePlane: return "PointNotOnFacePlane";
    case Err::PointNotInRelint: return "PointNotInRelint";
    case Err::ParallelogramFace: return "ParallelogramFace";
    case Err::VerificationFailed: return "VerificationFailed";
    case Err::UnsupportedDimension: return "UnsupportedDimension";
    case Err::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Err code;
  Error(Err c, const std::string& msg)
      : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

// Inner-product slacks used by every predicate. No hidden globals: callers
// pass these explicitly wherever a sign decision is made.
struct Tolerances {
  double unit = 1e-12;   // unit-norm slack
  double pred = 1e-9;    // predicate slack (sign decisions)
  double dedup = 1e-8;   // vertex merge slack

  void validate() const {
    auto ok = [](double t) { return t > 0.0 && t < 1e-3; };
    if (!ok(unit) || !ok(pred) || !ok(dedup))
      fail(Err::ParseError, "tolerances must lie in (0, 1e-3)");
  }
};

// A point of S^d, stored as a unit vector of E^{d+1}.
struct UnitPoint {
  Vec coords;

  UnitPoint() = default;
  explicit UnitPoint(Vec c) : coords(std::move(c)) {}

  int dim() const { return static_cast<int>(coords.size()) - 1; }
  double operator[](size_t i) const { return coords[i]; }
  size_t size() const { return coords.size(); }
};

inline UnitPoint normalize(const Vec& v, const Tolerances& tol = Tolerances{}) {
  double n = norm(v);
  if (n <= tol.unit) fail(Err::ZeroVector, "cannot normalize a (near-)zero vector");
  Vec c(v.size());
  for (size_t i = 0; i < v.size(); ++i) c[i] = v[i] / n;
  return UnitPoint(std::move(c));
}

inline UnitPoint antipode(const UnitPoint& p) { return UnitPoint(-p.coords); }

struct Hemisphere {
  UnitPoint center;  // open hemisphere { y : <center, y> > 0 }
};

// Greatsphere normals are defined up to sign; we canonicalize so that the
// first coordinate exceeding the predicate tolerance is positive. Equality of
// greatspheres is then plain coordinate comparison.
struct GreatSphere {
  UnitPoint normal;

  explicit GreatSphere(const UnitPoint& n, const Tolerances& tol = Tolerances{})
      : normal(n) {
    for (double x : normal.coords) {
      if (std::fabs(x) > tol.pred) {
        if (x < 0.0) normal.coords = -normal.coords;
        break;
      }
    }
  }

  bool contains(const UnitPoint& p, const Tolerances& tol) const {
    return std::fabs(dot(normal.coords, p.coords)) <= tol.pred;
  }
};

enum class Side { Inside, OnBoundary, Outside };

inline Side side(const Hemisphere& h, const UnitPoint& p, const Tolerances& tol) {
  double s = dot(h.center.coords, p.coords);
  if (s > tol.pred) return Side::Inside;
  if (s < -tol.pred) return Side::Outside;
  return Side::OnBoundary;
}

// Point at arc fraction t along the shorter great-circle arc from p to q.
inline UnitPoint geodesic_point(const UnitPoint& p, const UnitPoint& q, double t,
                                const Tolerances& tol = Tolerances{}) {
  double c = dot(p.coords, q.coords);
  if (c >= 1.0 - tol.pred) fail(Err::CoincidentPair, "geodesic endpoints coincide");
  if (c <= -1.0 + tol.pred) fail(Err::AntipodalPair, "geodesic endpoints are antipodal");
  double omega = std::acos(std::clamp(c, -1.0, 1.0));
  double s = std::sin(omega);
  Vec r = (std::sin((1.0 - t) * omega) / s) * p.coords + (std::sin(t * omega) / s) * q.coords;
  return normalize(r, tol);
}

// Rotation of E^{d+1} fixing the span of `axis_basis` (an orthonormal set of
// d-1 vectors) pointwise and turning the orthogonal 2-plane by `angle`.
// Orientation: the first completed basis vector rotates toward the second.
inline UnitPoint rotate_about_subsphere(const UnitPoint& p,
                                        const std::vector<Vec>& axis_basis,
                                        double angle,
                                        const Tolerances& tol = Tolerances{}) {
  const size_t n = p.size();
  if (axis_basis.size() + 2 != n)
    fail(Err::DegenerateBasis, "axis must have codimension 2");
  for (size_t i = 0; i < axis_basis.size(); ++i) {
    if (axis_basis[i].size() != n || std::fabs(norm(axis_basis[i]) - 1.0) > 1e-9)
      fail(Err::DegenerateBasis, "axis basis not unit length");
    for (size_t j = i + 1; j < axis_basis.size(); ++j)
      if (std::fabs(dot(axis_basis[i], axis_basis[j])) > 1e-9)
        fail(Err::DegenerateBasis, "axis basis not orthogonal");
  }
  std::vector<Vec> full = complete_basis(axis_basis, n);
  const Vec& a = full[axis_basis.size()];
  const Vec& b = full[axis_basis.size() + 1];
  double pa = dot(p.coords, a), pb = dot(p.coords, b);
  double ca = std::cos(angle), sa = std::sin(angle);
  Vec r = p.coords;
  r += (ca * pa - sa * pb - pa) * a;
  r += (sa * pa + ca * pb - pb) * b;
  return normalize(r, tol);
}

inline bool same_point(const UnitPoint& p, const UnitPoint& q, double tol_dedup) {
  return 1.0 - dot(p.coords, q.coords) <= tol_dedup;
}

}  // namespace spherill
