#include "spherill/illumination.hpp"

#include <map>

namespace spherill {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

struct Arc {        // [start, start+len] on the circle, len in [0, 2pi]
  double start = 0.0, len = 0.0;
  bool empty() const { return len <= 0.0; }
};

// Intersection of an arc of length <= pi with an open semicircle starting at
// `t`. Both operands span at most half the circle, so the result is one arc.
Arc intersect_semicircle(const Arc& a, double t) {
  if (a.empty()) return {0.0, 0.0};
  double u = wrap_angle(t - a.start);
  Arc best{0.0, 0.0};
  // non-wrapped piece [u, u+pi] against [0, a.len]
  {
    double lo = std::max(0.0, u), hi = std::min(a.len, u + kPi);
    if (hi > lo && hi - lo > best.len) best = {wrap_angle(a.start + lo), hi - lo};
  }
  // wrapped piece [0, u+pi-2pi]
  if (u + kPi > kTwoPi) {
    double hi = std::min(a.len, u + kPi - kTwoPi);
    if (hi > 0 && hi > best.len) best = {a.start, hi};
  }
  return best;
}

// overlap length of arc `a` with the interval [0, theta] measured from ref
double overlap_with_segment(const Arc& a, double ref, double theta) {
  if (a.empty()) return 0.0;
  double u = wrap_angle(a.start - ref);
  double total = 0.0;
  double lo = u, hi = u + a.len;  // within [0, 4pi)
  // piece within [0, 2pi)
  total += std::max(0.0, std::min(hi, theta) - lo);
  // wrapped part
  if (hi > kTwoPi) total += std::max(0.0, std::min(hi - kTwoPi, theta));
  return total;
}

void check_on_boundary(const SphericalPolytope& p, const UnitPoint& q,
                       const Tolerances& tol) {
  bool on = false;
  for (const Vec& n : p.facet_normals) {
    double s = dot(n, q.coords);
    if (s > tol.pred) fail(Err::NotOnBoundary, "point lies outside the polytope");
    if (std::fabs(s) <= tol.pred) on = true;
  }
  if (!on) fail(Err::NotOnBoundary, "point lies in the interior");
}

}  // namespace

bool illuminates_point_primal(const SphericalPolytope& p, const UnitPoint& light,
                              const UnitPoint& q, const Tolerances& tol) {
  check_on_boundary(p, q, tol);
  bool outside = false;
  for (const Vec& n : p.facet_normals)
    if (dot(n, light.coords) > tol.pred) outside = true;
  if (!outside) fail(Err::PointInsideBody, "light lies in the polytope");

  double c = dot(light.coords, q.coords);
  if (c <= -1.0 + tol.pred)
    fail(Err::AntipodalPair, "light antipodal to the boundary point");
  if (c >= 1.0 - tol.pred)
    fail(Err::CoincidentPair, "light coincides with the boundary point");

  // orthonormal frame of span(light, q): a = q, b completes toward the light
  Vec a = q.coords;
  Vec b = light.coords - c * a;
  b *= 1.0 / norm(b);
  double theta = std::atan2(dot(light.coords, b), dot(light.coords, a));

  // open arc of the great circle inside the interior of the cone
  Arc arc{0.0, kTwoPi};
  bool first = true;
  for (const Vec& n : p.facet_normals) {
    double ca = dot(n, a), cb = dot(n, b);
    double r = std::hypot(ca, cb);
    if (r <= 1e-13) return false;  // circle lies inside this facet's greatsphere
    double alpha = std::atan2(cb, ca);
    double t = wrap_angle(alpha + kPi / 2.0);
    if (first) {
      arc = {t, kPi};
      first = false;
    } else {
      arc = intersect_semicircle(arc, t);
    }
    if (arc.empty()) return false;  // great circle misses the interior
  }

  const double ang_tol = tol.pred;
  if (arc.len <= ang_tol) return false;
  // shorter segment from q (angle 0) to the light (angle theta in (0, pi))
  return overlap_with_segment(arc, 0.0, theta) <= ang_tol;
}

DualCheck illuminates_face_dual(const SphericalPolytope& p, const UnitPoint& light,
                                const Face& f, const Tolerances& tol) {
  std::vector<Vec> conj = conjugate_vertex_coords(p, f);
  DualCheck out;
  out.margin = 1.0;
  for (const Vec& x : conj) out.margin = std::min(out.margin, dot(light.coords, x));
  out.illuminated = out.margin > tol.pred;
  return out;
}

IlluminationCertificate verify_witness(const SphericalPolytope& p,
                                       const IlluminationWitness& w,
                                       const Tolerances& tol, bool strict) {
  const Vec& h = w.greatsphere_normal;
  if (std::fabs(norm(h) - 1.0) > 1e-6)
    fail(Err::ParseError, "witness normal is not a unit vector");
  for (size_t i = 0; i < p.vertices.size(); ++i)
    if (dot(h, p.vertices[i]) <= tol.pred)
      fail(Err::GreatsphereMeetsBody,
           "vertex " + std::to_string(i) + " not strictly inside the witness hemisphere");
  for (size_t i = 0; i < w.lights.size(); ++i)
    if (std::fabs(dot(h, w.lights[i])) > tol.pred)
      fail(Err::LightOffGreatsphere, "light " + std::to_string(i) + " off the greatsphere");

  // conjugate faces of the vertices: facet normals of the incident facets
  IlluminationCertificate cert;
  cert.tol = tol;
  cert.strict = strict;
  cert.min_margin = 1.0;
  for (size_t vi = 0; vi < p.vertices.size(); ++vi) {
    std::vector<int> facs = p.facets_of_vertex(static_cast<int>(vi));
    int best = -1;
    double best_margin = -2.0;
    for (size_t li = 0; li < w.lights.size(); ++li) {
      double m = 1.0;
      for (int f : facs) m = std::min(m, dot(w.lights[li], p.facet_normals[f]));
      if (m > best_margin) {
        best_margin = m;
        best = static_cast<int>(li);
      }
    }
    if (best < 0 || best_margin <= tol.pred)
      fail(Err::UncoveredVertex, "vertex " + std::to_string(vi) +
                                     " uncovered; best margin " + std::to_string(best_margin));
    cert.assignment.push_back(best);
    cert.margins.push_back(best_margin);
    cert.min_margin = std::min(cert.min_margin, best_margin);
  }

  if (strict) {
    FaceLattice lat = face_lattice(p);
    for (const Face& f : lat.faces) {
      bool covered = false;
      for (const Vec& light : w.lights) {
        DualCheck dc = illuminates_face_dual(p, UnitPoint(light), f, tol);
        if (dc.illuminated) { covered = true; break; }
      }
      if (!covered)
        fail(Err::UncoveredVertex, "face of dim " + std::to_string(f.dim) + " uncovered");
    }
  }
  cert.fragile = cert.min_margin <= 10.0 * tol.pred;
  return cert;
}

IlluminationCertificate verify_witness_lenient(const SphericalPolytope& p,
                                               const IlluminationWitness& w,
                                               const Tolerances& tol) {
  const Vec& h = w.greatsphere_normal;
  for (size_t i = 0; i < p.vertices.size(); ++i)
    if (dot(h, p.vertices[i]) <= tol.pred)
      fail(Err::GreatsphereMeetsBody,
           "vertex " + std::to_string(i) + " not strictly inside the hemisphere");
  for (size_t i = 0; i < w.lights.size(); ++i)
    if (dot(h, w.lights[i]) < -tol.pred)
      fail(Err::LightOffGreatsphere,
           "light " + std::to_string(i) + " outside the closed hemisphere");

  // sample targets: vertices plus face relative-interior centroids
  std::vector<std::pair<Vec, int>> targets;  // point, representative vertex
  for (size_t vi = 0; vi < p.vertices.size(); ++vi)
    targets.emplace_back(p.vertices[vi], static_cast<int>(vi));
  FaceLattice lat = face_lattice(p);
  for (const Face& f : lat.faces) {
    if (f.dim == 0) continue;
    Vec c = zeros(p.ambient());
    for (int vi : f.verts) c += p.vertices[vi];
    targets.emplace_back((1.0 / norm(c)) * c, -1);
  }

  IlluminationCertificate cert;
  cert.tol = tol;
  cert.min_margin = 1.0;
  cert.assignment.assign(p.vertices.size(), -1);
  cert.margins.assign(p.vertices.size(), 0.0);
  for (const auto& [q, rep] : targets) {
    int found = -1;
    for (size_t li = 0; li < w.lights.size(); ++li) {
      bool lit = false;
      try {
        lit = illuminates_point_primal(p, UnitPoint(w.lights[li]), UnitPoint(q), tol);
      } catch (const Error&) {
        continue;
      }
      if (lit) {
        found = static_cast<int>(li);
        break;
      }
    }
    if (found < 0)
      fail(Err::UncoveredVertex, "boundary sample uncovered in lenient mode");
    if (rep >= 0) {
      cert.assignment[rep] = found;
      // the recorded number is still the conjugate-face margin, even though
      // acceptance was decided by the primal predicate
      double m = 1.0;
      for (int f : p.facets_of_vertex(rep))
        m = std::min(m, dot(w.lights[found], p.facet_normals[f]));
      cert.margins[rep] = m;
      cert.min_margin = std::min(cert.min_margin, m);
    }
  }
  cert.fragile = cert.min_margin <= 10.0 * tol.pred;
  return cert;
}

bool unrestricted_antipodal_light_check(const SphericalPolytope& p,
                                        const UnitPoint& interior_point) {
  for (const Vec& n : p.facet_normals)
    if (dot(n, interior_point.coords) >= -p.tol.pred)
      fail(Err::NotInterior, "point is not strictly interior");
  UnitPoint light = antipode(interior_point);
  for (const Vec& v : p.vertices)
    if (!illuminates_point_primal(p, light, UnitPoint(v), p.tol)) return false;
  FaceLattice lat = face_lattice(p);
  for (const Face& f : lat.faces) {
    if (f.dim == 0) continue;
    Vec c = zeros(p.ambient());
    for (int vi : f.verts) c += p.vertices[vi];
    c *= 1.0 / norm(c);
    if (!illuminates_point_primal(p, light, UnitPoint(c), p.tol)) return false;
  }
  return true;
}

std::vector<Vec> greatsphere_grid(const Vec& center, int grid_size) {
  const size_t amb = center.size();
  std::vector<Vec> frame = complete_basis({(1.0 / norm(center)) * center}, amb);
  const int sub = static_cast<int>(amb) - 1;  // grid lives on S^{sub-1} of c-perp
  std::vector<Vec> out;
  out.reserve(grid_size);
  auto emb = [&](const Vec& coeff) {
    Vec v = zeros(amb);
    for (int k = 0; k < sub; ++k) v += coeff[k] * frame[k + 1];
    return v;
  };
  if (sub == 2) {
    for (int i = 0; i < grid_size; ++i) {
      double a = kTwoPi * i / grid_size;
      out.push_back(emb({std::cos(a), std::sin(a)}));
    }
  } else if (sub == 3) {
    // Fibonacci sphere
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < grid_size; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / grid_size;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double a = ga * i;
      out.push_back(emb({r * std::cos(a), r * std::sin(a), z}));
    }
  } else if (sub == 4) {
    // Kronecker sequence mapped through the S^3 area-preserving coordinates:
    // psi has density sin^2, theta density sin, phi uniform.
    const double a1 = 0.8191725133961644;  // 1/plastic, 1/plastic^2, golden frac
    const double a2 = 0.6710436067037892;
    const double a3 = 0.6180339887498949;
    for (int i = 0; i < grid_size; ++i) {
      double u1 = std::fmod(0.5 + a1 * (i + 1), 1.0);
      double u2 = std::fmod(0.5 + a2 * (i + 1), 1.0);
      double u3 = std::fmod(0.5 + a3 * (i + 1), 1.0);
      // invert F(psi) = (psi - sin psi cos psi)/pi by Newton with bisection
      double lo = 0.0, hi = kPi, psi = kPi * u1;
      for (int it = 0; it < 60; ++it) {
        double f = (psi - std::sin(psi) * std::cos(psi)) / kPi - u1;
        (f > 0 ? hi : lo) = psi;
        double df = 2.0 * std::sin(psi) * std::sin(psi) / kPi;
        double next = df > 1e-14 ? psi - f / df : 0.5 * (lo + hi);
        psi = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
      }
      double th = std::acos(1.0 - 2.0 * u2);
      double ph = kTwoPi * u3;
      double sp = std::sin(psi), st = std::sin(th);
      out.push_back(emb({std::cos(psi), sp * std::cos(th), sp * st * std::cos(ph),
                         sp * st * std::sin(ph)}));
    }
  } else {
    fail(Err::UnsupportedDimension, "grid supports d <= 4");
  }
  return out;
}

CoverResult exhaustive_upper_bound(const SphericalPolytope& p, int grid_size) {
  const int nv = static_cast<int>(p.vertices.size());
  std::vector<Vec> candidates = greatsphere_grid(p.hemisphere_center, grid_size);

  // coverage masks via the dual criterion on vertex conjugate faces
  std::vector<std::vector<int>> facs(nv);
  for (int v = 0; v < nv; ++v) facs[v] = p.facets_of_vertex(v);
  std::vector<Bits> masks;
  std::vector<int> mask_light;
  std::map<Bits, int> seen;
  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    Bits m;
    for (int v = 0; v < nv; ++v) {
      double mar = 1.0;
      for (int f : facs[v]) mar = std::min(mar, dot(candidates[ci], p.facet_normals[f]));
      if (mar > p.tol.pred) m.set(v);
    }
    if (m.none()) continue;
    const Bits& key = m;
    if (!seen.count(key)) {
      seen[key] = 1;
      masks.push_back(m);
      mask_light.push_back(static_cast<int>(ci));
    }
  }
  // drop dominated masks
  std::vector<int> keep;
  for (size_t i = 0; i < masks.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < masks.size(); ++j)
      if (i != j && masks[i].subset_of(masks[j]) && !(masks[j] == masks[i])) {
        dominated = true;
        break;
      }
    if (!dominated) keep.push_back(static_cast<int>(i));
  }

  Bits want;
  for (int v = 0; v < nv; ++v) want.set(v);
  std::vector<int> chosen;

  // exact cover search: branch on the uncovered vertex with fewest options
  std::function<bool(Bits, int)> solve = [&](Bits covered, int budget) -> bool {
    if (covered == want) return true;
    if (budget == 0) return false;
    int pick = -1, pick_count = 1 << 30;
    for (int v = 0; v < nv; ++v) {
      if (covered.test(v)) continue;
      int cnt = 0;
      for (int mi : keep)
        if (masks[mi].test(v)) ++cnt;
      if (cnt == 0) return false;
      if (cnt < pick_count) {
        pick_count = cnt;
        pick = v;
      }
    }
    for (int mi : keep) {
      if (!masks[mi].test(pick)) continue;
      Bits next = covered | masks[mi];
      chosen.push_back(mi);
      if (solve(next, budget - 1)) return true;
      chosen.pop_back();
    }
    return false;
  };

  for (int k = 1; k <= p.d + 2; ++k) {
    chosen.clear();
    if (solve(Bits{}, k)) {
      CoverResult res;
      res.k = static_cast<int>(chosen.size());
      res.witness.greatsphere_normal = p.hemisphere_center;
      for (int mi : chosen) res.witness.lights.push_back(candidates[mask_light[mi]]);
      res.certificate = verify_witness(p, res.witness, p.tol);
      return res;
    }
  }
  fail(Err::GridTooCoarse, "no cover with at most d+2 grid lights");
}

}  // namespace spherill
