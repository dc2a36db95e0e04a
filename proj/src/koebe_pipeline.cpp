#include "spherill/koebe.hpp"

namespace spherill {

namespace {

// 2D frame of the plane { x : <normal, x> = offset }
struct PlaneFrame {
  Vec origin, e1, e2, normal;
  Vec to2d(const Vec& x) const { return {dot(x - origin, e1), dot(x - origin, e2)}; }
  Vec to3d(const Vec& z) const { return origin + z[0] * e1 + z[1] * e2; }
};

PlaneFrame plane_frame(const CircleOnSphere& c) {
  PlaneFrame pf;
  pf.normal = c.normal;
  pf.origin = c.offset * c.normal;
  std::vector<Vec> frame = complete_basis({c.normal}, 3);
  pf.e1 = frame[1];
  pf.e2 = frame[2];
  if (dot(cross3(pf.e1, pf.e2), pf.normal) < 0.0) pf.e2 = -pf.e2;
  return pf;
}

std::vector<Vec> face_tangency_points(const KoebeRealization& k, int face) {
  const auto& cyc = k.graph.faces[face];
  std::vector<Vec> out;
  for (size_t t = 0; t < cyc.size(); ++t)
    out.push_back(k.tangency[k.graph.edge_index(cyc[t], cyc[(t + 1) % cyc.size()])]);
  return out;
}

double klein_distance(const Vec& x, const Vec& y) {
  double num = 1.0 - dot(x, y);
  double den = std::sqrt((1.0 - norm2(x)) * (1.0 - norm2(y)));
  return std::acosh(std::max(1.0, num / den));
}

// signed distances of a 2D point to the polygon's chord lines; positive means
// inside for a counterclockwise polygon
double min_edge_distance(const std::vector<Vec>& poly2, const Vec& p2) {
  const size_t k = poly2.size();
  double area = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const Vec& a = poly2[i];
    const Vec& b = poly2[(i + 1) % k];
    area += a[0] * b[1] - a[1] * b[0];
  }
  double orient = area >= 0.0 ? 1.0 : -1.0;
  double worst = 1e300;
  for (size_t i = 0; i < k; ++i) {
    const Vec& a = poly2[i];
    const Vec& b = poly2[(i + 1) % k];
    Vec t = b - a;
    double len = norm(t);
    double s = orient * (t[0] * (p2[1] - a[1]) - t[1] * (p2[0] - a[0])) / len;
    worst = std::min(worst, s);
  }
  return worst;
}

}  // namespace

Vec choose_normalization_point(const KoebeRealization& k, int face, bool force_offset) {
  std::vector<Vec> q = face_tangency_points(k, face);
  Vec z = zeros(3);
  for (const Vec& p : q) z += p;
  z *= 1.0 / static_cast<double>(q.size());
  // the tangency points sit on the face plane only up to the packing
  // residual; pin the centroid onto the plane exactly
  const CircleOnSphere& fc0 = k.face_circles[face];
  z -= (dot(fc0.normal, z) - fc0.offset) * fc0.normal;

  if (q.size() == 4) {
    // diagonal chords of the ideal quadrilateral, intersected in the plane
    PlaneFrame pf = plane_frame(k.face_circles[face]);
    Vec a0 = pf.to2d(q[0]), a2 = pf.to2d(q[2]);
    Vec b1 = pf.to2d(q[1]), b3 = pf.to2d(q[3]);
    // a0 + s(a2-a0) = b1 + t(b3-b1)
    Mat m(2, 2);
    m(0, 0) = a2[0] - a0[0];
    m(0, 1) = b1[0] - b3[0];
    m(1, 0) = a2[1] - a0[1];
    m(1, 1) = b1[1] - b3[1];
    Vec rhs{b1[0] - a0[0], b1[1] - a0[1]};
    Vec st = solve_linear(m, rhs);
    Vec w = pf.to3d({a0[0] + st[0] * (a2[0] - a0[0]), a0[1] + st[0] * (a2[1] - a0[1])});
    if (force_offset || klein_distance(z, w) < 1e-3) {
      Vec dir = q[0] - z;
      double dn = norm(dir);
      double step = std::min(1e-2, 0.4 * dn);
      z += (step / dn) * dir;
      z -= (dot(fc0.normal, z) - fc0.offset) * fc0.normal;
    }
  }
  return z;
}

std::pair<MobiusMap, KoebeRealization> poincare_normalize(const KoebeRealization& k,
                                                          int face, const Vec& p) {
  const CircleOnSphere& fc = k.face_circles[face];
  if (norm(p) >= 1.0 - 1e-12)
    fail(Err::PointNotOnFacePlane, "normalization point outside the open ball");
  if (std::fabs(dot(fc.normal, p) - fc.offset) > 1e-9)
    fail(Err::PointNotOnFacePlane, "normalization point off the face plane");
  PlaneFrame pf = plane_frame(fc);
  std::vector<Vec> poly2;
  for (const Vec& q : face_tangency_points(k, face)) poly2.push_back(pf.to2d(q));
  if (min_edge_distance(poly2, pf.to2d(p)) <= 1e-6)
    fail(Err::PointNotInRelint, "normalization point outside relint of the ideal polygon");

  MobiusMap b = MobiusMap::boost_to_origin(p);
  KoebeRealization out;
  out.graph = k.graph;
  for (const CircleOnSphere& c : k.vertex_circles) {
    CircleOnSphere cc = b.apply(c);
    if (cc.offset < 0.0) {
      cc.normal = -cc.normal;
      cc.offset = -cc.offset;
    }
    out.vertex_circles.push_back(cc);
  }
  for (const CircleOnSphere& c : k.face_circles) {
    CircleOnSphere cc = b.apply(c);
    if (cc.offset < 0.0) {
      cc.normal = -cc.normal;
      cc.offset = -cc.offset;
    }
    out.face_circles.push_back(cc);
  }
  for (const Vec& t : k.tangency) out.tangency.push_back(b.apply_point(t));
  for (const CircleOnSphere& c : out.vertex_circles) {
    if (c.offset <= 1e-9) fail(Err::SolverDiverged, "vertex circle degenerated");
    out.vertices.push_back(c.pole());
  }
  out.residuals = verify_realization(out);
  out.residuals.solver_defect = k.residuals.solver_defect;
  out.residuals.layout_defect = k.residuals.layout_defect;
  return {b, out};
}

std::vector<Vec> four_directions(const KoebeRealization& k, int face,
                                 EuclideanCertificate* cert_out) {
  const CircleOnSphere& fc = k.face_circles[face];
  const auto& cyc = k.graph.faces[face];

  // outer normal: the rest of the polyhedron must lie strictly below the plane
  Vec m = fc.normal;
  double off = fc.offset;
  for (int v = 0; v < k.graph.n; ++v) {
    bool on_face = false;
    for (int u : cyc) on_face |= (u == v);
    if (on_face) continue;
    if (dot(m, k.vertices[v]) > off) {
      m = -m;
      off = -off;
      break;
    }
  }

  // face polygon in its own plane, counterclockwise against m
  PlaneFrame pf = plane_frame(CircleOnSphere{m, off});
  std::vector<Vec> poly2;
  for (int v : cyc) {
    Vec q = k.vertices[v];
    q -= (dot(m, q) - off) * m;  // exact projection onto the face plane
    poly2.push_back(pf.to2d(q));
  }
  double area = 0.0;
  for (size_t i = 0; i < poly2.size(); ++i) {
    const Vec& a = poly2[i];
    const Vec& b = poly2[(i + 1) % poly2.size()];
    area += a[0] * b[1] - a[1] * b[0];
  }
  if (area < 0.0) std::reverse(poly2.begin(), poly2.end());

  if (poly2.size() == 4) {
    double scale = 0.0;
    for (const Vec& z : poly2) scale = std::max(scale, norm(z));
    Vec e0 = poly2[1] - poly2[0], e1 = poly2[2] - poly2[1];
    Vec e2 = poly2[3] - poly2[2], e3 = poly2[0] - poly2[3];
    auto cr = [](const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; };
    if (std::fabs(cr(e0, e2)) <= 1e-9 * scale * scale &&
        std::fabs(cr(e1, e3)) <= 1e-9 * scale * scale)
      fail(Err::ParallelogramFace, "normalized face is a parallelogram");
  }
  if (std::fabs(off) > 1e-6)
    fail(Err::VerificationFailed, "face plane does not pass through the origin");

  LeviResult levi;
  try {
    levi = levi_directions(poly2, Tolerances{});
  } catch (const Error& e) {
    if (e.code == Err::ParallelogramError)
      fail(Err::ParallelogramFace, "face has a parallelogram normal fan");
    throw;
  }

  EuclideanPolytope ep = realization_polytope(k);
  double eps = 0.5;
  for (int it = 0; it <= 40; ++it) {
    std::vector<Vec> dirs{m};
    for (const Vec& d2 : levi.directions) {
      Vec d3 = d2[0] * pf.e1 + d2[1] * pf.e2 - eps * m;
      dirs.push_back((1.0 / norm(d3)) * d3);
    }
    try {
      EuclideanCertificate cert = euclidean_verify(ep, dirs);
      if (cert_out) *cert_out = cert;
      return dirs;
    } catch (const Error& e) {
      if (e.code != Err::UncoveredVertex) throw;
    }
    eps *= 0.5;
  }
  fail(Err::VerificationFailed, "no tilt passed euclidean verification");
}

KoebePipelineResult koebe_pipeline(const PolyhedralGraph& g, uint64_t seed,
                                   const Tolerances& tol) {
  KoebePipelineResult res;
  res.raw = midscribe(g, tol);

  // face choice: most edges, preferring non-quadrilaterals
  int best = -1;
  for (int f = 0; f < res.raw.graph.m(); ++f) {
    if (res.raw.graph.faces[f].size() == 4) continue;
    if (best < 0 || res.raw.graph.faces[f].size() > res.raw.graph.faces[best].size())
      best = f;
  }
  if (best < 0) {
    best = 0;
    for (int f = 1; f < res.raw.graph.m(); ++f)
      if (res.raw.graph.faces[f].size() > res.raw.graph.faces[best].size()) best = f;
  }
  res.face = best;

  Rng rng(seed);
  std::vector<Vec> q = face_tangency_points(res.raw, best);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Vec p;
    if (attempt == 0) {
      p = choose_normalization_point(res.raw, best);
    } else if (attempt == 1) {
      p = choose_normalization_point(res.raw, best, /*force_offset=*/true);
    } else {
      // seeded random relint point: positive convex combination of the
      // ideal vertices of the face polygon, pinned onto the face plane
      std::vector<double> w(q.size());
      double sum = 0.0;
      for (double& x : w) {
        x = -std::log(std::max(rng.next_double(), 1e-12));
        sum += x;
      }
      p = zeros(3);
      for (size_t i = 0; i < q.size(); ++i) p += (w[i] / sum) * q[i];
      const CircleOnSphere& fc = res.raw.face_circles[best];
      p -= (dot(fc.normal, p) - fc.offset) * fc.normal;
    }
    try {
      auto [mobius, normalized] = poincare_normalize(res.raw, best, p);
      EuclideanCertificate cert;
      std::vector<Vec> dirs = four_directions(normalized, best, &cert);
      res.realization = std::move(normalized);
      res.mobius = mobius;
      res.normalization_point = p;
      res.directions = std::move(dirs);
      res.certificate = cert;
      res.point_retries = attempt;

      FaceLattice graph_lat = closure_lattice(
          res.raw.graph.n, 3, res.raw.graph.faces, [&](const std::vector<int>& idx) {
            if (idx.size() == 1) return 0;
            if (idx.size() == 2) return 1;
            return 2;
          });
      EuclideanPolytope ep = realization_polytope(res.realization);
      FaceLattice hull_lat = euclidean_face_lattice(ep);
      auto bij = lattice_isomorphic(graph_lat, hull_lat);
      if (!bij)
        fail(Err::VerificationFailed, "realization not combinatorially equivalent");
      res.vertex_bijection = *bij;
      return res;
    } catch (const Error& e) {
      if (e.code != Err::ParallelogramFace && e.code != Err::PointNotInRelint) throw;
    }
  }
  fail(Err::VerificationFailed, "all normalization points hit parallelogram faces");
}

}  // namespace spherill
