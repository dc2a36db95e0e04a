#include "spherill/bridge.hpp"

#include <atomic>

namespace spherill {

namespace {

std::atomic<uint64_t> g_euclidean_ids{1ULL << 32};

int affine_dim(const std::vector<Vec>& vertices, const std::vector<int>& idx) {
  if (idx.empty()) return -1;
  std::vector<Vec> rows;
  for (size_t k = 1; k < idx.size(); ++k)
    rows.push_back(vertices[idx[k]] - vertices[idx[0]]);
  if (rows.empty()) return 0;
  return static_cast<int>(numeric_rank(rows, vertices[0].size(), 1e-7));
}

}  // namespace

double default_embed_scale(const EuclideanPolytope& p) {
  double mx = 1e-12;
  for (const Vec& v : p.vertices) mx = std::max(mx, norm(v));
  return 0.5 / mx;
}

EuclideanPolytope euclidean_from_vertices(int d, const std::vector<Vec>& points,
                                          const Tolerances& tol) {
  if (points.empty()) fail(Err::DegenerateDimension, "no points");
  double mx = 1e-12;
  for (const Vec& v : points) mx = std::max(mx, norm(v));
  const double s = 0.5 / mx;

  std::vector<Vec> lifted;
  for (const Vec& x : points) {
    if (static_cast<int>(x.size()) != d) fail(Err::ParseError, "point with wrong dimension");
    Vec l(static_cast<size_t>(d) + 1, 0.0);
    for (int k = 0; k < d; ++k) l[k] = s * x[k];
    l[d] = 1.0;
    lifted.push_back(normalize(l, tol).coords);
  }
  SphericalPolytope sp = from_vertices(d, lifted, tol);

  EuclideanPolytope ep;
  ep.d = d;
  ep.tol = tol;
  ep.id = g_euclidean_ids.fetch_add(1);
  for (const Vec& sv : sp.vertices) {
    // undo the lift: spherical vertex ~ (s*x, 1)/norm
    if (sv[d] <= tol.pred) fail(Err::DegenerateDimension, "lifted vertex at infinity");
    Vec x(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) x[k] = sv[k] / (sv[d] * s);
    ep.vertices.push_back(std::move(x));
  }
  for (size_t f = 0; f < sp.facet_normals.size(); ++f) {
    const Vec& nn = sp.facet_normals[f];
    Vec spatial(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) spatial[k] = nn[k];
    double sn = norm(spatial);
    if (sn <= tol.pred)
      fail(Err::DegenerateDimension, "facet normal orthogonal to the base space");
    ep.facet_normals.push_back((1.0 / sn) * spatial);
    ep.facet_offsets.push_back(-nn[d] / (s * sn));
    ep.facet_vertices.push_back(sp.facet_vertices[f]);
  }
  return ep;
}

FaceLattice euclidean_face_lattice(const EuclideanPolytope& p) {
  FaceLattice lat = closure_lattice(
      static_cast<int>(p.vertices.size()), p.d, p.facet_vertices,
      [&](const std::vector<int>& idx) { return affine_dim(p.vertices, idx); });
  for (Face& f : lat.faces) f.owner = p.id;
  return lat;
}

bool euclidean_is_face_of(const EuclideanPolytope& p, const std::vector<int>& verts) {
  if (verts.empty()) return false;
  for (int v : verts)
    if (v < 0 || v >= static_cast<int>(p.vertices.size())) return false;
  Bits want = Bits::from(verts);
  Bits closure;
  bool first = true;
  for (size_t f = 0; f < p.facet_vertices.size(); ++f) {
    Bits fb = Bits::from(p.facet_vertices[f]);
    if (!want.subset_of(fb)) continue;
    closure = first ? fb : (closure & fb);
    first = false;
  }
  return !first && closure == want;
}

SphericalPolytope embed(const EuclideanPolytope& p, double scale) {
  if (scale <= 0.0) fail(Err::ParseError, "embed scale must be positive");
  std::vector<Vec> lifted;
  for (const Vec& x : p.vertices) {
    Vec l(static_cast<size_t>(p.d) + 1, 0.0);
    for (int k = 0; k < p.d; ++k) l[k] = scale * x[k];
    l[p.d] = 1.0;
    lifted.push_back(normalize(l, p.tol).coords);
  }
  return from_vertices(p.d, lifted, p.tol);
}

EuclideanPolytope project(const SphericalPolytope& p, const Vec& c) {
  const size_t amb = p.ambient();
  Vec cu = (1.0 / norm(c)) * c;
  for (size_t i = 0; i < p.vertices.size(); ++i)
    if (dot(p.vertices[i], cu) <= p.tol.pred)
      fail(Err::VertexOnOrBeyondEquator,
           "vertex " + std::to_string(i) + " not strictly inside the hemisphere");
  std::vector<Vec> frame = complete_basis({cu}, amb);
  std::vector<Vec> pts;
  for (const Vec& v : p.vertices) {
    double den = dot(v, cu);
    Vec x(static_cast<size_t>(p.d));
    for (int k = 0; k < p.d; ++k) x[k] = dot(v, frame[k + 1]) / den;
    pts.push_back(std::move(x));
  }

  // Central projection is a combinatorial isomorphism, so the face structure
  // is carried over rather than re-hulled; the plane fit below re-certifies
  // that the carried facets really support the image.
  EuclideanPolytope ep;
  ep.d = p.d;
  ep.tol = p.tol;
  ep.id = g_euclidean_ids.fetch_add(1);
  ep.vertices = pts;
  double scale = 1e-12;
  for (const Vec& x : pts) scale = std::max(scale, norm(x));
  for (size_t f = 0; f < p.facet_vertices.size(); ++f) {
    const std::vector<int>& fv = p.facet_vertices[f];
    Vec centroid = zeros(p.d);
    for (int vi : fv) centroid += pts[vi];
    centroid *= 1.0 / static_cast<double>(fv.size());
    std::vector<Vec> rows;
    for (int vi : fv) rows.push_back(pts[vi] - centroid);
    Vec sing;
    Mat vecs;
    gram_svd(rows, p.d, sing, vecs);
    Vec nrm = vecs.row(p.d - 1);
    nrm *= 1.0 / norm(nrm);
    double off = dot(nrm, centroid);
    Vec inner = zeros(p.d);
    for (const Vec& x : pts) inner += x;
    inner *= 1.0 / static_cast<double>(pts.size());
    if (dot(nrm, inner) > off) {
      nrm = -nrm;
      off = -off;
    }
    for (size_t vi = 0; vi < pts.size(); ++vi) {
      double dist_to_plane = dot(nrm, pts[vi]) - off;
      bool on = std::binary_search(fv.begin(), fv.end(), static_cast<int>(vi));
      if (on && std::fabs(dist_to_plane) > 1e-6 * scale)
        fail(Err::VerificationFailed, "projected facet lost planarity");
      if (!on && dist_to_plane > -1e-9 * scale)
        fail(Err::VerificationFailed, "projected facet fails strict support");
    }
    ep.facet_normals.push_back(std::move(nrm));
    ep.facet_offsets.push_back(off);
    ep.facet_vertices.push_back(fv);
  }
  return ep;
}

std::vector<Vec> ideal_directions(const std::vector<Vec>& lights, const Vec& c,
                                  const Tolerances& tol) {
  const size_t amb = c.size();
  Vec cu = (1.0 / norm(c)) * c;
  std::vector<Vec> frame = complete_basis({cu}, amb);
  std::vector<Vec> dirs;
  for (size_t i = 0; i < lights.size(); ++i) {
    if (std::fabs(dot(lights[i], cu)) > tol.pred)
      fail(Err::LightOffGreatsphere, "light " + std::to_string(i) + " off the equator");
    Vec d(amb - 1);
    for (size_t k = 0; k + 1 < amb; ++k) d[k] = -dot(lights[i], frame[k + 1]);
    double nn = norm(d);
    dirs.push_back((1.0 / nn) * d);
  }
  return dirs;
}

EuclideanCheck euclidean_illuminates(const EuclideanPolytope& p, const Vec& direction,
                                     const Face& f) {
  if (f.owner != p.id || !euclidean_is_face_of(p, f.verts))
    fail(Err::InvalidFace, "face does not belong to this polytope");
  Bits fb = Bits::from(f.verts);
  EuclideanCheck out;
  double worst = -1.0;
  bool any = false;
  for (size_t k = 0; k < p.facet_vertices.size(); ++k) {
    if (!fb.subset_of(Bits::from(p.facet_vertices[k]))) continue;
    any = true;
    worst = std::max(worst, dot(direction, p.facet_normals[k]));
  }
  if (!any) fail(Err::InvalidFace, "face not contained in any facet");
  out.margin = -worst;
  out.illuminated = out.margin > p.tol.pred;
  return out;
}

EuclideanCertificate euclidean_verify(const EuclideanPolytope& p,
                                      const std::vector<Vec>& directions) {
  EuclideanCertificate cert;
  cert.tol = p.tol;
  cert.min_margin = 1.0;
  for (int vi = 0; vi < static_cast<int>(p.vertices.size()); ++vi) {
    std::vector<int> facs = p.facets_of_vertex(vi);
    int best = -1;
    double best_margin = -2.0;
    for (size_t di = 0; di < directions.size(); ++di) {
      double worst = -1.0;
      for (int f : facs) worst = std::max(worst, dot(directions[di], p.facet_normals[f]));
      if (-worst > best_margin) {
        best_margin = -worst;
        best = static_cast<int>(di);
      }
    }
    if (best < 0 || best_margin <= p.tol.pred)
      fail(Err::UncoveredVertex, "vertex " + std::to_string(vi) +
                                     " uncovered; best margin " + std::to_string(best_margin));
    cert.assignment.push_back(best);
    cert.margins.push_back(best_margin);
    cert.min_margin = std::min(cert.min_margin, best_margin);
  }
  cert.fragile = cert.min_margin <= 10.0 * p.tol.pred;
  return cert;
}

CombinatorialResult combinatorial_illuminator(const EuclideanPolytope& p, uint64_t seed) {
  CombinatorialResult res;
  if (p.d == 2) {
    // planar case: Levi directions on the polygon itself
    FaceLattice lat = euclidean_face_lattice(p);
    std::vector<Vec> poly = p.vertices;
    Vec c2 = zeros(2);
    for (const Vec& v : poly) c2 += v;
    c2 *= 1.0 / static_cast<double>(poly.size());
    std::sort(poly.begin(), poly.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - c2[1], a[0] - c2[0]) <
             std::atan2(b[1] - c2[1], b[0] - c2[0]);
    });
    LeviResult levi = levi_directions(poly, p.tol);
    res.image = p;
    res.directions.assign(levi.directions.begin(), levi.directions.end());
    res.certificate = euclidean_verify(p, res.directions);
    res.vertex_bijection.resize(p.vertices.size());
    for (size_t i = 0; i < p.vertices.size(); ++i)
      res.vertex_bijection[i] = static_cast<int>(i);
    return res;
  }
  if (p.d < 2) fail(Err::UnsupportedDimension, "combinatorial illumination needs d >= 2");

  SphericalPolytope sp = embed(p, default_embed_scale(p));
  res.witness = construct_witness(sp, seed);
  const Vec& c = res.witness.witness.greatsphere_normal;
  res.image = project(sp, c);
  res.directions = ideal_directions(res.witness.witness.lights, c, p.tol);
  res.certificate = euclidean_verify(res.image, res.directions);

  FaceLattice l1 = euclidean_face_lattice(p);
  FaceLattice l2 = euclidean_face_lattice(res.image);
  auto bij = lattice_isomorphic(l1, l2);
  if (!bij)
    fail(Err::VerificationFailed, "image polytope not combinatorially equivalent");
  res.vertex_bijection = *bij;
  return res;
}

}  // namespace spherill
