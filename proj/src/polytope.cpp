#include "spherill/polytope.hpp"

#include <atomic>
#include <map>
#include <set>

namespace spherill {

namespace {

std::atomic<uint64_t> g_polytope_ids{1};

// spherical dimension of a vertex index set: linear rank - 1
int spherical_dim(const std::vector<Vec>& vertices, const std::vector<int>& idx) {
  std::vector<Vec> rows;
  for (int i : idx) rows.push_back(vertices[i]);
  return static_cast<int>(numeric_rank(rows, vertices[0].size(), 1e-7)) - 1;
}

}  // namespace

int FaceLattice::find(const std::vector<int>& verts) const {
  for (size_t i = 0; i < faces.size(); ++i)
    if (faces[i].verts == verts) return static_cast<int>(i);
  return -1;
}

SphericalPolytope from_vertices(int d, const std::vector<Vec>& points,
                                const Tolerances& tol) {
  tol.validate();
  if (d < 1) fail(Err::UnsupportedDimension, "d must be >= 1");
  const size_t amb = static_cast<size_t>(d) + 1;
  if (points.size() < amb)
    fail(Err::DegenerateDimension, "need at least d+1 points");

  std::vector<Vec> pts;
  for (const Vec& p : points) {
    if (p.size() != amb) fail(Err::ParseError, "point with wrong ambient dimension");
    Vec u = normalize(p, tol).coords;
    bool dup = false;
    for (const Vec& q : pts)
      if (1.0 - dot(u, q) <= tol.dedup) { dup = true; break; }
    if (!dup) pts.push_back(std::move(u));
  }
  if (pts.size() < amb) fail(Err::DegenerateDimension, "fewer than d+1 distinct points");
  if (pts.size() > 512) fail(Err::UnsupportedDimension, "more than 512 vertices");

  // hemisphere margin: the min-norm point of conv(vertices) realizes
  // max_{|x|<=1} min_i <x, v_i>
  Vec w = min_norm_point(pts);
  double margin = norm(w);
  if (margin <= tol.pred)
    fail(Err::NotInOpenHemisphere, "no containing open hemisphere with positive margin");
  Vec center = (1.0 / margin) * w;

  if (numeric_rank(pts, amb, 1e-7) != amb)
    fail(Err::DegenerateDimension, "cone of the input is not full-dimensional");

  // gnomonic image in the tangent space at the margin center
  std::vector<Vec> frame = complete_basis({center}, amb);
  std::vector<Vec> z(pts.size(), zeros(d));
  for (size_t i = 0; i < pts.size(); ++i) {
    double denom = dot(pts[i], center);
    for (int k = 0; k < d; ++k) z[i][k] = dot(pts[i], frame[k + 1]) / denom;
  }
  HullResult hull = convex_hull(z);

  // keep extreme points only, in canonical (lexicographic) order
  std::vector<Vec> verts;
  for (int i : hull.vertices) verts.push_back(pts[i]);
  std::vector<size_t> order(verts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return verts[a] < verts[b]; });
  std::vector<Vec> sorted_verts;
  std::vector<int> pos_of_hullvert(pts.size(), -1);
  for (size_t r = 0; r < order.size(); ++r) sorted_verts.push_back(verts[order[r]]);
  for (size_t r = 0; r < order.size(); ++r)
    pos_of_hullvert[hull.vertices[order[r]]] = static_cast<int>(r);

  SphericalPolytope p;
  p.d = d;
  p.vertices = std::move(sorted_verts);
  p.hemisphere_center = center;
  p.hemisphere_margin = margin;
  p.tol = tol;
  p.id = g_polytope_ids.fetch_add(1);

  // cone facet normals from the spans of the hull facets
  struct FacetTmp {
    Vec normal;
    std::vector<int> verts;
  };
  std::vector<FacetTmp> facets;
  Vec inner = zeros(amb);
  for (const Vec& v : p.vertices) inner += v;
  for (const HullFacet& hf : hull.facets) {
    FacetTmp ft;
    std::vector<Vec> rows;
    for (int i : hf.verts) {
      ft.verts.push_back(pos_of_hullvert[i]);
      rows.push_back(pts[i]);
    }
    std::sort(ft.verts.begin(), ft.verts.end());
    // condition check on the spanning set
    Vec sing;
    Mat vecs;
    gram_svd(rows, amb, sing, vecs);
    if (sing[d - 1] <= 1e-8 * sing[0] || sing[0] / sing[d - 1] > 1e8)
      fail(Err::DegenerateDimension, "near-degenerate facet spanning set");
    Vec n = vecs.row(amb - 1);
    n *= 1.0 / norm(n);
    if (dot(n, inner) > 0.0) n = -n;
    ft.normal = std::move(n);
    facets.push_back(std::move(ft));
  }
  std::sort(facets.begin(), facets.end(),
            [](const FacetTmp& a, const FacetTmp& b) { return a.normal < b.normal; });
  for (FacetTmp& ft : facets) {
    for (const Vec& v : p.vertices)
      if (dot(ft.normal, v) > tol.pred)
        fail(Err::DegenerateDimension, "facet normal fails the supporting inequality");
    p.facet_normals.push_back(std::move(ft.normal));
    p.facet_vertices.push_back(std::move(ft.verts));
  }
  return p;
}

FaceLattice closure_lattice(int n_vertices, int d,
                            const std::vector<std::vector<int>>& facet_vertices,
                            const std::function<int(const std::vector<int>&)>& dim_of) {
  std::vector<Bits> facet_bits;
  Bits all;
  for (int i = 0; i < n_vertices; ++i) all.set(i);
  for (const auto& fv : facet_vertices) facet_bits.push_back(Bits::from(fv));

  std::set<Bits> closed(facet_bits.begin(), facet_bits.end());
  std::vector<Bits> work(facet_bits);
  while (!work.empty()) {
    Bits cur = work.back();
    work.pop_back();
    for (const Bits& f : facet_bits) {
      Bits inter = cur & f;
      if (inter.none() || closed.count(inter)) continue;
      closed.insert(inter);
      work.push_back(inter);
    }
  }
  closed.erase(all);  // the polytope itself is not a proper face

  FaceLattice lat;
  lat.d = d;
  lat.n_vertices = n_vertices;
  for (const Bits& b : closed) {
    Face f;
    f.verts = b.indices(n_vertices);
    f.dim = dim_of(f.verts);
    if (f.dim < 0 || f.dim > d - 1) fail(Err::DegenerateDimension, "face with bad dimension");
    lat.faces.push_back(std::move(f));
  }
  std::sort(lat.faces.begin(), lat.faces.end(), [](const Face& a, const Face& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.verts < b.verts;
  });
  lat.by_dim.assign(static_cast<size_t>(d), {});
  for (size_t i = 0; i < lat.faces.size(); ++i)
    lat.by_dim[lat.faces[i].dim].push_back(static_cast<int>(i));
  for (size_t i = 0; i < lat.faces.size(); ++i) {
    Bits bi = Bits::from(lat.faces[i].verts);
    for (size_t j = 0; j < lat.faces.size(); ++j) {
      if (lat.faces[j].dim != lat.faces[i].dim + 1) continue;
      if (bi.subset_of(Bits::from(lat.faces[j].verts)))
        lat.hasse.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return lat;
}

FaceLattice face_lattice(const SphericalPolytope& p) {
  FaceLattice lat = closure_lattice(
      static_cast<int>(p.vertices.size()), p.d, p.facet_vertices,
      [&](const std::vector<int>& idx) { return spherical_dim(p.vertices, idx); });
  // attach supporting normals (mean of the containing facets' normals)
  for (Face& f : lat.faces) {
    f.owner = p.id;
    Vec n = zeros(p.ambient());
    Bits fb = Bits::from(f.verts);
    for (size_t k = 0; k < p.facet_vertices.size(); ++k)
      if (fb.subset_of(Bits::from(p.facet_vertices[k]))) n += p.facet_normals[k];
    f.support_normal = (1.0 / norm(n)) * n;
  }
  return lat;
}

SphericalPolytope polar(const SphericalPolytope& p) {
  SphericalPolytope q = from_vertices(p.d, p.facet_normals, p.tol);
  if (q.vertices.size() != p.facet_normals.size())
    fail(Err::DegenerateDimension, "polar lost vertices; input cone degenerate");
  return q;
}

Face minimal_face_containing(const SphericalPolytope& p, const UnitPoint& q) {
  const double tp = p.tol.pred;
  std::vector<int> eq;
  for (size_t i = 0; i < p.facet_normals.size(); ++i) {
    double s = dot(p.facet_normals[i], q.coords);
    if (s > tp) fail(Err::NotOnBoundary, "point lies outside the polytope");
    if (std::fabs(s) <= tp) eq.push_back(static_cast<int>(i));
  }
  if (eq.empty()) fail(Err::NotOnBoundary, "point lies in the interior");
  Bits verts;
  for (int i = 0; i < static_cast<int>(p.vertices.size()); ++i) verts.set(i);
  for (int f : eq) verts = verts & Bits::from(p.facet_vertices[f]);
  if (verts.none()) fail(Err::NotOnBoundary, "no face carries the point");
  Face out;
  out.owner = p.id;
  out.verts = verts.indices(static_cast<int>(p.vertices.size()));
  out.dim = spherical_dim(p.vertices, out.verts);
  Vec n = zeros(p.ambient());
  for (int f : eq) n += p.facet_normals[f];
  out.support_normal = (1.0 / norm(n)) * n;
  return out;
}

bool is_face_of(const SphericalPolytope& p, const std::vector<int>& verts) {
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

std::vector<Vec> conjugate_vertex_coords(const SphericalPolytope& p, const Face& f) {
  if (f.owner != p.id || !is_face_of(p, f.verts))
    fail(Err::InvalidFace, "face does not belong to this polytope");
  std::vector<Vec> out;
  Bits fb = Bits::from(f.verts);
  for (size_t k = 0; k < p.facet_vertices.size(); ++k)
    if (fb.subset_of(Bits::from(p.facet_vertices[k]))) out.push_back(p.facet_normals[k]);
  if (out.empty()) fail(Err::InvalidFace, "face not contained in any facet");
  return out;
}

Face conjugate_face(const SphericalPolytope& p, const Face& f) {
  return conjugate_face(p, f, polar(p));
}

Face conjugate_face(const SphericalPolytope& p, const Face& f,
                    const SphericalPolytope& q) {
  std::vector<Vec> coords = conjugate_vertex_coords(p, f);
  Face out;
  out.owner = q.id;
  for (const Vec& c : coords) {
    int found = -1;
    for (size_t i = 0; i < q.vertices.size(); ++i)
      if (1.0 - dot(q.vertices[i], c) <= p.tol.dedup) {
        found = static_cast<int>(i);
        break;
      }
    if (found < 0) fail(Err::InvalidFace, "conjugate vertex missing from polar");
    out.verts.push_back(found);
  }
  std::sort(out.verts.begin(), out.verts.end());
  out.dim = spherical_dim(q.vertices, out.verts);
  Vec n = zeros(p.ambient());
  Bits ob = Bits::from(out.verts);
  for (size_t k = 0; k < q.facet_vertices.size(); ++k)
    if (ob.subset_of(Bits::from(q.facet_vertices[k]))) n += q.facet_normals[k];
  out.support_normal = (1.0 / norm(n)) * n;
  return out;
}

PartialFlag find_partial_flag(const SphericalPolytope& p) {
  if (p.d < 2) fail(Err::UnsupportedDimension, "flags need d >= 2");
  PartialFlag flag;
  if (p.d == 2) return flag;  // trivial flag of the polygon itself
  FaceLattice lat = face_lattice(p);
  // descending chain from the first facet, truncated at dimension 2
  int cur = lat.by_dim[p.d - 1].front();
  std::vector<Face> chain{lat.faces[cur]};
  for (int dim = p.d - 2; dim >= 2; --dim) {
    Bits curb = Bits::from(lat.faces[cur].verts);
    int next = -1;
    for (int cand : lat.by_dim[dim])
      if (Bits::from(lat.faces[cand].verts).subset_of(curb)) {
        next = cand;
        break;
      }
    if (next < 0) fail(Err::DegenerateDimension, "no descending chain found");
    chain.push_back(lat.faces[next]);
    cur = next;
  }
  std::reverse(chain.begin(), chain.end());
  flag.chain = std::move(chain);
  return flag;
}

namespace {

// 1-skeleton adjacency from the lattice's 1-faces
std::vector<std::vector<int>> skeleton(const FaceLattice& l) {
  std::vector<std::vector<int>> adj(l.n_vertices);
  if (l.by_dim.size() > 1)
    for (int fi : l.by_dim[1]) {
      const Face& f = l.faces[fi];
      if (f.verts.size() == 2) {
        adj[f.verts[0]].push_back(f.verts[1]);
        adj[f.verts[1]].push_back(f.verts[0]);
      }
    }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

uint64_t hash_combine(uint64_t h, uint64_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

// Weisfeiler-Leman style vertex labels refined over the skeleton, seeded with
// per-vertex face-incidence profiles.
std::vector<uint64_t> vertex_labels(const FaceLattice& l,
                                    const std::vector<std::vector<int>>& adj) {
  std::vector<uint64_t> lab(l.n_vertices, 0);
  for (const Face& f : l.faces)
    for (int v : f.verts)
      lab[v] = hash_combine(lab[v], (static_cast<uint64_t>(f.dim) << 32) |
                                        static_cast<uint64_t>(f.verts.size()));
  for (int round = 0; round < 3; ++round) {
    std::vector<uint64_t> next(lab);
    for (int v = 0; v < l.n_vertices; ++v) {
      std::vector<uint64_t> ns;
      for (int u : adj[v]) ns.push_back(lab[u]);
      std::sort(ns.begin(), ns.end());
      for (uint64_t x : ns) next[v] = hash_combine(next[v], x);
    }
    lab = std::move(next);
  }
  return lab;
}

}  // namespace

std::optional<std::vector<int>> lattice_isomorphic(const FaceLattice& l1,
                                                   const FaceLattice& l2) {
  if (l1.n_vertices != l2.n_vertices) return std::nullopt;
  if (l1.f_vector() != l2.f_vector()) return std::nullopt;

  auto adj1 = skeleton(l1), adj2 = skeleton(l2);
  auto lab1 = vertex_labels(l1, adj1), lab2 = vertex_labels(l2, adj2);
  {
    auto s1 = lab1, s2 = lab2;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    if (s1 != s2) return std::nullopt;
  }

  const int n = l1.n_vertices;
  std::set<Bits> faces2;
  for (const Face& f : l2.faces) faces2.insert(Bits::from(f.verts));

  std::vector<int> map(n, -1), inv(n, -1);

  // order vertices so each new one touches already-mapped ones when possible
  std::vector<int> order;
  std::vector<bool> used(n, false);
  for (int seed = 0; seed < n; ++seed) {
    if (used[seed]) continue;
    std::vector<int> queue{seed};
    used[seed] = true;
    while (!queue.empty()) {
      int v = queue.front();
      queue.erase(queue.begin());
      order.push_back(v);
      for (int u : adj1[v])
        if (!used[u]) {
          used[u] = true;
          queue.push_back(u);
        }
    }
  }

  std::function<bool(size_t)> rec = [&](size_t pos) -> bool {
    if (pos == order.size()) {
      // full face-set check
      for (const Face& f : l1.faces) {
        Bits img;
        for (int v : f.verts) img.set(map[v]);
        if (!faces2.count(img)) return false;
      }
      return true;
    }
    int v = order[pos];
    for (int w = 0; w < n; ++w) {
      if (inv[w] >= 0 || lab2[w] != lab1[v]) continue;
      if (adj1[v].size() != adj2[w].size()) continue;
      bool ok = true;
      for (int u : adj1[v]) {
        if (map[u] < 0) continue;
        if (!std::binary_search(adj2[w].begin(), adj2[w].end(), map[u])) {
          ok = false;
          break;
        }
      }
      // mapped neighbors of w must all be neighbors of v (degree equality
      // plus the check above make this two-sided)
      if (ok) {
        int mapped_nbrs_v = 0;
        for (int u : adj1[v])
          if (map[u] >= 0) ++mapped_nbrs_v;
        int mapped_nbrs_w = 0;
        for (int u : adj2[w])
          if (inv[u] >= 0) ++mapped_nbrs_w;
        if (mapped_nbrs_v != mapped_nbrs_w) ok = false;
      }
      if (!ok) continue;
      map[v] = w;
      inv[w] = v;
      if (rec(pos + 1)) return true;
      map[v] = -1;
      inv[w] = -1;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return map;
}

SphericalPolytope spherical_simplex(int d, const Tolerances& tol) {
  std::vector<Vec> pts;
  for (int i = 0; i <= d; ++i) pts.push_back(basis_vec(static_cast<size_t>(d) + 1, i));
  return from_vertices(d, pts, tol);
}

}  // namespace spherill
