#include "spherill/koebe.hpp"

#include <atomic>
#include <map>
#include <queue>

namespace spherill {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

int PolyhedralGraph::edge_index(int u, int v) const {
  if (u > v) std::swap(u, v);
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i][0] == u && edges[i][1] == v) return static_cast<int>(i);
  return -1;
}

void PolyhedralGraph::validate() {
  if (n < 4 || faces.size() < 4)
    fail(Err::NotPolyhedralGraph, "needs at least 4 vertices and 4 faces");
  std::map<std::pair<int, int>, int> directed;  // (a,b) -> face
  for (size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& cyc = faces[fi];
    if (cyc.size() < 3) fail(Err::NotPolyhedralGraph, "face with fewer than 3 vertices");
    std::set<int> seen;
    for (int v : cyc) {
      if (v < 0 || v >= n) fail(Err::NotPolyhedralGraph, "vertex id out of range");
      if (!seen.insert(v).second)
        fail(Err::NotPolyhedralGraph, "face visits a vertex twice");
    }
    for (size_t t = 0; t < cyc.size(); ++t) {
      int a = cyc[t], b = cyc[(t + 1) % cyc.size()];
      if (!directed.emplace(std::make_pair(a, b), static_cast<int>(fi)).second)
        fail(Err::NotPolyhedralGraph, "directed edge used twice");
    }
  }
  edges.clear();
  edge_faces.clear();
  for (const auto& [de, fi] : directed) {
    auto rev = directed.find({de.second, de.first});
    if (rev == directed.end())
      fail(Err::NotPolyhedralGraph, "edge lacks its opposite orientation");
    if (de.first < de.second) {
      edges.push_back({de.first, de.second});
      edge_faces.push_back({fi, rev->second});
    }
  }
  if (n - e() + m() != 2)
    fail(Err::NotPolyhedralGraph, "Euler relation n - e + m = 2 fails");

  // rotation system: in face (..a,v,b..), edge (v,b) is succeeded by (v,a)
  std::map<std::pair<int, int>, std::pair<int, int>> succ;  // (v,b) -> (a, face)
  for (size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& cyc = faces[fi];
    const size_t k = cyc.size();
    for (size_t t = 0; t < k; ++t) {
      int a = cyc[(t + k - 1) % k], v = cyc[t], b = cyc[(t + 1) % k];
      succ[{v, b}] = {a, static_cast<int>(fi)};
    }
  }
  rotation.assign(n, {});
  std::vector<int> degree(n, 0);
  for (const auto& [key, val] : succ) ++degree[key.first];
  for (int v = 0; v < n; ++v) {
    if (degree[v] < 3) fail(Err::NotPolyhedralGraph, "vertex of degree < 3");
    int start = -1;
    for (const auto& [key, val] : succ)
      if (key.first == v) { start = key.second; break; }
    int cur = start;
    for (int step = 0; step < degree[v]; ++step) {
      auto it = succ.find({v, cur});
      if (it == succ.end()) fail(Err::NotPolyhedralGraph, "broken rotation");
      rotation[v].push_back({cur, it->second.second});
      cur = it->second.first;
    }
    if (cur != start)
      fail(Err::NotPolyhedralGraph, "rotation at a vertex is not a single cycle");
  }
  // connectivity and 3-connectivity (brute force at desk scale)
  std::vector<std::vector<int>> adj(n);
  for (const auto& e2 : edges) {
    adj[e2[0]].push_back(e2[1]);
    adj[e2[1]].push_back(e2[0]);
  }
  auto connected_without = [&](int skip1, int skip2) {
    int first = -1;
    for (int v = 0; v < n; ++v)
      if (v != skip1 && v != skip2) { first = v; break; }
    std::vector<bool> vis(n, false);
    std::queue<int> q;
    q.push(first);
    vis[first] = true;
    int count = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      ++count;
      for (int u : adj[v])
        if (!vis[u] && u != skip1 && u != skip2) {
          vis[u] = true;
          q.push(u);
        }
    }
    int expect = n - (skip1 >= 0 ? 1 : 0) - (skip2 >= 0 ? 1 : 0);
    return count == expect;
  };
  if (!connected_without(-1, -1)) fail(Err::NotPolyhedralGraph, "graph disconnected");
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      if (!connected_without(a, a == b ? -1 : b))
        fail(Err::NotPolyhedralGraph, "graph is not 3-connected");
}

PolyhedralGraph graph_from_faces(std::vector<std::vector<int>> faces) {
  PolyhedralGraph g;
  int mx = -1;
  for (const auto& f : faces)
    for (int v : f) mx = std::max(mx, v);
  g.n = mx + 1;
  g.faces = std::move(faces);
  g.validate();
  return g;
}

PolyhedralGraph graph_from_polytope(const EuclideanPolytope& p) {
  if (p.d != 3) fail(Err::UnsupportedDimension, "graph extraction needs d = 3");
  std::vector<std::vector<int>> faces;
  for (size_t f = 0; f < p.facet_vertices.size(); ++f) {
    const Vec& n = p.facet_normals[f];
    std::vector<Vec> frame = complete_basis({n}, 3);
    Vec e1 = frame[1], e2 = frame[2];
    if (dot(cross3(e1, e2), n) < 0.0) e2 = -e2;  // ccw seen from outside
    Vec c = zeros(3);
    for (int vi : p.facet_vertices[f]) c += p.vertices[vi];
    c *= 1.0 / static_cast<double>(p.facet_vertices[f].size());
    std::vector<int> cyc = p.facet_vertices[f];
    std::sort(cyc.begin(), cyc.end(), [&](int a, int b) {
      const Vec da = p.vertices[a] - c, db = p.vertices[b] - c;
      return std::atan2(dot(da, e2), dot(da, e1)) < std::atan2(dot(db, e2), dot(db, e1));
    });
    faces.push_back(std::move(cyc));
  }
  PolyhedralGraph g;
  g.n = static_cast<int>(p.vertices.size());
  g.faces = std::move(faces);
  g.validate();
  return g;
}

CircleOnSphere CircleOnSphere::from_minkowski(const Vec& x) {
  Vec spatial{x[0], x[1], x[2]};
  double sn = norm(spatial);
  if (sn <= std::fabs(x[3]))
    fail(Err::SolverDiverged, "Minkowski vector is not spacelike");
  CircleOnSphere c;
  c.normal = (1.0 / sn) * spatial;
  c.offset = x[3] / sn;
  return c;
}

namespace {

// Stereographic lift of a plane circle (center, radius) straight to its
// Minkowski vector, normalized to Lorentz norm 1 by the exact factor 1/r.
// Avoiding the (normal, offset) intermediate matters: crevice circles with
// r ~ 1e-8 have 1 - |offset| ~ r^2, which plain doubles cannot carry.
Vec lift_circle_minkowski(const Vec& center, double radius) {
  double cn = norm(center);
  double rc = (radius - cn) * (radius + cn);  // r^2 - |c|^2 without cancellation
  Vec xi{-center[0] / radius, -center[1] / radius, 0.5 * (rc + 1.0) / radius,
         0.5 * (rc - 1.0) / radius};
  return xi;
}

// lift of a line { x : <nrm, x> = c } (nrm unit 2-vector); already unit
Vec lift_line_minkowski(const Vec& nrm, double c) {
  return {nrm[0], nrm[1], c, c};
}

Vec lift_point(const Vec& z) {
  double q = norm2(z);
  return {2.0 * z[0] / (q + 1.0), 2.0 * z[1] / (q + 1.0), (q - 1.0) / (q + 1.0)};
}

double mink_dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3];
}

// Gauss-Newton polish of the circle system in the balanced frame. The planar
// route is exact in exact arithmetic, but tiny crevice circles live at the
// edge of double precision there; after balancing everything is O(1) and two
// quadratic steps on the tangency/orthogonality equations restore the
// residuals to machine level.
void polish_circles(const PolyhedralGraph& g, std::vector<Vec>& vmink,
                    std::vector<Vec>& fmink) {
  const int n = g.n, m = g.m();
  const int nvar = 4 * (n + m);
  auto var = [&](bool face, int idx, int comp) {
    return 4 * (face ? n + idx : idx) + comp;
  };
  // tangency signs from the initial guess
  std::vector<double> vsign(g.e()), fsign(g.e());
  for (int e = 0; e < g.e(); ++e) {
    vsign[e] = mink_dot(vmink[g.edges[e][0]], vmink[g.edges[e][1]]) > 0 ? 1.0 : -1.0;
    fsign[e] = mink_dot(fmink[g.edge_faces[e][0]], fmink[g.edge_faces[e][1]]) > 0
                   ? 1.0
                   : -1.0;
  }
  const int neq = (n + m) + 6 * g.e();
  for (int iter = 0; iter < 3; ++iter) {
    Vec res(neq, 0.0);
    // sparse-ish Jacobian rows: at most two circles per equation
    struct Row {
      int a = -1, b = -1;  // variable-block indices (4 wide)
      Vec grad_a{0, 0, 0, 0}, grad_b{0, 0, 0, 0};
    };
    std::vector<Row> rows(neq);
    int eq = 0;
    auto jvec = [](const Vec& x) { return Vec{x[0], x[1], x[2], -x[3]}; };
    for (int i = 0; i < n + m; ++i) {
      const Vec& z = i < n ? vmink[i] : fmink[i - n];
      res[eq] = mink_dot(z, z) - 1.0;
      rows[eq].a = i;
      rows[eq].grad_a = 2.0 * jvec(z);
      ++eq;
    }
    for (int e = 0; e < g.e(); ++e) {
      int a = g.edges[e][0], b = g.edges[e][1];
      int f = g.edge_faces[e][0], gg = g.edge_faces[e][1];
      auto pair_eq = [&](int ia, const Vec& za, int ib, const Vec& zb, double target) {
        res[eq] = mink_dot(za, zb) - target;
        rows[eq].a = ia;
        rows[eq].grad_a = jvec(zb);
        rows[eq].b = ib;
        rows[eq].grad_b = jvec(za);
        ++eq;
      };
      pair_eq(a, vmink[a], b, vmink[b], vsign[e]);
      pair_eq(n + f, fmink[f], n + gg, fmink[gg], fsign[e]);
      pair_eq(a, vmink[a], n + f, fmink[f], 0.0);
      pair_eq(a, vmink[a], n + gg, fmink[gg], 0.0);
      pair_eq(b, vmink[b], n + f, fmink[f], 0.0);
      pair_eq(b, vmink[b], n + gg, fmink[gg], 0.0);
    }
    double worst = 0.0;
    for (double r2 : res) worst = std::max(worst, std::fabs(r2));
    if (worst < 1e-13) break;
    // normal equations with a small Levenberg shift for the Mobius gauge
    Mat nm(nvar, nvar);
    Vec rhs(nvar, 0.0);
    for (int r2 = 0; r2 < neq; ++r2) {
      const Row& row = rows[r2];
      for (int c1 = 0; c1 < 4; ++c1) {
        if (row.a >= 0) {
          int ia = var(false, row.a, c1);
          rhs[ia] -= row.grad_a[c1] * res[r2];
          for (int c2 = 0; c2 < 4; ++c2) {
            if (row.a >= 0) nm(ia, var(false, row.a, c2)) += row.grad_a[c1] * row.grad_a[c2];
            if (row.b >= 0) nm(ia, var(false, row.b, c2)) += row.grad_a[c1] * row.grad_b[c2];
          }
        }
        if (row.b >= 0) {
          int ib = var(false, row.b, c1);
          rhs[ib] -= row.grad_b[c1] * res[r2];
          for (int c2 = 0; c2 < 4; ++c2) {
            nm(ib, var(false, row.b, c2)) += row.grad_b[c1] * row.grad_b[c2];
            if (row.a >= 0) nm(ib, var(false, row.a, c2)) += row.grad_b[c1] * row.grad_a[c2];
          }
        }
      }
    }
    for (int i = 0; i < nvar; ++i) nm(i, i) += 1e-9;
    Vec step;
    try {
      step = solve_spd(nm, rhs);
    } catch (const std::exception&) {
      break;  // keep the unpolished data; residual checks downstream decide
    }
    for (int i = 0; i < n; ++i)
      for (int c1 = 0; c1 < 4; ++c1) vmink[i][c1] += step[var(false, i, c1)];
    for (int f = 0; f < m; ++f)
      for (int c1 = 0; c1 < 4; ++c1) fmink[f][c1] += step[var(true, f, c1)];
  }
}

}  // namespace

MobiusMap MobiusMap::identity() {
  return {Mat::identity(4)};
}

MobiusMap MobiusMap::boost_to_origin(const Vec& p) {
  double b2 = norm2(p);
  if (b2 >= 1.0) fail(Err::PointNotOnFacePlane, "boost point outside the ball");
  if (b2 < 1e-32) return identity();
  double gamma = 1.0 / std::sqrt(1.0 - b2);
  double coef = gamma * gamma / (gamma + 1.0);  // (gamma-1)/|p|^2, stable near 0
  Mat l = Mat::identity(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) l(i, j) = (i == j ? 1.0 : 0.0) + coef * p[i] * p[j];
  for (int i = 0; i < 3; ++i) {
    l(i, 3) = -gamma * p[i];
    l(3, i) = -gamma * p[i];
  }
  l(3, 3) = gamma;
  return {l};
}

MobiusMap MobiusMap::compose(const MobiusMap& inner) const {
  return {mat_mul(l, inner.l)};
}

MobiusMap MobiusMap::inverse() const {
  // J L^T J with J = diag(1,1,1,-1)
  Mat t = l.transposed();
  Mat out = t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = ((i == 3) ? -1.0 : 1.0) * ((j == 3) ? -1.0 : 1.0);
      out(i, j) = s * t(i, j);
    }
  return {out};
}

CircleOnSphere MobiusMap::apply(const CircleOnSphere& c) const {
  return CircleOnSphere::from_minkowski(mat_vec(l, c.minkowski()));
}

Vec MobiusMap::apply_point(const Vec& x) const {
  Vec y = mat_vec(l, {x[0], x[1], x[2], 1.0});
  if (y[3] <= 0.0) fail(Err::SolverDiverged, "Mobius map not orthochronous on point");
  Vec out{y[0] / y[3], y[1] / y[3], y[2] / y[3]};
  return (1.0 / norm(out)) * out;
}

double MobiusMap::lorentz_defect() const {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k)
        s += l(k, i) * ((k == 3) ? -1.0 : 1.0) * l(k, j);
      double want = (i == j) ? ((i == 3) ? -1.0 : 1.0) : 0.0;
      worst = std::max(worst, std::fabs(s - want));
    }
  return worst;
}

namespace {

double lorentz_dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3];
}

}  // namespace

KoebeResiduals verify_realization(const KoebeRealization& k) {
  KoebeResiduals r;
  r.solver_defect = k.residuals.solver_defect;
  r.layout_defect = k.residuals.layout_defect;
  const PolyhedralGraph& g = k.graph;

  for (const CircleOnSphere& c : k.vertex_circles)
    r.max_vertex_offset = std::max(r.max_vertex_offset, std::fabs(c.offset));

  for (int ei = 0; ei < g.e(); ++ei) {
    int a = g.edges[ei][0], b = g.edges[ei][1];
    const Vec& va = k.vertices[a];
    const Vec& vb = k.vertices[b];
    Vec w = vb - va;
    Vec ww = (1.0 / norm(w)) * w;
    Vec foot = va - dot(va, ww) * ww;
    double s = -dot(va, ww) / norm(vb - va);
    r.edge_tangency = std::max(r.edge_tangency, std::fabs(norm(foot) - 1.0));
    if (s < -1e-9 || s > 1.0 + 1e-9)
      r.edge_tangency = std::max(r.edge_tangency, 1.0);  // touches outside the segment
    const Vec& t = k.tangency[ei];
    r.incidence = std::max(r.incidence, std::fabs(norm(t) - 1.0));
    for (int side = 0; side < 2; ++side) {
      const CircleOnSphere& vc = k.vertex_circles[side == 0 ? a : b];
      const CircleOnSphere& fc = k.face_circles[g.edge_faces[ei][side]];
      r.incidence = std::max(r.incidence, std::fabs(dot(vc.normal, t) - vc.offset));
      r.incidence = std::max(r.incidence, std::fabs(dot(fc.normal, t) - fc.offset));
    }
    // tangency of the two vertex circles and of the two face circles
    double vv = lorentz_dot(k.vertex_circles[a].minkowski(),
                            k.vertex_circles[b].minkowski());
    double ff = lorentz_dot(k.face_circles[g.edge_faces[ei][0]].minkowski(),
                            k.face_circles[g.edge_faces[ei][1]].minkowski());
    r.circle_tangency = std::max(r.circle_tangency, std::fabs(std::fabs(vv) - 1.0));
    r.circle_tangency = std::max(r.circle_tangency, std::fabs(std::fabs(ff) - 1.0));
  }
  for (int fi = 0; fi < g.m(); ++fi) {
    const CircleOnSphere& fc = k.face_circles[fi];
    for (int vi : g.faces[fi]) {
      r.planarity =
          std::max(r.planarity, std::fabs(dot(fc.normal, k.vertices[vi]) - fc.offset));
      double ortho = lorentz_dot(fc.minkowski(), k.vertex_circles[vi].minkowski());
      r.orthogonality = std::max(r.orthogonality, std::fabs(ortho));
    }
  }
  return r;
}

namespace {

// Radii system for a fixed (outer face, gauge vertex) choice.
//
// Around a face containing vstar, the vstar corner is the reflex complement
// 2pi - 2 atan(r*/rho): vstar's circle wraps around the rest of the packing.
// Its term therefore enters the face equation with a negative sign and a
// zero target; the vstar vertex equation itself is the dropped gauge row.
// The system is mildly nonsymmetric, so it is solved by Levenberg-Marquardt
// on the squared residual.
struct PackingSolve {
  std::vector<double> x, y;  // log radii per vertex / per face
  double defect = 1e300;     // final max angle-equation residual
};

bool solve_packing(const PolyhedralGraph& g, int f0, int vstar,
                   const std::vector<std::vector<int>>& faces_of_vertex,
                   PackingSolve& out) {
  const int n = g.n, m = g.m();
  std::vector<bool> on_f0(n, false);
  for (int v : g.faces[f0]) on_f0[v] = true;

  std::vector<int> xid(n, -1), yid(m, -1);
  int nu = 0;
  for (int v = 0; v < n; ++v)
    if (v != vstar) xid[v] = nu++;
  for (int f = 0; f < m; ++f)
    if (f != f0) yid[f] = nu++;

  std::vector<double> x(n, 0.0), y(m, 0.0);
  auto residual = [&](const std::vector<double>& xv, const std::vector<double>& yv,
                      Vec& res, double& linf) {
    res.assign(nu, 0.0);
    linf = 0.0;
    for (int v = 0; v < n; ++v) {
      double s = 0.0;
      for (int f : faces_of_vertex[v]) {
        if (f == f0) continue;
        s += 2.0 * std::atan(std::exp(yv[f] - xv[v]));
      }
      double r = s - (on_f0[v] ? kPi : 2.0 * kPi);
      if (xid[v] >= 0) {
        res[xid[v]] = r;
        linf = std::max(linf, std::fabs(r));
      }
    }
    for (int f = 0; f < m; ++f) {
      if (f == f0) continue;
      double s = 0.0;
      bool has_vstar = false;
      for (int v : g.faces[f]) {
        if (v == vstar) {
          has_vstar = true;
          s -= 2.0 * std::atan(std::exp(xv[v] - yv[f]));
        } else {
          s += 2.0 * std::atan(std::exp(xv[v] - yv[f]));
        }
      }
      double r = s - (has_vstar ? 0.0 : 2.0 * kPi);
      res[yid[f]] = r;
      linf = std::max(linf, std::fabs(r));
    }
    return norm2(res);
  };

  Vec res;
  double linf = 0.0;
  double err2 = residual(x, y, res, linf);
  double lambda = 1e-6;
  for (int iter = 0; iter < 600 && linf > 1e-12; ++iter) {
    Mat jac(nu, nu);
    for (int v = 0; v < n; ++v) {
      for (int f : faces_of_vertex[v]) {
        if (f == f0) continue;
        double w = 1.0 / std::cosh(y[f] - x[v]);
        if (v == vstar) {
          jac(yid[f], yid[f]) += w;  // the negated vstar term
          continue;
        }
        jac(xid[v], xid[v]) -= w;
        jac(xid[v], yid[f]) += w;
        jac(yid[f], xid[v]) += w;
        jac(yid[f], yid[f]) -= w;
      }
    }
    // Levenberg-Marquardt step: (J^T J + lambda I) d = -J^T res
    Mat jt = jac.transposed();
    Mat nm = mat_mul(jt, jac);
    Vec rhs = mat_vec(jt, res);
    for (int i = 0; i < nu; ++i) rhs[i] = -rhs[i];
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      Mat nm2 = nm;
      for (int i = 0; i < nu; ++i) nm2(i, i) += lambda * (1.0 + nm(i, i));
      Vec step;
      try {
        step = solve_spd(nm2, rhs);
      } catch (const std::exception&) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> x2(x), y2(y);
      double big = 0.0;
      for (int v = 0; v < n; ++v)
        if (xid[v] >= 0) {
          x2[v] += step[xid[v]];
          big = std::max(big, std::fabs(x2[v]));
        }
      for (int f = 0; f < m; ++f)
        if (yid[f] >= 0) {
          y2[f] += step[yid[f]];
          big = std::max(big, std::fabs(y2[f]));
        }
      if (big > 40.0) {  // runaway branch; treat as a rejected step
        lambda *= 10.0;
        if (lambda > 1e14) return false;
        continue;
      }
      Vec res2;
      double linf2 = 0.0;
      double err2b = residual(x2, y2, res2, linf2);
      if (err2b < err2) {
        x = std::move(x2);
        y = std::move(y2);
        res = std::move(res2);
        err2 = err2b;
        linf = linf2;
        lambda = std::max(lambda / 4.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e14) break;
      }
    }
    if (!accepted) break;  // stalled; accept whatever precision we reached
  }

  // Newton polish on the unsquared system: LM's normal equations double the
  // condition number and floor out near 1e-11; a few plain steps reach 1e-14.
  for (int polish = 0; polish < 12 && linf > 1e-13 && linf < 1e-6; ++polish) {
    Mat jac(nu, nu);
    for (int v = 0; v < n; ++v) {
      for (int f : faces_of_vertex[v]) {
        if (f == f0) continue;
        double w = 1.0 / std::cosh(y[f] - x[v]);
        if (v == vstar) {
          jac(yid[f], yid[f]) += w;
          continue;
        }
        jac(xid[v], xid[v]) -= w;
        jac(xid[v], yid[f]) += w;
        jac(yid[f], xid[v]) += w;
        jac(yid[f], yid[f]) -= w;
      }
    }
    Vec rhs(nu);
    for (int i = 0; i < nu; ++i) rhs[i] = -res[i];
    Vec step;
    try {
      step = solve_linear(jac, rhs);
    } catch (const std::exception&) {
      break;
    }
    std::vector<double> x2(x), y2(y);
    for (int v = 0; v < n; ++v)
      if (xid[v] >= 0) x2[v] += step[xid[v]];
    for (int f = 0; f < m; ++f)
      if (yid[f] >= 0) y2[f] += step[yid[f]];
    Vec res2;
    double linf2 = 0.0;
    double err2b = residual(x2, y2, res2, linf2);
    if (linf2 >= linf) break;
    x = std::move(x2);
    y = std::move(y2);
    res = std::move(res2);
    err2 = err2b;
    linf = linf2;
  }

  out.x = std::move(x);
  out.y = std::move(y);
  out.defect = linf;
  return linf <= 1e-10;
}

}  // namespace

EuclideanPolytope realization_polytope(const KoebeRealization& k) {
  static std::atomic<uint64_t> ids{1ULL << 48};
  EuclideanPolytope ep;
  ep.d = 3;
  ep.id = ids.fetch_add(1);
  ep.vertices = k.vertices;
  double scale = 1e-12;
  for (const Vec& v : k.vertices) scale = std::max(scale, norm(v));
  for (int f = 0; f < k.graph.m(); ++f) {
    const CircleOnSphere& fc = k.face_circles[f];
    std::vector<int> fv = k.graph.faces[f];
    std::sort(fv.begin(), fv.end());
    // orient outward: a normalized face sits on a plane through the origin,
    // where the stored circle orientation is arbitrary
    Vec nrm = fc.normal;
    double off = fc.offset;
    double worst_out = -1e300;
    for (size_t vi = 0; vi < k.vertices.size(); ++vi)
      if (!std::binary_search(fv.begin(), fv.end(), static_cast<int>(vi)))
        worst_out = std::max(worst_out, dot(nrm, k.vertices[vi]) - off);
    if (worst_out > 0.0) {
      nrm = -nrm;
      off = -off;
    }
    for (size_t vi = 0; vi < k.vertices.size(); ++vi) {
      double d = dot(nrm, k.vertices[vi]) - off;
      bool on = std::binary_search(fv.begin(), fv.end(), static_cast<int>(vi));
      if (on && std::fabs(d) > 1e-6 * scale)
        fail(Err::VerificationFailed, "realization face lost planarity");
      if (!on && d > -1e-9 * scale)
        fail(Err::VerificationFailed, "realization face fails strict support");
    }
    ep.facet_normals.push_back(std::move(nrm));
    ep.facet_offsets.push_back(off);
    ep.facet_vertices.push_back(std::move(fv));
  }
  return ep;
}

namespace {

// layout + lift + balance + polish for a solved (outer face, gauge) choice
KoebeRealization build_realization(const PolyhedralGraph& g, int f0, int vstar,
                                   const PackingSolve& solve, const Tolerances& tol) {
  const int n = g.n, m = g.m();
  const double defect = solve.defect;

  std::vector<double> r(n), rho(m, 0.0);
  for (int v = 0; v < n; ++v) r[v] = std::exp(solve.x[v]);
  for (int f = 0; f < m; ++f)
    if (f != f0) rho[f] = std::exp(solve.y[f]);

  // planar layout by propagating kite turns through the rotation system
  std::vector<Vec> vc(n, zeros(2));
  std::vector<Vec> fc(m, zeros(2));
  std::vector<bool> v_placed(n, false), f_placed(m, false);
  std::vector<std::vector<double>> ang(n);
  std::vector<std::map<int, int>> slot_of(n);
  for (int v = 0; v < n; ++v) {
    ang[v].assign(g.rotation[v].size(), 0.0);
    for (size_t i = 0; i < g.rotation[v].size(); ++i)
      slot_of[v][g.rotation[v][i][0]] = static_cast<int>(i);
  }
  double layout_defect = 0.0;
  // The projection pole sits inside vstar's cap, so vstar's planar circle
  // contains the rest of the packing: its edges are internal tangencies and
  // its rotation runs in the opposite sense.
  auto place_angles = [&](int v, int slot, double angle) {
    const size_t deg = g.rotation[v].size();
    const double sgn = (v == vstar) ? -1.0 : 1.0;
    int cur = slot;
    double a = angle;
    for (size_t step = 0; step < deg; ++step) {
      ang[v][cur] = a;
      int f = g.rotation[v][cur][1];
      a += sgn * ((f == f0) ? kPi : 2.0 * std::atan(rho[f] / r[v]));
      cur = static_cast<int>((cur + 1) % deg);
    }
  };
  auto neighbor_center = [&](int v, int u, const Vec& base, const Vec& dir) {
    if (v == vstar) return base + (r[v] - r[u]) * dir;
    if (u == vstar) return base - (r[u] - r[v]) * dir;
    return base + (r[v] + r[u]) * dir;
  };
  std::vector<Vec> tang(g.e(), zeros(2));
  std::vector<bool> t_set(g.e(), false);

  vc[vstar] = zeros(2);
  v_placed[vstar] = true;
  place_angles(vstar, 0, 0.0);
  std::queue<int> bfs;
  bfs.push(vstar);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (size_t i = 0; i < g.rotation[v].size(); ++i) {
      int u = g.rotation[v][i][0];
      int f = g.rotation[v][i][1];
      double a = ang[v][i];
      Vec dir{std::cos(a), std::sin(a)};
      int ei = g.edge_index(v, u);
      Vec t = vc[v] + r[v] * dir;
      if (!t_set[ei]) {
        tang[ei] = t;
        t_set[ei] = true;
      } else {
        layout_defect = std::max(layout_defect, dist(tang[ei], t));
      }
      if (f != f0) {
        double sgn = (v == vstar) ? -1.0 : 1.0;
        double half = sgn * std::atan(rho[f] / r[v]);
        double hyp = std::hypot(rho[f], r[v]);
        Vec cf = vc[v] + hyp * Vec{std::cos(a + half), std::sin(a + half)};
        if (!f_placed[f]) {
          fc[f] = cf;
          f_placed[f] = true;
        } else {
          layout_defect = std::max(layout_defect, dist(fc[f], cf));
        }
      }
      Vec cu = neighbor_center(v, u, vc[v], dir);
      if (!v_placed[u]) {
        vc[u] = cu;
        v_placed[u] = true;
        // internal tangency keeps the direction; external flips it
        double back = (v == vstar || u == vstar) ? a : a + kPi;
        place_angles(u, slot_of[u][v], back);
        bfs.push(u);
      } else {
        layout_defect = std::max(layout_defect, dist(vc[u], cu));
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (!v_placed[v]) fail(Err::SolverDiverged, "layout left a vertex unplaced");
  for (int f = 0; f < m; ++f)
    if (f != f0 && !f_placed[f]) fail(Err::SolverDiverged, "layout left a face unplaced");

  // f0's circle is the common tangent line of its boundary circles; fit it
  // from two boundary-edge tangency points
  const auto& cyc0 = g.faces[f0];
  Vec t0 = tang[g.edge_index(cyc0[0], cyc0[1])];
  Vec t1 = tang[g.edge_index(cyc0[1], cyc0[2 % cyc0.size()])];
  for (size_t t = 2; t < cyc0.size() && dist(t0, t1) < 1e-9; ++t)
    t1 = tang[g.edge_index(cyc0[t], cyc0[(t + 1) % cyc0.size()])];
  Vec line_dir = t1 - t0;
  line_dir *= 1.0 / norm(line_dir);
  Vec line_nrm{-line_dir[1], line_dir[0]};
  double line_c = dot(line_nrm, t0);

  KoebeRealization k;
  k.graph = g;
  std::vector<Vec> vertex_mink(n), face_mink(m);
  for (int v = 0; v < n; ++v) vertex_mink[v] = lift_circle_minkowski(vc[v], r[v]);
  for (int f = 0; f < m; ++f)
    face_mink[f] = (f == f0) ? lift_line_minkowski(line_nrm, line_c)
                             : lift_circle_minkowski(fc[f], rho[f]);
  for (int ei = 0; ei < g.e(); ++ei) k.tangency.push_back(lift_point(tang[ei]));

  // Mobius balancing: move the tangency centroid to the origin
  MobiusMap total = MobiusMap::identity();
  {
    std::vector<Vec> pts = k.tangency;
    double gn = 0.0;
    for (int it = 0; it < 1000; ++it) {
      Vec gbar = zeros(3);
      for (const Vec& q : pts) gbar += q;
      gbar *= 1.0 / static_cast<double>(pts.size());
      gn = norm(gbar);
      if (gn < 1e-13) break;
      double beta = 1.0;
      for (int bt = 0; bt < 40; ++bt) {
        MobiusMap b = MobiusMap::boost_to_origin(beta * gbar);
        std::vector<Vec> next(pts.size());
        Vec g2 = zeros(3);
        for (size_t i = 0; i < pts.size(); ++i) {
          next[i] = b.apply_point(pts[i]);
          g2 += next[i];
        }
        g2 *= 1.0 / static_cast<double>(pts.size());
        if (norm(g2) < gn) {
          pts = std::move(next);
          total = b.compose(total);
          break;
        }
        beta *= 0.5;
        if (bt == 39) fail(Err::SolverDiverged, "Mobius balancing stalled");
      }
    }
    if (gn >= 1e-10) fail(Err::SolverDiverged, "Mobius balancing did not converge");
  }
  for (int v = 0; v < n; ++v) vertex_mink[v] = mat_vec(total.l, vertex_mink[v]);
  for (int f = 0; f < m; ++f) face_mink[f] = mat_vec(total.l, face_mink[f]);
  polish_circles(g, vertex_mink, face_mink);
  k.vertex_circles.resize(n);
  k.face_circles.resize(m);
  for (int v = 0; v < n; ++v)
    k.vertex_circles[v] = CircleOnSphere::from_minkowski(vertex_mink[v]);
  for (int f = 0; f < m; ++f)
    k.face_circles[f] = CircleOnSphere::from_minkowski(face_mink[f]);
  // tangency points recomputed from the polished circles: the common point
  // of the better-conditioned tangent pair (vertex pair or face pair)
  for (int ei = 0; ei < g.e(); ++ei) {
    const CircleOnSphere* pairs[2][2] = {
        {&k.vertex_circles[g.edges[ei][0]], &k.vertex_circles[g.edges[ei][1]]},
        {&k.face_circles[g.edge_faces[ei][0]], &k.face_circles[g.edge_faces[ei][1]]}};
    double best_det = 0.0;
    Vec best_t;
    for (auto& pr : pairs) {
      double gab = dot(pr[0]->normal, pr[1]->normal);
      double det = 1.0 - gab * gab;
      if (det <= best_det) continue;
      double al = (pr[0]->offset - pr[1]->offset * gab) / det;
      double be = (pr[1]->offset - pr[0]->offset * gab) / det;
      Vec t = al * pr[0]->normal + be * pr[1]->normal;
      double tn = norm(t);
      if (tn > 0.5) {
        best_det = det;
        best_t = (1.0 / tn) * t;
      }
    }
    k.tangency[ei] = best_det > 0.0 ? best_t : total.apply_point(k.tangency[ei]);
  }

  // canonical orientation: positive offsets, poles on the outer side
  auto canon = [&](CircleOnSphere& c) {
    if (c.offset < 0.0) {
      c.normal = -c.normal;
      c.offset = -c.offset;
    }
    if (c.offset <= 1e-9)
      fail(Err::SolverDiverged, "balanced circle still near a great circle");
  };
  for (auto& c : k.vertex_circles) canon(c);
  for (auto& c : k.face_circles) canon(c);
  for (int v = 0; v < n; ++v) k.vertices.push_back(k.vertex_circles[v].pole());

  k.residuals.solver_defect = defect;
  k.residuals.layout_defect = layout_defect;
  k.residuals = [&] {
    KoebeResiduals rr = verify_realization(k);
    rr.solver_defect = defect;
    rr.layout_defect = layout_defect;
    return rr;
  }();
  if (k.residuals.max_vertex_offset >= 1.0 - tol.pred)
    fail(Err::SolverDiverged, "vertex circle too close to a great circle");
  return k;
}

}  // namespace

KoebeRealization midscribe(const PolyhedralGraph& graph, const Tolerances& tol) {
  PolyhedralGraph g = graph;
  g.validate();
  const int n = g.n, m = g.m();

  std::vector<std::vector<int>> faces_of_vertex(n);
  for (int v = 0; v < n; ++v)
    for (const auto& slot : g.rotation[v]) faces_of_vertex[v].push_back(slot[1]);

  // candidate outer faces by size (descending), then gauge vertices around
  // each; the first pair that solves AND builds a valid realization wins, so
  // a balancing or layout failure falls through to the next normalization
  std::vector<int> face_order(m);
  for (int f = 0; f < m; ++f) face_order[f] = f;
  std::sort(face_order.begin(), face_order.end(), [&](int a, int b) {
    return g.faces[a].size() != g.faces[b].size() ? g.faces[a].size() > g.faces[b].size()
                                                  : a < b;
  });
  double best_defect = 1e300;
  std::string last_error;
  int attempts = 0;
  for (int fc_idx : face_order) {
    for (int vs : g.faces[fc_idx]) {
      if (attempts >= 24) break;
      ++attempts;
      PackingSolve trial;
      if (!solve_packing(g, fc_idx, vs, faces_of_vertex, trial)) {
        best_defect = std::min(best_defect, trial.defect);
        continue;
      }
      try {
        return build_realization(g, fc_idx, vs, trial, tol);
      } catch (const Error& e) {
        if (e.code != Err::SolverDiverged) throw;
        last_error = e.what();
      }
    }
    if (attempts >= 24) break;
  }
  if (!last_error.empty()) fail(Err::SolverDiverged, "all normalizations failed; last: " + last_error);
  fail(Err::SolverDiverged,
       "packing did not converge for any normalization; best angle defect " +
           std::to_string(best_defect));
}

PolyhedralGraph tetrahedron_graph() {
  return graph_from_faces({{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}});
}

PolyhedralGraph cube_graph() {
  std::vector<Vec> pts;
  for (int s = 0; s < 8; ++s)
    pts.push_back({s & 1 ? 1.0 : -1.0, s & 2 ? 1.0 : -1.0, s & 4 ? 1.0 : -1.0});
  return graph_from_polytope(euclidean_from_vertices(3, pts));
}

PolyhedralGraph dodecahedron_graph() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double inv = 1.0 / phi;
  std::vector<Vec> pts;
  for (int s = 0; s < 8; ++s)
    pts.push_back({s & 1 ? 1.0 : -1.0, s & 2 ? 1.0 : -1.0, s & 4 ? 1.0 : -1.0});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double u = a ? inv : -inv, w = b ? phi : -phi;
      pts.push_back({0.0, u, w});
      pts.push_back({u, w, 0.0});
      pts.push_back({w, 0.0, u});
    }
  return graph_from_polytope(euclidean_from_vertices(3, pts));
}

}  // namespace spherill
