#include "spherill/witness.hpp"

namespace spherill {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace

LeviResult levi_directions(const std::vector<Vec>& polygon, const Tolerances& tol) {
  if (polygon.size() < 3) fail(Err::NotConvex, "polygon needs at least 3 vertices");
  double scale = 1e-300;
  for (const Vec& v : polygon)
    for (double x : v) scale = std::max(scale, std::fabs(x));

  // drop duplicate and collinear vertices; they do not change the normal fan
  std::vector<Vec> vs;
  for (const Vec& v : polygon) {
    if (!vs.empty() && dist(vs.back(), v) <= 1e-12 * scale) continue;
    vs.push_back(v);
  }
  while (vs.size() >= 2 && dist(vs.front(), vs.back()) <= 1e-12 * scale) vs.pop_back();
  auto cross2 = [](const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; };
  bool changed = true;
  while (changed && vs.size() >= 3) {
    changed = false;
    for (size_t i = 0; i < vs.size(); ++i) {
      const Vec& a = vs[i];
      const Vec& b = vs[(i + 1) % vs.size()];
      const Vec& c = vs[(i + 2) % vs.size()];
      double cr = cross2(b - a, c - b);
      if (cr < -1e-9 * scale * scale) fail(Err::NotConvex, "polygon turns clockwise");
      if (cr <= 1e-12 * scale * scale) {
        vs.erase(vs.begin() + ((i + 1) % vs.size()));
        changed = true;
        break;
      }
    }
  }
  const size_t m = vs.size();
  if (m < 3) fail(Err::NotConvex, "polygon degenerates to a segment");

  // outer normals of the edges, sorted ccw
  std::vector<double> phi(m);
  for (size_t i = 0; i < m; ++i) {
    Vec t = vs[(i + 1) % m] - vs[i];
    phi[i] = wrap_angle(std::atan2(-t[0], t[1]));
  }
  std::sort(phi.begin(), phi.end());

  const double ang_eps = 1e-9;
  if (m == 4 && std::fabs(wrap_angle(phi[2] - phi[0]) - kPi) <= 1e-7 &&
      std::fabs(wrap_angle(phi[3] - phi[1]) - kPi) <= 1e-7)
    fail(Err::ParallelogramError, "polygon is a parallelogram");

  // first (lexicographic) triple of cuts whose three spans are all below pi
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      if (phi[j] - phi[i] >= kPi - ang_eps) break;
      for (size_t k = j + 1; k < m; ++k) {
        if (phi[k] - phi[j] >= kPi - ang_eps) break;
        if (kTwoPi - (phi[k] - phi[i]) >= kPi - ang_eps) continue;
        auto dir_for = [](double lo, double hi) {
          double mid = 0.5 * (lo + hi);
          return Vec{-std::cos(mid), -std::sin(mid)};
        };
        LeviResult res;
        res.cuts = {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)};
        res.directions = {dir_for(phi[i], phi[j]), dir_for(phi[j], phi[k]),
                          dir_for(phi[k], phi[i] + kTwoPi)};
        // each vertex arc must land in some direction's open semicircle
        bool all_ok = true;
        for (size_t t = 0; t < m && all_ok; ++t) {
          double a0 = phi[t], a1 = (t + 1 < m) ? phi[t + 1] : phi[0] + kTwoPi;
          bool covered = false;
          for (const Vec& dv : res.directions) {
            Vec n0{std::cos(a0), std::sin(a0)}, n1{std::cos(a1), std::sin(a1)};
            if (dot(dv, n0) < -tol.pred && dot(dv, n1) < -tol.pred) {
              covered = true;
              break;
            }
          }
          all_ok = covered;
        }
        if (all_ok) return res;
      }
    }
  fail(Err::ParallelogramError, "no feasible 3-partition of the normal fan");
}

namespace {

struct LevelOutcome {
  IlluminationWitness witness;
  std::vector<ConstructionLevel> levels;
};

// recursive core; vertices live on S^dim inside E^{dim+1}
LevelOutcome construct_impl(const SphericalPolytope& p, Rng& rng) {
  const int d = p.d;
  const size_t amb = p.ambient();

  if (d == 2) {
    ConstructionLevel lvl;
    lvl.dim = 2;
    Vec center = p.hemisphere_center;
    bool have_fragile = false;
    IlluminationWitness fragile_witness;
    for (int attempt = 0; attempt <= 8; ++attempt) {
      lvl.recenter_attempts = attempt;
      if (attempt > 0) {
        // parallelogram escape: nudge the projection center and retry
        std::vector<Vec> frame = complete_basis({p.hemisphere_center}, amb);
        Vec t = zeros(amb);
        double a = kTwoPi * rng.next_double();
        t += std::cos(a) * frame[1];
        t += std::sin(a) * frame[2];
        center = normalize(p.hemisphere_center + 1e-2 * t).coords;
        bool inside_all = true;
        for (const Vec& v : p.vertices)
          if (dot(center, v) <= 10.0 * p.tol.pred) inside_all = false;
        if (!inside_all) continue;
      }
      std::vector<Vec> frame = complete_basis({center}, amb);
      std::vector<Vec> z(p.vertices.size(), zeros(2));
      for (size_t i = 0; i < p.vertices.size(); ++i) {
        double den = dot(p.vertices[i], center);
        z[i][0] = dot(p.vertices[i], frame[1]) / den;
        z[i][1] = dot(p.vertices[i], frame[2]) / den;
      }
      // order counterclockwise around the image centroid
      Vec c2 = zeros(2);
      for (const Vec& q : z) c2 += q;
      c2 *= 1.0 / static_cast<double>(z.size());
      std::sort(z.begin(), z.end(), [&](const Vec& a, const Vec& b) {
        return std::atan2(a[1] - c2[1], a[0] - c2[0]) <
               std::atan2(b[1] - c2[1], b[0] - c2[0]);
      });
      LeviResult levi;
      try {
        levi = levi_directions(z, p.tol);
      } catch (const Error& e) {
        if (e.code == Err::ParallelogramError && attempt < 8) continue;
        throw;
      }
      IlluminationWitness w;
      w.greatsphere_normal = center;
      for (const Vec& dv : levi.directions) {
        Vec light = zeros(amb);
        light -= dv[0] * frame[1];
        light -= dv[1] * frame[2];
        w.lights.push_back(normalize(light).coords);
      }
      try {
        IlluminationCertificate cert = verify_witness(p, w, p.tol);
        if (!cert.fragile) {
          lvl.relint_point = center;
          return {w, {lvl}};
        }
        if (!have_fragile) {
          have_fragile = true;
          fragile_witness = w;
        }
      } catch (const Error&) {
        // fall through to a re-centering attempt
      }
    }
    if (have_fragile) {
      lvl.relint_point = center;
      return {fragile_witness, {lvl}};
    }
    fail(Err::ConstructionFailed, "no verified 3-light witness after re-centering");
  }

  // d >= 3: recurse on a well-conditioned facet. The facet score combines its
  // own hemisphere margin with the dihedral gaps that bound the achievable
  // witness margins: how strictly -p sees the other facets, and how far the
  // off-facet vertices sit from the facet's greatsphere. Nearly flat ridges
  // make both tiny, and such facets are then tried last.
  struct FacetCandidate {
    int index;
    double score;
    SphericalPolytope sub;
    std::vector<Vec> frame;
    Vec relint;
  };
  std::vector<FacetCandidate> candidates;
  for (size_t f = 0; f < p.facet_normals.size(); ++f) {
    std::vector<Vec> frame = complete_basis({p.facet_normals[f]}, amb);
    std::vector<Vec> coords;
    for (int vi : p.facet_vertices[f]) {
      Vec c(amb - 1);
      for (size_t k = 0; k + 1 < amb; ++k) c[k] = dot(p.vertices[vi], frame[k + 1]);
      coords.push_back(std::move(c));
    }
    SphericalPolytope sub;
    try {
      sub = from_vertices(d - 1, coords, p.tol);
    } catch (const Error&) {
      continue;
    }
    Vec prel = zeros(amb);
    for (int vi : p.facet_vertices[f]) prel += p.vertices[vi];
    prel *= 1.0 / norm(prel);
    double x0_gap = 1.0;  // min over other facets of <-p, m>
    for (size_t mf = 0; mf < p.facet_normals.size(); ++mf)
      if (mf != f) x0_gap = std::min(x0_gap, -dot(prel, p.facet_normals[mf]));
    double equator_gap = 1.0;  // off-facet vertices vs the facet greatsphere
    for (size_t vi = 0; vi < p.vertices.size(); ++vi) {
      bool on = std::binary_search(p.facet_vertices[f].begin(),
                                   p.facet_vertices[f].end(), static_cast<int>(vi));
      if (!on) equator_gap = std::min(equator_gap, -dot(p.facet_normals[f],
                                                        p.vertices[vi]));
    }
    FacetCandidate cand;
    cand.index = static_cast<int>(f);
    cand.score = std::min({sub.hemisphere_margin, x0_gap, equator_gap});
    cand.sub = std::move(sub);
    cand.frame = std::move(frame);
    cand.relint = std::move(prel);
    candidates.push_back(std::move(cand));
  }
  if (candidates.empty()) fail(Err::ConstructionFailed, "no facet admits a sub-polytope");
  std::sort(candidates.begin(), candidates.end(),
            [](const FacetCandidate& a, const FacetCandidate& b) {
              return a.score != b.score ? a.score > b.score : a.index < b.index;
            });

  const size_t max_facet_tries = std::min<size_t>(candidates.size(), 5);
  for (size_t ci = 0; ci < max_facet_tries; ++ci) {
    const FacetCandidate& cand = candidates[ci];
    if (cand.score <= 10.0 * p.tol.pred) break;
    LevelOutcome sub = construct_impl(cand.sub, rng);

    auto lift = [&](const Vec& v_sub) {
      Vec out = zeros(amb);
      for (size_t k = 0; k + 1 < amb; ++k) out += v_sub[k] * cand.frame[k + 1];
      return out;
    };
    const Vec n = p.facet_normals[cand.index];
    const Vec h_sub = lift(sub.witness.greatsphere_normal);
    std::vector<Vec> s;
    for (const Vec& light : sub.witness.lights) s.push_back(lift(light));

    const Vec& prel = cand.relint;
    double alpha = dot(-1.0 * prel, h_sub);  // < 0: prel is inside the sub hemisphere
    Vec w_part = -1.0 * prel - alpha * h_sub;

    // diagonal sweep over independently halved rotation and push angles;
    // the proof guarantees all sufficiently small pairs work
    const double theta0 = 0.05, delta0 = 0.05;
    for (int level = 0; level <= 24; ++level) {
      for (int a = 0; a <= level; ++a) {
        int b = level - a;
        if (a > 14 || b > 14) continue;
        double theta = theta0 * std::pow(0.25, a);
        double delta = delta0 * std::pow(0.25, b);
        Vec u = std::cos(theta) * h_sub + std::sin(theta) * n;
        IlluminationWitness w;
        w.greatsphere_normal = std::sin(theta) * h_sub - std::cos(theta) * n;
        w.lights.push_back(normalize(w_part + alpha * u).coords);  // x_0, northern
        for (const Vec& si : s)
          w.lights.push_back(
              normalize(std::cos(delta) * si + std::sin(delta) * u).coords);
        // cheap margin scan before committing to full verification
        bool disjoint = true;
        for (const Vec& v : p.vertices)
          if (dot(w.greatsphere_normal, v) <= 10.0 * p.tol.pred) disjoint = false;
        if (!disjoint) continue;
        double min_margin = 1.0;
        for (size_t vi = 0; vi < p.vertices.size() && min_margin > 10.0 * p.tol.pred;
             ++vi) {
          std::vector<int> facs = p.facets_of_vertex(static_cast<int>(vi));
          double best = -2.0;
          for (const Vec& light : w.lights) {
            double m = 1.0;
            for (int fi : facs) m = std::min(m, dot(light, p.facet_normals[fi]));
            best = std::max(best, m);
          }
          min_margin = std::min(min_margin, best);
        }
        if (min_margin <= 10.0 * p.tol.pred) continue;
        ConstructionLevel lvl;
        lvl.dim = d;
        lvl.facet_index = cand.index;
        lvl.relint_point = prel;
        lvl.theta = theta;
        lvl.delta = delta;
        lvl.retries = level;
        LevelOutcome out;
        out.witness = std::move(w);
        out.levels.push_back(lvl);
        for (ConstructionLevel& s_lvl : sub.levels) out.levels.push_back(s_lvl);
        return out;
      }
    }
  }
  fail(Err::ConstructionFailed,
       "rotation/push sweep exhausted at dim " + std::to_string(d));
}

}  // namespace

WitnessResult construct_witness(const SphericalPolytope& p, uint64_t seed) {
  if (p.d < 2) fail(Err::UnsupportedDimension, "witness construction needs d >= 2");
  Rng rng(seed);
  LevelOutcome out = construct_impl(p, rng);
  WitnessResult res;
  res.witness = std::move(out.witness);
  res.trace.seed = seed;
  res.trace.levels = std::move(out.levels);
  res.certificate = verify_witness(p, res.witness, p.tol);
  if (static_cast<int>(res.witness.lights.size()) != p.d + 1)
    fail(Err::ConstructionFailed, "witness cardinality is not d+1");
  return res;
}

SeparationCover separation_cover(const SphericalPolytope& p) {
  if (p.d < 2) fail(Err::UnsupportedDimension, "separation cover needs d >= 2");
  SphericalPolytope q = polar(p);
  WitnessResult wr = construct_witness(q);

  SeparationCover sc;
  sc.x = -1.0 * wr.witness.greatsphere_normal;
  for (const Vec& light : wr.witness.lights) sc.hemispheres.push_back({UnitPoint(light)});
  sc.polar_certificate = wr.certificate;
  sc.lattice = face_lattice(p);

  // x interior to p and on every hemisphere boundary
  for (const Vec& n : p.facet_normals)
    if (dot(n, sc.x) >= -p.tol.pred)
      fail(Err::VerificationFailed, "separation point not strictly interior");
  for (const Hemisphere& h : sc.hemispheres)
    if (std::fabs(dot(h.center.coords, sc.x)) > p.tol.pred)
      fail(Err::VerificationFailed, "separation point off a hemisphere boundary");

  for (const Face& f : sc.lattice.faces) {
    int best = -1;
    double best_margin = -2.0;
    for (size_t hi = 0; hi < sc.hemispheres.size(); ++hi) {
      double m = 1.0;
      for (int vi : f.verts)
        m = std::min(m, dot(sc.hemispheres[hi].center.coords, p.vertices[vi]));
      if (m > best_margin) {
        best_margin = m;
        best = static_cast<int>(hi);
      }
    }
    if (best < 0 || best_margin <= p.tol.pred)
      fail(Err::VerificationFailed, "face escapes every hemisphere");
    sc.face_assignment.push_back(best);
    sc.face_margins.push_back(best_margin);
  }
  return sc;
}

}  // namespace spherill
