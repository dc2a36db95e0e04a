#pragma once

// Midscribed (Koebe) realization of 3-polyhedral graphs via primal-dual
// circle packing, Mobius normalization in the Lorentz model, and synthesis
// of four illuminating directions.

#include "spherill/bridge.hpp"

namespace spherill {

struct PolyhedralGraph {
  int n = 0;                             // vertex count
  std::vector<std::vector<int>> faces;   // cyclic vertex index sequences
  // derived by validate():
  std::vector<std::array<int, 2>> edges;       // u < v
  std::vector<std::array<int, 2>> edge_faces;  // the two incident faces
  std::vector<std::vector<std::array<int, 2>>> rotation;
  // rotation[v] = cyclic list of (neighbor, face between this edge and the next)

  int m() const { return static_cast<int>(faces.size()); }
  int e() const { return static_cast<int>(edges.size()); }
  int edge_index(int u, int v) const;

  // planarity (via a coherent rotation system and Euler's relation),
  // 3-connectivity, and simple-cycle faces; throws NotPolyhedralGraph
  void validate();
};

PolyhedralGraph graph_from_faces(std::vector<std::vector<int>> faces);
PolyhedralGraph graph_from_polytope(const EuclideanPolytope& p);

// Circle on S^2: the slice { x in S^2 : <normal, x> = offset }, |offset| < 1.
struct CircleOnSphere {
  Vec normal;           // unit 3-vector
  double offset = 0.0;

  // Minkowski representation (spacelike unit vector, metric diag(1,1,1,-1))
  Vec minkowski() const {
    double s = 1.0 / std::sqrt(1.0 - offset * offset);
    return {normal[0] * s, normal[1] * s, normal[2] * s, offset * s};
  }
  static CircleOnSphere from_minkowski(const Vec& x);
  Vec pole() const { return (1.0 / offset) * normal; }
};

// Mobius transformation of S^2 as a Lorentz matrix acting on the Minkowski
// representation of circles and points.
struct MobiusMap {
  Mat l;  // 4x4, preserves diag(1,1,1,-1), det +1, orthochronous

  static MobiusMap identity();
  // hyperbolic isometry moving ball point p to the origin
  static MobiusMap boost_to_origin(const Vec& p);
  MobiusMap compose(const MobiusMap& inner) const;  // this after inner
  MobiusMap inverse() const;
  CircleOnSphere apply(const CircleOnSphere& c) const;
  Vec apply_point(const Vec& x) const;  // point of S^2
  double lorentz_defect() const;        // max |L^T J L - J|
};

struct KoebeResiduals {
  double edge_tangency = 0.0;     // |dist(o, edge line) - 1|
  double circle_tangency = 0.0;   // inversive-distance defect of tangent pairs
  double incidence = 0.0;         // tangency points on their circles
  double planarity = 0.0;         // face vertices on the face plane
  double orthogonality = 0.0;     // vertex vs face circle Lorentz products
  double max_vertex_offset = 0.0; // largest vertex-circle offset
  double solver_defect = 0.0;     // final angle-equation residual
  double layout_defect = 0.0;     // planar kite-closure drift

  double worst() const {
    return std::max({edge_tangency, circle_tangency, incidence, planarity,
                     orthogonality});
  }
};

struct KoebeRealization {
  PolyhedralGraph graph;
  std::vector<Vec> vertices;                 // poles of the vertex circles
  std::vector<CircleOnSphere> vertex_circles;
  std::vector<CircleOnSphere> face_circles;
  std::vector<Vec> tangency;                 // per edge, on S^2
  KoebeResiduals residuals;
};

// Primal-dual circle packing with a designated outer face, Newton on the
// log radii, stereographic lift, and Mobius balancing of tangency points.
KoebeRealization midscribe(const PolyhedralGraph& g, const Tolerances& tol = Tolerances{});

// Recomputes all invariant residuals of a realization.
KoebeResiduals verify_realization(const KoebeRealization& k);

// The realization as a Euclidean polytope: vertices are the circle poles and
// the facets carry the graph's face structure with the face-circle planes.
// Validates that every carried facet plane strictly supports the vertex set.
EuclideanPolytope realization_polytope(const KoebeRealization& k);

// Klein-model centroid of face j's tangency points, with the quadrilateral
// diagonal-intersection escape. force_offset applies the escape offset
// unconditionally (used on parallelogram retries).
Vec choose_normalization_point(const KoebeRealization& k, int face,
                               bool force_offset = false);

// Hyperbolic isometry moving p (in relint of face j's ideal polygon) to the
// ball center, applied to the whole realization.
std::pair<MobiusMap, KoebeRealization> poincare_normalize(const KoebeRealization& k,
                                                          int face, const Vec& p);

// The outer normal of face j plus three tilted Levi directions; certifies
// with euclidean_verify, halving the tilt until it passes.
std::vector<Vec> four_directions(const KoebeRealization& k, int face,
                                 EuclideanCertificate* cert_out = nullptr);

struct KoebePipelineResult {
  KoebeRealization raw;         // midscribed, pre-normalization
  KoebeRealization realization; // normalized
  int face = -1;
  Vec normalization_point;
  MobiusMap mobius;
  std::vector<Vec> directions;
  EuclideanCertificate certificate;
  std::vector<int> vertex_bijection;  // graph lattice -> realized hull lattice
  int point_retries = 0;
};

KoebePipelineResult koebe_pipeline(const PolyhedralGraph& g, uint64_t seed = 20240817ULL,
                                   const Tolerances& tol = Tolerances{});

// Fixture graphs.
PolyhedralGraph tetrahedron_graph();
PolyhedralGraph cube_graph();
PolyhedralGraph dodecahedron_graph();

}  // namespace spherill
