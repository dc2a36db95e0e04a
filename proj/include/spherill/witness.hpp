#pragma once

// Constructive witness generation: the planar three-direction finder for
// convex polygons (Levi) and the recursive (d+1)-light construction that
// rotates the equator greatsphere about the sub-witness greatsphere.

#include "spherill/illumination.hpp"

namespace spherill {

struct LeviResult {
  std::array<Vec, 3> directions;  // unit 2-vectors
  std::array<int, 3> cuts;        // chosen cut positions in the sorted normal fan
};

// Three directions such that every vertex's closed outer-normal arc lies in
// the open semicircle of normals negative against one of them. Input polygon
// must be convex with counterclockwise vertices. Throws ParallelogramError
// when the normal fan has two antipodal pairs (or no feasible 3-partition).
LeviResult levi_directions(const std::vector<Vec>& polygon, const Tolerances& tol);

struct ConstructionLevel {
  int dim = 0;            // ambient spherical dimension at this level
  int facet_index = -1;   // chosen facet (unused at the base level)
  Vec relint_point;       // p in relint F
  double theta = 0.0;     // rotation angle actually used
  double delta = 0.0;     // southward push actually used
  int retries = 0;
  int recenter_attempts = 0;  // base level only
};

struct ConstructionTrace {
  uint64_t seed = 0;
  std::vector<ConstructionLevel> levels;  // outermost first
};

struct WitnessResult {
  IlluminationWitness witness;
  ConstructionTrace trace;
  IlluminationCertificate certificate;
};

// Produces exactly d+1 lights on a greatsphere disjoint from p, certified by
// verify_witness. Deterministic for a fixed seed.
WitnessResult construct_witness(const SphericalPolytope& p, uint64_t seed = 20240817ULL);

}  // namespace spherill
