#pragma once

// File formats: spolytope.json, witness/certificate JSON, trace JSON,
// polyhedral-graph JSON, circle JSON and plain OFF meshes. All numeric
// output is serialized with 17 significant digits so doubles round-trip.

#include <string>

#include "spherill/koebe.hpp"

namespace spherill {

std::string fmt_double(double x);

struct LoadedPolytope {
  SphericalPolytope polytope;
  double max_normalization_delta = 0.0;  // largest |input - normalized| on load
};

LoadedPolytope load_spolytope(const std::string& path);
std::string spolytope_to_json(const SphericalPolytope& p);
void save_text(const std::string& path, const std::string& content);

IlluminationWitness load_witness_json(const std::string& path);
std::string certificate_to_json(const IlluminationWitness& w,
                                const IlluminationCertificate& c);
std::string euclidean_certificate_to_json(const std::vector<Vec>& directions,
                                          const EuclideanCertificate& c);
std::string trace_to_json(const ConstructionTrace& t);
std::string lattice_to_json(const FaceLattice& l);
std::string directions_to_json(const std::vector<Vec>& dirs);
std::string circles_to_json(const KoebeRealization& k);
std::string separation_to_json(const SeparationCover& sc);

PolyhedralGraph load_graph_json(const std::string& path);

EuclideanPolytope load_off(const std::string& path, const Tolerances& tol = Tolerances{});
std::string polytope_to_off(const EuclideanPolytope& p);
std::string realization_to_off(const KoebeRealization& k);

}  // namespace spherill
