#pragma once

// Static SVG renders: orthographic S^2 diagrams with witnesses, planar normal
// fans, and circle packings of Koebe realizations.

#include "spherill/io.hpp"

namespace spherill {

// Orthographic view along the hemisphere center; draws edges as sampled
// geodesics, vertices, and (optionally) the witness greatsphere and lights.
std::string render_spolytope_svg(const SphericalPolytope& p,
                                 const IlluminationWitness* witness = nullptr);

// Circle diagram of a realization, viewed along +z.
std::string render_packing_svg(const KoebeRealization& k);

// Polygon with its three Levi directions.
std::string render_fan_svg(const std::vector<Vec>& polygon,
                           const std::vector<Vec>& directions);

}  // namespace spherill
