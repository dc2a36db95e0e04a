// Command-line front end: validation, polarity, witness construction and
// verification, the Euclidean bridge, the Koebe pipeline, and SVG renders.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "spherill/render.hpp"

namespace fs = std::filesystem;
using namespace spherill;

namespace {

struct CommonOpts {
  double tol_pred = 1e-9, tol_unit = 1e-12, tol_dedup = 1e-8;
  uint64_t seed = 20240817ULL;
  int grid = 0;  // > 0 also runs the grid cover oracle in `witness`
  std::string out_dir = ".";
  bool strict = false;
  bool render = false;

  Tolerances tolerances() const {
    Tolerances t;
    t.pred = tol_pred;
    t.unit = tol_unit;
    t.dedup = tol_dedup;
    t.validate();
    return t;
  }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--tol", o.tol_pred, "predicate tolerance");
  cmd->add_option("--tol-unit", o.tol_unit, "unit-norm tolerance");
  cmd->add_option("--tol-dedup", o.tol_dedup, "vertex merge tolerance");
  cmd->add_option("--seed", o.seed, "seed for randomized retries");
  cmd->add_option("--grid", o.grid, "grid size for the cover oracle");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_flag("--strict", o.strict, "verify every face, not only vertices");
  cmd->add_flag("--render", o.render, "emit SVG renders next to the outputs");
}

std::string out_path(const CommonOpts& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  return (fs::path(o.out_dir) / name).string();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(),
                                                suffix.size(), suffix) == 0;
}

SphericalPolytope load_any_spherical(const std::string& path, const CommonOpts& o) {
  if (ends_with(path, ".off")) {
    EuclideanPolytope ep = load_off(path, o.tolerances());
    return embed(ep, default_embed_scale(ep));
  }
  LoadedPolytope lp = load_spolytope(path);
  if (lp.max_normalization_delta > 0.0)
    std::cerr << "note: normalized input vertices, max delta "
              << fmt_double(lp.max_normalization_delta) << "\n";
  return lp.polytope;
}

int cmd_faces(const std::string& in, const CommonOpts& o) {
  SphericalPolytope p = load_any_spherical(in, o);
  FaceLattice lat = face_lattice(p);
  std::cout << "f-vector: (";
  std::vector<int> fv = lat.f_vector();
  for (size_t i = 0; i < fv.size(); ++i)
    std::cout << fv[i] << (i + 1 < fv.size() ? ", " : "");
  std::cout << ")\n";
  save_text(out_path(o, "lattice.json"), lattice_to_json(lat));
  std::cout << "wrote " << out_path(o, "lattice.json") << "\n";
  return 0;
}

int cmd_polar(const std::string& in, const CommonOpts& o) {
  SphericalPolytope p = load_any_spherical(in, o);
  SphericalPolytope q = polar(p);
  save_text(out_path(o, "polar.spolytope.json"), spolytope_to_json(q));
  std::cout << "wrote " << out_path(o, "polar.spolytope.json") << "\n";
  return 0;
}

int cmd_witness(const std::string& in, const CommonOpts& o) {
  SphericalPolytope p = load_any_spherical(in, o);
  WitnessResult wr = construct_witness(p, o.seed);
  if (o.strict) verify_witness(p, wr.witness, p.tol, true);
  save_text(out_path(o, "certificate.json"),
            certificate_to_json(wr.witness, wr.certificate));
  save_text(out_path(o, "trace.json"), trace_to_json(wr.trace));
  if (o.render)
    save_text(out_path(o, "witness.svg"), render_spolytope_svg(p, &wr.witness));
  std::cout << "witness: " << wr.witness.lights.size() << " lights, min margin "
            << fmt_double(wr.certificate.min_margin)
            << (wr.certificate.fragile ? " (fragile)" : "") << "\n";
  if (o.grid > 0) {
    CoverResult cover = exhaustive_upper_bound(p, o.grid);
    save_text(out_path(o, "cover.json"),
              certificate_to_json(cover.witness, cover.certificate));
    std::cout << "grid cover: " << cover.k << " lights from a " << o.grid
              << "-point grid\n";
  }
  return 0;
}

int cmd_verify(const std::string& in, const std::string& witness_path,
               const CommonOpts& o) {
  SphericalPolytope p = load_any_spherical(in, o);
  IlluminationWitness w = load_witness_json(witness_path);
  IlluminationCertificate cert = verify_witness(p, w, p.tol, o.strict);
  save_text(out_path(o, "certificate.json"), certificate_to_json(w, cert));
  std::cout << "verified: min margin " << fmt_double(cert.min_margin)
            << (cert.fragile ? " (fragile)" : "") << "\n";
  return 0;
}

int cmd_bridge(const std::string& in, const CommonOpts& o) {
  EuclideanPolytope p = load_off(in, o.tolerances());
  CombinatorialResult res = combinatorial_illuminator(p, o.seed);
  save_text(out_path(o, "image.off"), polytope_to_off(res.image));
  save_text(out_path(o, "directions.json"), directions_to_json(res.directions));
  save_text(out_path(o, "certificate.json"),
            euclidean_certificate_to_json(res.directions, res.certificate));
  std::string equiv = "{\n  \"vertex_bijection\": [";
  for (size_t i = 0; i < res.vertex_bijection.size(); ++i) {
    if (i) equiv += ", ";
    equiv += std::to_string(res.vertex_bijection[i]);
  }
  save_text(out_path(o, "equivalence.json"), equiv + "]\n}\n");
  std::cout << "bridge: " << res.directions.size() << " directions, min margin "
            << fmt_double(res.certificate.min_margin) << "\n";
  return 0;
}

int cmd_koebe(const std::string& in, const CommonOpts& o) {
  PolyhedralGraph g;
  if (ends_with(in, ".off"))
    g = graph_from_polytope(load_off(in, o.tolerances()));
  else
    g = load_graph_json(in);
  KoebePipelineResult res = koebe_pipeline(g, o.seed, o.tolerances());
  save_text(out_path(o, "realization.off"), realization_to_off(res.realization));
  save_text(out_path(o, "circles.json"), circles_to_json(res.realization));
  save_text(out_path(o, "directions.json"), directions_to_json(res.directions));
  save_text(out_path(o, "certificate.json"),
            euclidean_certificate_to_json(res.directions, res.certificate));
  {
    std::string pj = "{\n  \"normalized_face\": " + std::to_string(res.face) + ",\n";
    pj += "  \"normalization_point\": [" + fmt_double(res.normalization_point[0]) +
          ", " + fmt_double(res.normalization_point[1]) + ", " +
          fmt_double(res.normalization_point[2]) + "],\n";
    pj += "  \"point_retries\": " + std::to_string(res.point_retries) + ",\n";
    pj += "  \"seed\": " + std::to_string(o.seed) + ",\n";
    pj += "  \"mobius_lorentz_defect\": " + fmt_double(res.mobius.lorentz_defect()) +
          ",\n  \"vertex_bijection\": [";
    for (size_t i = 0; i < res.vertex_bijection.size(); ++i) {
      if (i) pj += ", ";
      pj += std::to_string(res.vertex_bijection[i]);
    }
    save_text(out_path(o, "pipeline.json"), pj + "]\n}\n");
  }
  if (o.render)
    save_text(out_path(o, "packing.svg"), render_packing_svg(res.realization));
  std::cout << "koebe: face " << res.face << ", edge tangency residual "
            << fmt_double(res.realization.residuals.edge_tangency) << ", min margin "
            << fmt_double(res.certificate.min_margin) << "\n";
  return 0;
}

int cmd_render(const std::string& in, const std::string& witness_path,
               const CommonOpts& o) {
  if (ends_with(in, ".off") && witness_path.empty()) {
    EuclideanPolytope ep = load_off(in, o.tolerances());
    KoebePipelineResult res = koebe_pipeline(graph_from_polytope(ep), o.seed);
    save_text(out_path(o, "packing.svg"), render_packing_svg(res.realization));
    std::cout << "wrote " << out_path(o, "packing.svg") << "\n";
    return 0;
  }
  SphericalPolytope p = load_any_spherical(in, o);
  if (!witness_path.empty()) {
    IlluminationWitness w = load_witness_json(witness_path);
    save_text(out_path(o, "render.svg"), render_spolytope_svg(p, &w));
  } else {
    save_text(out_path(o, "render.svg"), render_spolytope_svg(p));
  }
  if (p.d == 2) {
    // planar companion: the projected polygon with its normal-fan directions
    WitnessResult wr = construct_witness(p, o.seed);
    EuclideanPolytope poly = project(p, wr.witness.greatsphere_normal);
    std::vector<Vec> dirs =
        ideal_directions(wr.witness.lights, wr.witness.greatsphere_normal, p.tol);
    save_text(out_path(o, "fan.svg"), render_fan_svg(poly.vertices, dirs));
  }
  std::cout << "wrote " << out_path(o, "render.svg") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical illumination toolkit"};
  app.require_subcommand(1);
  CommonOpts o;

  std::string in, witness_path;

  CLI::App* faces = app.add_subcommand("faces", "face lattice and f-vector");
  faces->add_option("input", in)->required();
  add_common(faces, o);

  CLI::App* polar_cmd = app.add_subcommand("polar", "polar polytope");
  polar_cmd->add_option("input", in)->required();
  add_common(polar_cmd, o);

  CLI::App* witness = app.add_subcommand("witness", "construct a d+1 light witness");
  witness->add_option("input", in)->required();
  add_common(witness, o);

  CLI::App* verify = app.add_subcommand("verify", "verify a witness file");
  verify->add_option("input", in)->required();
  verify->add_option("witness", witness_path)->required();
  add_common(verify, o);

  CLI::App* bridge = app.add_subcommand("bridge", "combinatorial illumination of an OFF");
  bridge->add_option("input", in)->required();
  add_common(bridge, o);

  CLI::App* koebe = app.add_subcommand("koebe", "midscribed realization with 4 directions");
  koebe->add_option("input", in)->required();
  add_common(koebe, o);

  CLI::App* render = app.add_subcommand("render", "SVG renders");
  render->add_option("input", in)->required();
  render->add_option("witness", witness_path);
  add_common(render, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (faces->parsed()) return cmd_faces(in, o);
    if (polar_cmd->parsed()) return cmd_polar(in, o);
    if (witness->parsed()) return cmd_witness(in, o);
    if (verify->parsed()) return cmd_verify(in, witness_path, o);
    if (bridge->parsed()) return cmd_bridge(in, o);
    if (koebe->parsed()) return cmd_koebe(in, o);
    if (render->parsed()) return cmd_render(in, witness_path, o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
