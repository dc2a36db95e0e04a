#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "spherill/io.hpp"
#include "spherill/render.hpp"
#include "spherill/witness.hpp"

using namespace spherill;
using namespace spherill::fixtures;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  fs::path dir = fs::temp_directory_path() / "spherill_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SPHERILL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("fmt_double round trips bit-exactly") {
  Rng rng(161);
  for (int i = 0; i < 200; ++i) {
    double x = (rng.next_double() - 0.5) * std::pow(10.0, (int)rng.next_below(8));
    CHECK(std::strtod(fmt_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("spolytope json round trip with normalization report") {
  fs::path f = tmp_dir() / "oct.spolytope.json";
  save_text(f.string(), spolytope_to_json(oct()));
  LoadedPolytope lp = load_spolytope(f.string());
  CHECK(lp.polytope.vertices.size() == 3);
  CHECK(lp.max_normalization_delta < 1e-14);

  // non-unit vertices are normalized on load and the delta reported
  save_text((tmp_dir() / "scaled.json").string(),
            "{\"dim\": 2, \"vertices\": [[2,0,0],[0,2,0],[0,0,2]]}");
  LoadedPolytope scaled = load_spolytope((tmp_dir() / "scaled.json").string());
  CHECK(scaled.max_normalization_delta > 0.5);
  CHECK(scaled.polytope.vertices.size() == 3);
}

TEST_CASE("malformed json is a parse error") {
  fs::path f = tmp_dir() / "broken.json";
  save_text(f.string(), "{\"dim\": 2, \"vertices\": [[1,0,0itch");
  try {
    load_spolytope(f.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::ParseError);
  }
}

TEST_CASE("malformed inputs fail loudly") {
  fs::path dir = tmp_dir();
  // vertex of the wrong length
  save_text((dir / "short.json").string(), "{\"dim\": 2, \"vertices\": [[1,0],[0,1,0],[0,0,1]]}");
  CHECK_THROWS_AS(load_spolytope((dir / "short.json").string()), Error);
  // missing keys
  save_text((dir / "nokeys.json").string(), "{\"vertices\": [[1,0,0]]}");
  CHECK_THROWS_AS(load_spolytope((dir / "nokeys.json").string()), Error);
  // out-of-range tolerances
  save_text((dir / "badtol.json").string(),
            "{\"dim\": 2, \"vertices\": [[1,0,0],[0,1,0],[0,0,1]], "
            "\"tolerances\": {\"pred\": 0.5}}");
  CHECK_THROWS_AS(load_spolytope((dir / "badtol.json").string()), Error);
  // OFF without the header
  save_text((dir / "bad.off").string(), "3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  CHECK_THROWS_AS(load_off((dir / "bad.off").string()), Error);
  // OFF with truncated vertex data
  save_text((dir / "trunc.off").string(), "OFF\n4 1 4\n0 0 0\n1 0\n");
  CHECK_THROWS_AS(load_off((dir / "trunc.off").string()), Error);
  // graph with a directed edge used twice
  save_text((dir / "badgraph.json").string(),
            "{\"faces\": [[0,1,2],[0,1,3],[1,2,3],[0,3,2]]}");
  try {
    load_graph_json((dir / "badgraph.json").string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::NotPolyhedralGraph);
  }
  // witness JSON without lights
  save_text((dir / "nolights.json").string(), "{\"greatsphere_normal\": [0,0,1]}");
  CHECK_THROWS_AS(load_witness_json((dir / "nolights.json").string()), Error);
}

TEST_CASE("cli: unsupported dimension is a clean failure") {
  fs::path dir = tmp_dir();
  save_text((dir / "segment.json").string(),
            "{\"dim\": 1, \"vertices\": [[1,0],[0,1]]}");
  CHECK(run_cli("witness " + (dir / "segment.json").string() + " --out " +
                dir.string()) != 0);
}

TEST_CASE("certificates are self-contained and reloadable") {
  SphericalPolytope p = spherical_simplex(3);
  WitnessResult wr = construct_witness(p);
  fs::path f = tmp_dir() / "cert.json";
  save_text(f.string(), certificate_to_json(wr.witness, wr.certificate));
  IlluminationWitness again = load_witness_json(f.string());
  IlluminationCertificate cert = verify_witness(p, again, p.tol);
  CHECK(cert.min_margin == doctest::Approx(wr.certificate.min_margin).epsilon(1e-12));
}

TEST_CASE("off round trip preserves the combinatorics") {
  EuclideanPolytope cube = cube3();
  fs::path f = tmp_dir() / "cube.off";
  save_text(f.string(), polytope_to_off(cube));
  EuclideanPolytope back = load_off(f.string());
  CHECK(back.vertices.size() == 8);
  CHECK(lattice_isomorphic(euclidean_face_lattice(cube), euclidean_face_lattice(back))
            .has_value());
}

TEST_CASE("graph json loads and validates") {
  fs::path f = tmp_dir() / "tet.json";
  save_text(f.string(), "{\"faces\": [[0,1,2],[0,3,1],[1,3,2],[2,3,0]]}");
  PolyhedralGraph g = load_graph_json(f.string());
  CHECK(g.n == 4);
  CHECK(g.e() == 6);
}

TEST_CASE("separation covers serialize with all their parts") {
  SeparationCover sc = separation_cover(spherical_simplex(3));
  std::string j = separation_to_json(sc);
  CHECK(j.find("\"x\"") != std::string::npos);
  CHECK(j.find("\"hemispheres\"") != std::string::npos);
  CHECK(j.find("\"face_assignment\"") != std::string::npos);
  CHECK(j.find("\"face_margins\"") != std::string::npos);
  // parseable by the json reader used for inputs
  fs::path f = tmp_dir() / "separation.json";
  save_text(f.string(), j);
  std::ifstream in(f);
  CHECK(in.good());
}

TEST_CASE("renders contain svg markup") {
  SphericalPolytope p = oct();
  WitnessResult wr = construct_witness(p);
  std::string svg = render_spolytope_svg(p, &wr.witness);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  KoebeRealization k = midscribe(cube_graph());
  std::string packing = render_packing_svg(k);
  CHECK(packing.find("<svg") != std::string::npos);
}

TEST_CASE("cli: faces, polar, witness, verify round trip") {
  fs::path dir = tmp_dir() / "cli";
  fs::create_directories(dir);
  fs::path oct_file = dir / "oct.spolytope.json";
  save_text(oct_file.string(), spolytope_to_json(oct()));

  CHECK(run_cli("faces " + oct_file.string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "lattice.json"));

  CHECK(run_cli("polar " + oct_file.string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "polar.spolytope.json"));

  CHECK(run_cli("witness " + oct_file.string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "certificate.json"));
  CHECK(fs::exists(dir / "trace.json"));

  CHECK(run_cli("verify " + oct_file.string() + " " +
                (dir / "certificate.json").string() + " --out " + dir.string()) == 0);

  // tampered witness: flip one light's sign -> nonzero exit
  std::string cert = slurp(dir / "certificate.json");
  IlluminationWitness w = load_witness_json((dir / "certificate.json").string());
  w.lights[0] = -1.0 * w.lights[0];
  std::string tampered = "{\"greatsphere_normal\": [";
  for (size_t i = 0; i < w.greatsphere_normal.size(); ++i)
    tampered += (i ? "," : "") + fmt_double(w.greatsphere_normal[i]);
  tampered += "], \"lights\": [";
  for (size_t li = 0; li < w.lights.size(); ++li) {
    tampered += li ? ",[" : "[";
    for (size_t i = 0; i < w.lights[li].size(); ++i)
      tampered += (i ? "," : "") + fmt_double(w.lights[li][i]);
    tampered += "]";
  }
  tampered += "]}";
  save_text((dir / "tampered.json").string(), tampered);
  CHECK(run_cli("verify " + oct_file.string() + " " + (dir / "tampered.json").string() +
                " --out " + dir.string()) != 0);

  // malformed input: nonzero exit
  save_text((dir / "bad.json").string(), "{nope");
  CHECK(run_cli("faces " + (dir / "bad.json").string()) != 0);
}

TEST_CASE("cli: reruns produce identical certificates") {
  fs::path dir = tmp_dir() / "determinism";
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  fs::path input = dir / "in.spolytope.json";
  save_text(input.string(), spolytope_to_json(spherical_simplex(3)));
  REQUIRE(run_cli("witness " + input.string() + " --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("witness " + input.string() + " --out " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "certificate.json") == slurp(dir / "b" / "certificate.json"));
  CHECK(slurp(dir / "a" / "trace.json") == slurp(dir / "b" / "trace.json"));
}

TEST_CASE("cli: bridge and koebe pipelines") {
  fs::path dir = tmp_dir() / "cli3d";
  fs::create_directories(dir);
  fs::path cube_file = dir / "cube.off";
  save_text(cube_file.string(), polytope_to_off(cube3()));

  CHECK(run_cli("bridge " + cube_file.string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "image.off"));
  CHECK(fs::exists(dir / "directions.json"));

  CHECK(run_cli("koebe " + cube_file.string() + " --out " + dir.string() +
                " --render") == 0);
  CHECK(fs::exists(dir / "realization.off"));
  CHECK(fs::exists(dir / "circles.json"));
  CHECK(fs::exists(dir / "packing.svg"));

  CHECK(run_cli("render " + (dir / "cube.off").string() + " --out " + dir.string()) == 0);
}
