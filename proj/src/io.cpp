#include "spherill/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace spherill {

using nlohmann::json;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string vec_json(const Vec& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(v[i]);
  }
  return out + "]";
}

std::string vecs_json(const std::vector<Vec>& vs, const std::string& indent) {
  std::string out = "[";
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += "\n" + indent + "  " + vec_json(vs[i]);
  }
  return out + "\n" + indent + "]";
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::ParseError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Err::ParseError, path + ": " + e.what());
  }
  return j;
}

Vec json_vec(const json& j) {
  if (!j.is_array()) fail(Err::ParseError, "expected a numeric array");
  Vec v;
  for (const auto& x : j) {
    if (!x.is_number()) fail(Err::ParseError, "expected a number");
    v.push_back(x.get<double>());
  }
  return v;
}

Tolerances json_tolerances(const json& j) {
  Tolerances tol;
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("unit")) tol.unit = t["unit"].get<double>();
    if (t.contains("pred")) tol.pred = t["pred"].get<double>();
    if (t.contains("dedup")) tol.dedup = t["dedup"].get<double>();
  }
  tol.validate();
  return tol;
}

}  // namespace

void save_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(Err::ParseError, "cannot write " + path);
  out << content;
}

LoadedPolytope load_spolytope(const std::string& path) {
  json j = parse_file(path);
  if (!j.contains("dim") || !j.contains("vertices"))
    fail(Err::ParseError, path + ": spolytope needs 'dim' and 'vertices'");
  int d = j["dim"].get<int>();
  Tolerances tol = json_tolerances(j);
  std::vector<Vec> pts;
  double delta = 0.0;
  for (const auto& row : j["vertices"]) {
    Vec v = json_vec(row);
    if (static_cast<int>(v.size()) != d + 1)
      fail(Err::ParseError, path + ": vertex with wrong length");
    Vec u = normalize(v, tol).coords;
    delta = std::max(delta, dist(u, v));
    pts.push_back(std::move(u));
  }
  LoadedPolytope out;
  out.polytope = from_vertices(d, pts, tol);
  out.max_normalization_delta = delta;
  return out;
}

std::string spolytope_to_json(const SphericalPolytope& p) {
  std::string out = "{\n  \"dim\": " + std::to_string(p.d) + ",\n";
  out += "  \"vertices\": " + vecs_json(p.vertices, "  ") + ",\n";
  out += "  \"tolerances\": {\"unit\": " + fmt_double(p.tol.unit) +
         ", \"pred\": " + fmt_double(p.tol.pred) +
         ", \"dedup\": " + fmt_double(p.tol.dedup) + "},\n";
  out += "  \"hemisphere_center\": " + vec_json(p.hemisphere_center) + ",\n";
  out += "  \"hemisphere_margin\": " + fmt_double(p.hemisphere_margin) + ",\n";
  out += "  \"facet_normals\": " + vecs_json(p.facet_normals, "  ") + "\n}\n";
  return out;
}

IlluminationWitness load_witness_json(const std::string& path) {
  json j = parse_file(path);
  if (!j.contains("greatsphere_normal") || !j.contains("lights"))
    fail(Err::ParseError, path + ": witness needs 'greatsphere_normal' and 'lights'");
  IlluminationWitness w;
  w.greatsphere_normal = json_vec(j["greatsphere_normal"]);
  for (const auto& row : j["lights"]) w.lights.push_back(json_vec(row));
  return w;
}

std::string certificate_to_json(const IlluminationWitness& w,
                                const IlluminationCertificate& c) {
  std::string out = "{\n";
  out += "  \"greatsphere_normal\": " + vec_json(w.greatsphere_normal) + ",\n";
  out += "  \"lights\": " + vecs_json(w.lights, "  ") + ",\n";
  out += "  \"assignment\": {";
  for (size_t i = 0; i < c.assignment.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + std::to_string(i) + "\": " + std::to_string(c.assignment[i]);
  }
  out += "},\n  \"margins\": [";
  for (size_t i = 0; i < c.margins.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(c.margins[i]);
  }
  out += "],\n";
  out += "  \"min_margin\": " + fmt_double(c.min_margin) + ",\n";
  out += std::string("  \"fragile\": ") + (c.fragile ? "true" : "false") + ",\n";
  out += std::string("  \"strict\": ") + (c.strict ? "true" : "false") + ",\n";
  out += "  \"tolerances\": {\"unit\": " + fmt_double(c.tol.unit) +
         ", \"pred\": " + fmt_double(c.tol.pred) +
         ", \"dedup\": " + fmt_double(c.tol.dedup) + "}\n}\n";
  return out;
}

std::string euclidean_certificate_to_json(const std::vector<Vec>& directions,
                                          const EuclideanCertificate& c) {
  std::string out = "{\n";
  out += "  \"directions\": " + vecs_json(directions, "  ") + ",\n";
  out += "  \"assignment\": {";
  for (size_t i = 0; i < c.assignment.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + std::to_string(i) + "\": " + std::to_string(c.assignment[i]);
  }
  out += "},\n";
  out += "  \"min_margin\": " + fmt_double(c.min_margin) + ",\n";
  out += std::string("  \"fragile\": ") + (c.fragile ? "true" : "false") + "\n}\n";
  return out;
}

std::string trace_to_json(const ConstructionTrace& t) {
  std::string out = "{\n  \"seed\": " + std::to_string(t.seed) + ",\n  \"levels\": [";
  for (size_t i = 0; i < t.levels.size(); ++i) {
    const ConstructionLevel& l = t.levels[i];
    if (i) out += ",";
    out += "\n    {\"dim\": " + std::to_string(l.dim) +
           ", \"facet_index\": " + std::to_string(l.facet_index) +
           ", \"theta\": " + fmt_double(l.theta) + ", \"delta\": " + fmt_double(l.delta) +
           ", \"retries\": " + std::to_string(l.retries) +
           ", \"recenter_attempts\": " + std::to_string(l.recenter_attempts) +
           ", \"relint_point\": " + vec_json(l.relint_point) + "}";
  }
  return out + "\n  ]\n}\n";
}

std::string lattice_to_json(const FaceLattice& l) {
  std::string out = "{\n  \"f_vector\": [";
  std::vector<int> fv = l.f_vector();
  for (size_t i = 0; i < fv.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(fv[i]);
  }
  out += "],\n  \"faces\": [";
  for (size_t i = 0; i < l.faces.size(); ++i) {
    if (i) out += ",";
    out += "\n    {\"dim\": " + std::to_string(l.faces[i].dim) + ", \"vertices\": [";
    for (size_t k = 0; k < l.faces[i].verts.size(); ++k) {
      if (k) out += ", ";
      out += std::to_string(l.faces[i].verts[k]);
    }
    out += "]}";
  }
  out += "\n  ],\n  \"hasse\": [";
  for (size_t i = 0; i < l.hasse.size(); ++i) {
    if (i) out += ", ";
    out += "[" + std::to_string(l.hasse[i].first) + ", " +
           std::to_string(l.hasse[i].second) + "]";
  }
  return out + "]\n}\n";
}

std::string directions_to_json(const std::vector<Vec>& dirs) {
  return "{\n  \"directions\": " + vecs_json(dirs, "  ") + "\n}\n";
}

std::string circles_to_json(const KoebeRealization& k) {
  auto circle_list = [&](const std::vector<CircleOnSphere>& cs) {
    std::string out = "[";
    for (size_t i = 0; i < cs.size(); ++i) {
      if (i) out += ",";
      out += "\n    {\"normal\": " + vec_json(cs[i].normal) +
             ", \"offset\": " + fmt_double(cs[i].offset) + "}";
    }
    return out + "\n  ]";
  };
  std::string out = "{\n  \"face_circles\": " + circle_list(k.face_circles) + ",\n";
  out += "  \"vertex_circles\": " + circle_list(k.vertex_circles) + ",\n";
  out += "  \"tangency_points\": " + vecs_json(k.tangency, "  ") + ",\n";
  const KoebeResiduals& r = k.residuals;
  out += "  \"residuals\": {\"edge_tangency\": " + fmt_double(r.edge_tangency) +
         ", \"circle_tangency\": " + fmt_double(r.circle_tangency) +
         ", \"incidence\": " + fmt_double(r.incidence) +
         ", \"planarity\": " + fmt_double(r.planarity) +
         ", \"orthogonality\": " + fmt_double(r.orthogonality) +
         ", \"max_vertex_offset\": " + fmt_double(r.max_vertex_offset) +
         ", \"solver_defect\": " + fmt_double(r.solver_defect) +
         ", \"layout_defect\": " + fmt_double(r.layout_defect) + "}\n}\n";
  return out;
}

std::string separation_to_json(const SeparationCover& sc) {
  std::string out = "{\n  \"x\": " + vec_json(sc.x) + ",\n  \"hemispheres\": [";
  for (size_t i = 0; i < sc.hemispheres.size(); ++i) {
    if (i) out += ",";
    out += "\n    " + vec_json(sc.hemispheres[i].center.coords);
  }
  out += "\n  ],\n  \"face_assignment\": [";
  for (size_t i = 0; i < sc.face_assignment.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(sc.face_assignment[i]);
  }
  out += "],\n  \"face_margins\": [";
  for (size_t i = 0; i < sc.face_margins.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(sc.face_margins[i]);
  }
  return out + "]\n}\n";
}

PolyhedralGraph load_graph_json(const std::string& path) {
  json j = parse_file(path);
  if (!j.contains("faces")) fail(Err::ParseError, path + ": graph needs 'faces'");
  std::vector<std::vector<int>> faces;
  for (const auto& row : j["faces"]) {
    std::vector<int> cyc;
    for (const auto& x : row) cyc.push_back(x.get<int>());
    faces.push_back(std::move(cyc));
  }
  return graph_from_faces(std::move(faces));
}

EuclideanPolytope load_off(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) fail(Err::ParseError, "cannot open " + path);
  auto next_token_line = [&]() -> std::string {
    std::string line;
    while (std::getline(in, line)) {
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      size_t start = line.find_first_not_of(" \t\r\n");
      if (start == std::string::npos) continue;
      return line.substr(start);
    }
    return "";
  };
  std::string header = next_token_line();
  if (header.substr(0, 3) != "OFF") fail(Err::ParseError, path + ": missing OFF header");
  std::string counts = header.size() > 4 ? header.substr(3) : next_token_line();
  std::istringstream cs(counts);
  long nv = 0, nf = 0, ne = 0;
  if (!(cs >> nv >> nf >> ne)) fail(Err::ParseError, path + ": bad OFF counts");
  std::vector<Vec> pts;
  for (long i = 0; i < nv; ++i) {
    std::istringstream ls(next_token_line());
    Vec v(3);
    if (!(ls >> v[0] >> v[1] >> v[2])) fail(Err::ParseError, path + ": bad OFF vertex");
    pts.push_back(std::move(v));
  }
  for (long i = 0; i < nf; ++i) next_token_line();  // faces recomputed from the hull
  return euclidean_from_vertices(3, pts, tol);
}

std::string polytope_to_off(const EuclideanPolytope& p) {
  PolyhedralGraph g = graph_from_polytope(p);
  std::string out = "OFF\n# convex polytope\n";
  out += std::to_string(p.vertices.size()) + " " + std::to_string(g.m()) + " " +
         std::to_string(g.e()) + "\n";
  for (const Vec& v : p.vertices)
    out += fmt_double(v[0]) + " " + fmt_double(v[1]) + " " + fmt_double(v[2]) + "\n";
  for (const auto& cyc : g.faces) {
    out += std::to_string(cyc.size());
    for (int v : cyc) out += " " + std::to_string(v);
    out += "\n";
  }
  return out;
}

std::string realization_to_off(const KoebeRealization& k) {
  std::string out = "OFF\n# midscribed realization\n";
  out += std::to_string(k.vertices.size()) + " " + std::to_string(k.graph.m()) + " " +
         std::to_string(k.graph.e()) + "\n";
  for (const Vec& v : k.vertices)
    out += fmt_double(v[0]) + " " + fmt_double(v[1]) + " " + fmt_double(v[2]) + "\n";
  for (const auto& cyc : k.graph.faces) {
    out += std::to_string(cyc.size());
    for (int v : cyc) out += " " + std::to_string(v);
    out += "\n";
  }
  return out;
}

}  // namespace spherill
