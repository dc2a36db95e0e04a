#include "spherill/render.hpp"

namespace spherill {

namespace {

constexpr double kSize = 800.0;
constexpr double kPi = 3.1415926535897932384626433832795;

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"0 0 800 800\">\n<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Mapper {
  double cx = kSize / 2, cy = kSize / 2, scale = kSize / 2.4;
  std::string pt(double x, double y) const {
    return px(cx + scale * x) + "," + px(cy - scale * y);
  }
};

std::string polyline(const Mapper& m, const std::vector<Vec>& pts,
                     const std::string& style, bool close) {
  std::string out = close ? "<polygon points=\"" : "<polyline points=\"";
  for (const Vec& p : pts) out += m.pt(p[0], p[1]) + " ";
  out += "\" " + style + "/>\n";
  return out;
}

std::string dot_mark(const Mapper& m, double x, double y, const std::string& color,
                     double r = 4.0) {
  std::string c = m.pt(x, y);
  size_t comma = c.find(',');
  return "<circle cx=\"" + c.substr(0, comma) + "\" cy=\"" + c.substr(comma + 1) +
         "\" r=\"" + px(r) + "\" fill=\"" + color + "\"/>\n";
}

}  // namespace

std::string render_spolytope_svg(const SphericalPolytope& p,
                                 const IlluminationWitness* witness) {
  const size_t amb = p.ambient();
  std::vector<Vec> frame = complete_basis({p.hemisphere_center}, amb);
  auto view = [&](const Vec& v) -> Vec {
    return {dot(v, frame[1]), dot(v, frame[amb > 2 ? 2 : 1])};
  };
  Mapper m;
  std::string svg = svg_open();
  // silhouette
  std::vector<Vec> circle;
  for (int i = 0; i <= 128; ++i) {
    double a = 2.0 * kPi * i / 128;
    circle.push_back({std::cos(a), std::sin(a)});
  }
  svg += polyline(m, circle, "fill=\"none\" stroke=\"#ccc\" stroke-width=\"1\"", false);

  FaceLattice lat = face_lattice(p);
  if (lat.by_dim.size() > 1)
    for (int fi : lat.by_dim[1]) {
      const Face& f = lat.faces[fi];
      if (f.verts.size() != 2) continue;
      std::vector<Vec> arc;
      for (int s = 0; s <= 24; ++s) {
        UnitPoint q = geodesic_point(UnitPoint(p.vertices[f.verts[0]]),
                                     UnitPoint(p.vertices[f.verts[1]]), s / 24.0, p.tol);
        arc.push_back(view(q.coords));
      }
      svg += polyline(m, arc, "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"", false);
    }
  for (const Vec& v : p.vertices) {
    Vec w = view(v);
    svg += dot_mark(m, w[0], w[1], "#1f77b4");
  }
  if (witness) {
    // the witness greatsphere: sample its intersection with span(frame)
    std::vector<Vec> gs;
    const Vec& h = witness->greatsphere_normal;
    std::vector<Vec> hperp = complete_basis({h}, amb);
    for (int i = 0; i <= 160; ++i) {
      double a = 2.0 * kPi * i / 160;
      Vec q = std::cos(a) * hperp[1] + std::sin(a) * hperp[2 % hperp.size()];
      gs.push_back(view(q));
    }
    svg += polyline(m, gs, "fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" "
                           "stroke-dasharray=\"6 3\"", false);
    for (const Vec& light : witness->lights) {
      Vec w = view(light);
      svg += dot_mark(m, w[0], w[1], "#d62728", 6.0);
    }
  }
  return svg + "</svg>\n";
}

std::string render_packing_svg(const KoebeRealization& k) {
  Mapper m;
  std::string svg = svg_open();
  auto draw_circle = [&](const CircleOnSphere& c, const std::string& color) {
    std::vector<Vec> frame = complete_basis({c.normal}, 3);
    double r = std::sqrt(std::max(0.0, 1.0 - c.offset * c.offset));
    std::vector<Vec> pts;
    for (int i = 0; i <= 96; ++i) {
      double a = 2.0 * kPi * i / 96;
      Vec q = c.offset * c.normal + (r * std::cos(a)) * frame[1] +
              (r * std::sin(a)) * frame[2];
      pts.push_back({q[0], q[1]});
    }
    svg += polyline(m, pts,
                    "fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.2\"", false);
  };
  for (const CircleOnSphere& c : k.vertex_circles) draw_circle(c, "#1f77b4");
  for (const CircleOnSphere& c : k.face_circles) draw_circle(c, "#d62728");
  for (const Vec& t : k.tangency) svg += dot_mark(m, t[0], t[1], "#2ca02c", 2.5);
  return svg + "</svg>\n";
}

std::string render_fan_svg(const std::vector<Vec>& polygon,
                           const std::vector<Vec>& directions) {
  double scale = 1e-9;
  for (const Vec& v : polygon) scale = std::max(scale, norm(v));
  Mapper m;
  m.scale = kSize / (2.4 * scale);
  std::string svg = svg_open();
  svg += polyline(m, polygon, "fill=\"#eef\" stroke=\"#1f77b4\" stroke-width=\"2\"", true);
  for (const Vec& d : directions) {
    std::vector<Vec> arrow{{-d[0] * scale, -d[1] * scale}, {0.0, 0.0}};
    svg += polyline(m, arrow, "fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"", false);
    svg += dot_mark(m, 0.0, 0.0, "#d62728", 3.0);
  }
  return svg + "</svg>\n";
}

}  // namespace spherill
