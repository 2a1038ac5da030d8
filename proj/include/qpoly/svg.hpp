#pragma once

// SVG 1.1 drawing of an isoradial window: face circles, arrows, lifted
// vertices and an optional zigzag overlay.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qpoly/consistency.hpp"
#include "qpoly/zigzag.hpp"

namespace qpoly {

struct SvgOptions {
  double scale = 40;  // pixels per unit circle radius
  bool zigzags = false;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const QuiverPolyhedron& qp, const IsoradialEmbedding& emb, const SvgOptions& opt = {}) {
  using detail::fmt;
  double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
  double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
  for (const auto& p : emb.faces) {
    lo_x = std::min(lo_x, p.center.x - 1);
    lo_y = std::min(lo_y, p.center.y - 1);
    hi_x = std::max(hi_x, p.center.x + 1);
    hi_y = std::max(hi_y, p.center.y + 1);
  }
  const double pad = 0.5, s = opt.scale;
  auto X = [&](double x) { return fmt((x - lo_x + pad) * s); };
  auto Y = [&](double y) { return fmt((hi_y - y + pad) * s); };  // flip: y grows upward

  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::vector<int> zig_of(qp.arrows.size(), -1);
  if (opt.zigzags) {
    auto zs = zigzag_paths(qp);
    for (std::size_t k = 0; k < zs.size(); ++k)
      for (std::size_t i = 0; i < zs[k].period.size(); i += 2) zig_of[zs[k].period[i]] = static_cast<int>(k);
  }

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt((hi_x - lo_x + 2 * pad) * s) +
         "\" height=\"" + fmt((hi_y - lo_y + 2 * pad) * s) + "\">\n";
  out += "<title>" + detail::xml_escape(qp.name) + "</title>\n";
  out += "<defs><marker id=\"tip\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
         "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n";

  out += "<g id=\"faces\" fill=\"none\">\n";
  for (const auto& p : emb.faces) {
    const char* stroke = p.face.sign == Sign::plus ? "#bbbbbb" : "#dddddd";
    out += "<circle cx=\"" + X(p.center.x) + "\" cy=\"" + Y(p.center.y) + "\" r=\"" + fmt(s) + "\" stroke=\"" +
           stroke + "\"/>\n";
  }
  out += "</g>\n<g id=\"arrows\" stroke-width=\"1.5\">\n";
  for (const auto& p : emb.faces) {
    if (p.face.sign != Sign::plus) continue;
    const auto& cyc = qp.face(p.face).cycle;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      Point h = p.head[i], t = p.head[(i + 1) % cyc.size()];
      int z = zig_of[cyc[i]];
      std::string colour = z < 0 ? "#333" : palette[z % 8];
      out += "<line x1=\"" + X(t.x) + "\" y1=\"" + Y(t.y) + "\" x2=\"" + X(h.x) + "\" y2=\"" + Y(h.y) + "\" stroke=\"" +
             colour + "\" marker-end=\"url(#tip)\"><title>" + detail::xml_escape(qp.arrows[cyc[i]].id) +
             "</title></line>\n";
    }
  }
  out += "</g>\n<g id=\"vertices\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& [key, p] : emb.positions) {
    out += "<circle cx=\"" + X(p.x) + "\" cy=\"" + Y(p.y) + "\" r=\"3\" fill=\"#000\"/>";
    out += "<text x=\"" + X(p.x + 0.08) + "\" y=\"" + Y(p.y + 0.08) + "\">" +
           detail::xml_escape(qp.vertices[key.first]) + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace qpoly
