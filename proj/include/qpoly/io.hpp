#pragma once

// Polyhedron documents: a strict JSON schema for quiver polyhedra plus
// optional grading, group actions and regression values.
//
//   {
//     "name": "hex1",
//     "vertices": ["0"],
//     "arrows": [{"id": "x", "tail": "0", "head": "0"}, ...],
//     "faces_plus": [{"cycle": ["x", "y", "z"], "weight": 1}],
//     "faces_minus": [{"cycle": ["x", "z", "y"]}],
//     "grading": {"x": "2/3", ...},
//     "actions": {"shift": {"generators": [{"vertices": {...}, "arrows": {...}}]}},
//     "expected": {"chi": "0", "genus": 1, ...}
//   }

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qpoly/action.hpp"
#include "qpoly/errors.hpp"
#include "qpoly/polyhedron.hpp"
#include "qpoly/rational.hpp"

namespace qpoly {

using Json = nlohmann::ordered_json;

struct PolyhedronDocument {
  QuiverPolyhedron qp;
  std::optional<std::vector<Rational>> grading;
  std::vector<GroupAction> actions;
  Json expected = Json::object();

  const GroupAction& action(std::string_view name) const {
    for (const auto& a : actions)
      if (a.name == name) return a;
    throw ArgumentError("no action named '" + std::string(name) + "'");
  }
};

namespace detail {

// Maps JSON pointers to byte offsets so schema errors can cite line:column.
class PositionIndex {
 public:
  explicit PositionIndex(std::string_view text) : s_(text) {
    try {
      value("");
    } catch (const std::out_of_range&) {
      // truncated input; keep what was indexed
    }
  }

  std::optional<std::size_t> offset(const std::string& pointer) const {
    auto it = pos_.find(pointer);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\r' || s_[i_] == '\t')) ++i_;
  }

  std::string string() {
    std::string out;
    ++i_;  // opening quote
    while (s_.at(i_) != '"') {
      if (s_[i_] == '\\') {
        ++i_;
        if (s_.at(i_) == 'u') i_ += 4;
        else out += s_[i_];
        ++i_;
        continue;
      }
      out += s_[i_++];
    }
    ++i_;
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  void value(const std::string& ptr) {
    ws();
    pos_[ptr] = i_;
    char c = s_.at(i_);
    if (c == '{') {
      ++i_;
      ws();
      if (s_.at(i_) == '}') {
        ++i_;
        return;
      }
      while (true) {
        ws();
        auto key = string();
        ws();
        ++i_;  // colon
        value(ptr + "/" + escape(key));
        ws();
        if (s_.at(i_++) == '}') return;
      }
    } else if (c == '[') {
      ++i_;
      ws();
      if (s_.at(i_) == ']') {
        ++i_;
        return;
      }
      for (std::size_t k = 0;; ++k) {
        value(ptr + "/" + std::to_string(k));
        ws();
        if (s_.at(i_++) == ']') return;
      }
    } else if (c == '"') {
      string();
    } else {
      while (i_ < s_.size() && std::string_view(",}] \n\r\t").find(s_[i_]) == std::string_view::npos) ++i_;
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::map<std::string, std::size_t> pos_;
};

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class SchemaReader {
 public:
  SchemaReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    PositionIndex index(text_);
    std::string where = source_;
    // fall back to the nearest enclosing value that was indexed
    std::string p = pointer;
    while (true) {
      if (auto off = index.offset(p)) {
        auto [line, col] = line_column(text_, *off);
        where += ":" + std::to_string(line) + ":" + std::to_string(col);
        break;
      }
      if (p.empty()) break;
      p.erase(p.rfind('/'));
    }
    throw InputError(where + ": " + message + (pointer.empty() ? "" : " (at " + pointer + ")"));
  }

  void keys(const Json& j, const std::string& ptr, std::initializer_list<std::string_view> allowed,
            std::initializer_list<std::string_view> required) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) fail(ptr + "/" + k, "unknown key '" + k + "'");
    }
    for (auto r : required)
      if (!j.contains(std::string(r))) fail(ptr, "missing key '" + std::string(r) + "'");
  }

  std::string str(const Json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    auto s = j.get<std::string>();
    if (s.empty()) fail(ptr, "empty identifier");
    return s;
  }

  const Json& array(const Json& j, const std::string& ptr) const {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
  }

 private:
  std::string_view text_;
  std::string source_;
};

}  // namespace detail

inline PolyhedronDocument parse_document(std::string_view text, const std::string& source = "<input>") {
  detail::SchemaReader r(text, source);
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    auto cut = msg.find("syntax error");
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     (cut == std::string::npos ? msg : msg.substr(cut)));
  }

  r.keys(root, "", {"name", "vertices", "arrows", "faces_plus", "faces_minus", "grading", "actions", "expected"},
         {"name", "vertices", "arrows", "faces_plus", "faces_minus"});

  PolyhedronDocument doc;
  QuiverPolyhedron& qp = doc.qp;
  qp.name = r.str(root["name"], "/name");

  std::map<std::string, std::size_t> vertex_index, arrow_index;
  const auto& verts = r.array(root["vertices"], "/vertices");
  for (std::size_t i = 0; i < verts.size(); ++i) {
    std::string ptr = "/vertices/" + std::to_string(i);
    auto id = r.str(verts[i], ptr);
    if (!vertex_index.emplace(id, i).second) r.fail(ptr, "duplicate vertex id '" + id + "'");
    qp.vertices.push_back(id);
  }
  if (qp.vertices.empty()) r.fail("/vertices", "at least one vertex is required");

  const auto& arrows = r.array(root["arrows"], "/arrows");
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    std::string ptr = "/arrows/" + std::to_string(i);
    r.keys(arrows[i], ptr, {"id", "tail", "head"}, {"id", "tail", "head"});
    Arrow a;
    a.id = r.str(arrows[i]["id"], ptr + "/id");
    if (a.id.find('*') != std::string::npos) r.fail(ptr + "/id", "arrow ids may not contain '*'");
    for (auto [key, slot] : {std::pair{"tail", &a.tail}, std::pair{"head", &a.head}}) {
      auto v = r.str(arrows[i][key], ptr + "/" + key);
      auto it = vertex_index.find(v);
      if (it == vertex_index.end()) r.fail(ptr + "/" + key, "unknown vertex '" + v + "'");
      *slot = it->second;
    }
    if (!arrow_index.emplace(a.id, i).second) r.fail(ptr + "/id", "duplicate arrow id '" + a.id + "'");
    qp.arrows.push_back(std::move(a));
  }

  for (Sign s : {Sign::plus, Sign::minus}) {
    std::string key = s == Sign::plus ? "faces_plus" : "faces_minus";
    const auto& faces = r.array(root[key], "/" + key);
    std::map<std::size_t, std::string> used;  // arrow -> pointer of first use in this family
    for (std::size_t f = 0; f < faces.size(); ++f) {
      std::string ptr = "/" + key + "/" + std::to_string(f);
      r.keys(faces[f], ptr, {"cycle", "weight"}, {"cycle"});
      Face face;
      const auto& cycle = r.array(faces[f]["cycle"], ptr + "/cycle");
      if (cycle.empty()) r.fail(ptr + "/cycle", "empty face cycle");
      for (std::size_t k = 0; k < cycle.size(); ++k) {
        std::string cp = ptr + "/cycle/" + std::to_string(k);
        auto id = r.str(cycle[k], cp);
        auto it = arrow_index.find(id);
        if (it == arrow_index.end()) r.fail(cp, "unknown arrow '" + id + "'");
        auto [u, fresh] = used.emplace(it->second, cp);
        if (!fresh)
          r.fail(cp, "arrow '" + id + "' used twice in " + key + " (first at " + u->second + "); violates PO");
        face.cycle.push_back(it->second);
      }
      for (std::size_t k = 0; k < face.cycle.size(); ++k) {
        const auto& a = qp.arrows[face.cycle[k]];
        const auto& b = qp.arrows[face.cycle[(k + 1) % face.cycle.size()]];
        if (a.tail != b.head)
          r.fail(ptr + "/cycle/" + std::to_string(k),
                 "face cycle does not compose: tail(" + a.id + ") != head(" + b.id + ")");
      }
      if (faces[f].contains("weight")) {
        const auto& w = faces[f]["weight"];
        if (!w.is_number_integer() || w.get<long long>() < 1 || w.get<long long>() > 1'000'000)
          r.fail(ptr + "/weight", "weight must be a positive integer");
        face.weight = static_cast<int>(w.get<long long>());
      }
      if (static_cast<long long>(face.weight) * static_cast<long long>(face.cycle.size()) <= 2)
        r.fail(ptr, "weight * length must exceed 2");
      qp.faces(s).push_back(std::move(face));
    }
  }

  if (root.contains("grading")) {
    const auto& g = root["grading"];
    if (!g.is_object()) r.fail("/grading", "expected an object");
    std::vector<std::optional<Rational>> charge(qp.arrows.size());
    for (const auto& [k, v] : g.items()) {
      auto it = arrow_index.find(k);
      if (it == arrow_index.end()) r.fail("/grading/" + k, "unknown arrow '" + k + "'");
      try {
        charge[it->second] = parse_rational(r.str(v, "/grading/" + k));
      } catch (const InputError& e) {
        r.fail("/grading/" + k, e.what());
      }
    }
    std::vector<Rational> out;
    for (std::size_t a = 0; a < charge.size(); ++a) {
      if (!charge[a]) r.fail("/grading", "no charge for arrow '" + qp.arrows[a].id + "'");
      out.push_back(*charge[a]);
    }
    doc.grading = std::move(out);
  }

  if (root.contains("actions")) {
    const auto& acts = root["actions"];
    if (!acts.is_object()) r.fail("/actions", "expected an object");
    for (const auto& [name, body] : acts.items()) {
      std::string ptr = "/actions/" + name;
      r.keys(body, ptr, {"generators"}, {"generators"});
      GroupAction action{name, {}};
      const auto& gens = r.array(body["generators"], ptr + "/generators");
      for (std::size_t k = 0; k < gens.size(); ++k) {
        std::string gp = ptr + "/generators/" + std::to_string(k);
        r.keys(gens[k], gp, {"vertices", "arrows"}, {"vertices", "arrows"});
        Symmetry sym;
        auto read_map = [&](const char* key, const std::map<std::string, std::size_t>& index,
                            std::vector<std::size_t>& out) {
          const auto& m = gens[k][key];
          std::string mp = gp + "/" + key;
          if (!m.is_object()) r.fail(mp, "expected an object");
          std::vector<std::optional<std::size_t>> img(index.size());
          std::set<std::size_t> seen;
          for (const auto& [from, to] : m.items()) {
            auto fi = index.find(from);
            if (fi == index.end()) r.fail(mp + "/" + from, "unknown id '" + from + "'");
            auto t = r.str(to, mp + "/" + from);
            auto ti = index.find(t);
            if (ti == index.end()) r.fail(mp + "/" + from, "unknown id '" + t + "'");
            if (!seen.insert(ti->second).second) r.fail(mp + "/" + from, "map is not a bijection");
            img[fi->second] = ti->second;
          }
          for (std::size_t i = 0; i < img.size(); ++i) {
            if (!img[i]) r.fail(mp, "map is not total");
            out.push_back(*img[i]);
          }
        };
        read_map("vertices", vertex_index, sym.vertex);
        read_map("arrows", arrow_index, sym.arrow);
        action.generators.push_back(std::move(sym));
      }
      doc.actions.push_back(std::move(action));
    }
  }

  if (root.contains("expected")) {
    if (!root["expected"].is_object()) r.fail("/expected", "expected an object");
    r.keys(root["expected"], "/expected",
           {"chi", "chi_stated", "genus", "orbifold_points", "grading_exists", "zigzag_paths", "condition_z", "rcharge",
            "perfect_matchings", "cancellation", "report_exit"},
           {});
    doc.expected = root["expected"];
  }
  return doc;
}

inline PolyhedronDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

inline std::string serialize_document(const PolyhedronDocument& doc) {
  const auto& qp = doc.qp;
  std::ostringstream out;
  out << "{\n";
  out << "  \"name\": " << Json(qp.name).dump() << ",\n";
  Json verts = Json::array();
  for (const auto& v : qp.vertices) verts.push_back(v);
  out << "  \"vertices\": " << verts.dump() << ",\n";
  out << "  \"arrows\": [\n";
  for (std::size_t i = 0; i < qp.arrows.size(); ++i) {
    const auto& a = qp.arrows[i];
    Json j = {{"id", a.id}, {"tail", qp.vertices[a.tail]}, {"head", qp.vertices[a.head]}};
    out << "    " << j.dump() << (i + 1 < qp.arrows.size() ? ",\n" : "\n");
  }
  out << "  ]";
  for (Sign s : {Sign::plus, Sign::minus}) {
    out << ",\n  \"" << (s == Sign::plus ? "faces_plus" : "faces_minus") << "\": [\n";
    const auto& faces = qp.faces(s);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      Json cycle = Json::array();
      for (auto a : faces[f].cycle) cycle.push_back(qp.arrows[a].id);
      Json j = {{"cycle", cycle}, {"weight", faces[f].weight}};
      out << "    " << j.dump() << (f + 1 < faces.size() ? ",\n" : "\n");
    }
    out << "  ]";
  }
  if (doc.grading) {
    Json g = Json::object();
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) g[qp.arrows[a].id] = to_string((*doc.grading)[a]);
    out << ",\n  \"grading\": " << g.dump();
  }
  if (!doc.actions.empty()) {
    out << ",\n  \"actions\": {\n";
    for (std::size_t k = 0; k < doc.actions.size(); ++k) {
      const auto& act = doc.actions[k];
      out << "    " << Json(act.name).dump() << ": {\"generators\": [\n";
      for (std::size_t g = 0; g < act.generators.size(); ++g) {
        Json vm = Json::object(), am = Json::object();
        for (std::size_t v = 0; v < qp.vertices.size(); ++v)
          vm[qp.vertices[v]] = qp.vertices[act.generators[g].vertex[v]];
        for (std::size_t a = 0; a < qp.arrows.size(); ++a)
          am[qp.arrows[a].id] = qp.arrows[act.generators[g].arrow[a]].id;
        Json j = {{"vertices", vm}, {"arrows", am}};
        out << "      " << j.dump() << (g + 1 < act.generators.size() ? ",\n" : "\n");
      }
      out << "    ]}" << (k + 1 < doc.actions.size() ? ",\n" : "\n");
    }
    out << "  }";
  }
  if (!doc.expected.empty()) out << ",\n  \"expected\": " << doc.expected.dump();
  out << "\n}\n";
  return out.str();
}

inline PolyhedronDocument make_document(QuiverPolyhedron qp) {
  PolyhedronDocument d;
  d.qp = std::move(qp);
  return d;
}

}  // namespace qpoly
