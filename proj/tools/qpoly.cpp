// qpoly: command-line front end for quiver polyhedra documents.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qpoly/consistency.hpp"
#include "qpoly/covers.hpp"
#include "qpoly/io.hpp"
#include "qpoly/parallel.hpp"
#include "qpoly/report.hpp"
#include "qpoly/svg.hpp"
#include "qpoly/zigzag.hpp"

using namespace qpoly;

namespace {

struct Output {
  std::ostringstream out, err;
  int code = exit_ok;

  void verdict(const std::string& reason) {
    out << "VERDICT: " << reason << "\n";
    code = exit_inconsistent;
  }
};

std::string path_text(const QuiverPolyhedron& qp, const std::vector<std::size_t>& arrows) {
  std::string s;
  for (auto a : arrows) s += (s.empty() ? "" : " ") + qp.arrows[a].id;
  return s.empty() ? "-" : s;
}

const std::vector<Rational>& need_grading(const PolyhedronDocument& doc, std::optional<std::vector<Rational>>& store) {
  if (doc.grading && is_grading(doc.qp, *doc.grading))
    store = doc.grading;
  else if (auto g = find_grading(doc.qp))
    store = g->charge;
  if (!store) throw ConsistencyViolation("no positive grading");
  return *store;
}

void cmd_validate(const PolyhedronDocument& doc, Output& o) {
  auto report = validate_polyhedron(doc.qp);
  if (report.empty()) {
    o.out << "ok\n";
    return;
  }
  for (const auto& v : report) o.out << format_violation(v) << "\n";
  o.code = exit_invalid;
}

void cmd_chi(const PolyhedronDocument& doc, Output& o) {
  o.out << to_string(euler_characteristic(doc.qp)) << "\n";
  if (auto note = chi_note(doc)) o.out << "note: " << *note << "\n";
}

void cmd_relations(const PolyhedronDocument& doc, Output& o) {
  const auto& qp = doc.qp;
  require_valid(qp);
  o.out << "W = " << format_superpotential(qp, superpotential(qp)) << "\n";
  for (const auto& r : jacobi_relations(qp))
    o.out << "d" << qp.arrows[r.arrow].id << ": " << format_path(qp, r.lhs) << " = " << format_path(qp, r.rhs) << "\n";
}

void cmd_grading(const PolyhedronDocument& doc, Output& o) {
  const auto& qp = doc.qp;
  if (auto g = find_grading(qp)) {
    o.out << format_charges(qp, g->charge) << "\n";
    o.out << "face degree " << to_string(g->face_degree) << "\n";
    return;
  }
  if (qp.unweighted()) {
    auto hall = hall_condition(qp);
    std::string plus, minus;
    for (auto f : hall.witness_plus) plus += (plus.empty() ? "" : " ") + face_label(qp, {Sign::plus, f});
    for (auto f : hall.witness_minus) minus += (minus.empty() ? "" : " ") + face_label(qp, {Sign::minus, f});
    o.out << "hall witness S+ = {" << plus << "} touches S- = {" << minus << "}\n";
  }
  o.verdict("no positive grading");
}

void cmd_zigzag(const PolyhedronDocument& doc, bool check, Output& o) {
  const auto& qp = doc.qp;
  require_valid(qp);
  if (check) {
    auto z = condition_z_any(qp);
    const auto& target = z.cover ? z.cover->cover : qp;
    if (z.cover) o.out << "checked on a " << target.vertices.size() / qp.vertices.size() << "-fold unweighted cover\n";
    if (z.result.passes) {
      o.out << "condition Z passes\n";
    } else {
      o.out << "certificate: " << format_certificate(target, *z.result.certificate) << "\n";
      o.verdict("condition Z fails at arrow " + target.arrows[z.result.certificate->arrow].id);
    }
    return;
  }
  if (homology(qp).genus != 1 || !qp.unweighted())
    throw UnsupportedTopology("zigzag paths are listed for unweighted tori only");
  auto paths = zigzag_paths(qp);
  for (std::size_t k = 0; k < paths.size(); ++k)
    o.out << "Z" << k << " " << format_vec(paths[k].homology) << " " << path_text(qp, paths[k].period) << "\n";
}

void cmd_rcharge(const PolyhedronDocument& doc, const std::string& method, Output& o) {
  const auto& qp = doc.qp;
  if (method == "lp") {
    if (auto r = find_consistent_rcharge(qp))
      o.out << format_charges(qp, *r) << "\n";
    else
      o.verdict("no consistent R-charge");
    return;
  }
  auto zr = rcharge_from_zigzag(qp);
  char buf[64];
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    std::snprintf(buf, sizeof buf, "%.9f", zr.charge[a]);
    o.out << qp.arrows[a].id << " " << buf << " zig " << format_vec(zr.zig[a]) << " zag " << format_vec(zr.zag[a])
          << "\n";
  }
  if (!zr.faces_close || !zr.vertices_close) o.verdict("zigzag angles do not close");
}

void cmd_matchings(const PolyhedronDocument& doc, bool polygon, int boundary, unsigned seed, Output& o) {
  const auto& qp = doc.qp;
  auto ms = enumerate_perfect_matchings(qp);
  o.out << ms.size() << " perfect matchings\n";
  for (std::size_t k = 0; k < ms.size(); ++k) {
    o.out << "M" << k << " " << path_text(qp, ms[k].arrows);
    if (!ms[k].homology.empty()) o.out << " " << format_vec(ms[k].homology);
    o.out << "\n";
  }
  if (polygon) {
    auto poly = matching_polygon(qp);
    o.out << "hull";
    for (const auto& p : poly.hull) o.out << " " << format_vec(p);
    o.out << "\ntwice area " << poly.twice_area << "\n";
    for (const auto& [p, n] : poly.points) o.out << "point " << format_vec(p) << " multiplicity " << n << "\n";
  }
  if (boundary > 0) {
    auto zr = rcharge_from_zigzag(qp);
    auto emb = isoradial_embedding(qp, zr.charge, 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    for (int k = 0; k < boundary; ++k) {
      double theta = 2 * std::numbers::pi * k / boundary + jitter(rng);
      auto b = boundary_matching(qp, emb, theta);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", theta);
      o.out << "theta " << buf << " P+ " << path_text(qp, b.plus.arrows) << " P- " << path_text(qp, b.minus.arrows)
            << "\n";
    }
  }
}

void cmd_cancel(const PolyhedronDocument& doc, const std::string& bound, Output& o) {
  std::optional<std::vector<Rational>> store;
  const auto& g = need_grading(doc, store);
  auto v = cancellation_check(doc.qp, g, bound.empty() ? default_cancellation_bound(doc.qp, g) : parse_rational(bound));
  if (v.holds) {
    o.out << "cancellation holds up to degree " << to_string(v.bound) << "\n";
    return;
  }
  o.out << "counterexample: " << format_counterexample(doc.qp, *v.counterexample) << "\n";
  o.verdict("cancellation fails at degree " + to_string(v.counterexample->degree));
}

void cmd_consistency(const PolyhedronDocument& doc, int radius, const std::string& bound, Output& o) {
  std::optional<std::vector<Rational>> store;
  const auto& g = need_grading(doc, store);
  std::optional<Rational> b;
  if (!bound.empty()) b = parse_rational(bound);
  auto v = algebraic_consistency_check(doc.qp, g, radius, b);
  o.out << v.pairs_checked << " lifted vertex pairs checked at radius " << radius << "\n";
  if (v.consistent_evidence) {
    o.out << "consistent-evidence: " << v.reason << "\n";
    return;
  }
  if (v.counterexample) o.out << "counterexample: " << format_counterexample(doc.qp, *v.counterexample) << "\n";
  if (v.unwitnessed) {
    const auto& u = *v.unwitnessed;
    o.out << "unwitnessed: " << doc.qp.vertices[u.from] << format_vec(u.from_offset) << " -> "
          << doc.qp.vertices[u.to] << format_vec(u.to_offset) << "\n";
  }
  o.verdict(v.reason);
}

void cmd_quotient(const PolyhedronDocument& doc, const std::string& action, const std::string& out_file, Output& o) {
  auto q = quotient(doc.qp, doc.action(action));
  auto text = serialize_document(make_document(q.qp));
  if (out_file.empty()) {
    o.out << text;
    return;
  }
  std::ofstream f(out_file);
  if (!(f << text)) throw ArgumentError("cannot write " + out_file);
  o.out << "wrote " << out_file << " (" << q.qp.vertices.size() << " vertices, " << q.qp.arrows.size()
        << " arrows, group order " << q.group_order << ")\n";
}

void cmd_embed(const PolyhedronDocument& doc, const std::string& out_file, int radius, bool zigzags, Output& o) {
  const auto& qp = doc.qp;
  auto zr = rcharge_from_zigzag(qp);
  auto emb = isoradial_embedding(qp, zr.charge, radius, 1e-9, false);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", emb.residual);
  if (emb.residual > emb.tolerance) {
    o.out << "residual " << buf << " at " << emb.worst << "\n";
    o.verdict("embedding-failure");
    return;
  }
  auto svg = render_svg(qp, emb, {40, zigzags});
  if (out_file == "-") {
    o.out << svg;
    return;
  }
  std::ofstream f(out_file);
  if (!(f << svg)) throw ArgumentError("cannot write " + out_file);
  o.out << "wrote " << out_file << " (" << emb.faces.size() << " faces, residual " << buf << ")\n";
}

bool use_color() { return std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quiver polyhedra: validation, gradings, zigzag paths and consistency checks"};
  app.require_subcommand(1);
  unsigned threads = 0, seed = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--seed", seed, "seed for direction jitter");

  std::string file;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("file", file, "polyhedron document")->required();
    return s;
  };
  auto* validate = sub("validate", "check the polyhedron axioms");
  auto* chi = sub("chi", "orbifold Euler characteristic");
  auto* relations = sub("relations", "superpotential and Jacobi relations");
  auto* grading = sub("grading", "canonical positive grading");
  auto* zigzag = sub("zigzag", "zigzag paths");
  bool check = false;
  zigzag->add_flag("--check", check, "decide condition Z");
  auto* rcharge = sub("rcharge", "consistent R-charge");
  std::string method = "lp";
  rcharge->add_option("--method", method)->check(CLI::IsMember({"lp", "zigzag"}));
  auto* matchings = sub("matchings", "perfect matchings");
  bool polygon = false;
  int boundary = 0;
  matchings->add_flag("--polygon", polygon, "matching polygon");
  matchings->add_option("--boundary", boundary, "boundary matchings at N directions")->check(CLI::NonNegativeNumber);
  auto* cancel = sub("cancel", "bounded cancellation check");
  std::string bound;
  cancel->add_option("--bound", bound, "degree bound (default 3 x largest face degree)");
  auto* consistency = sub("consistency", "algebraic consistency on a lifted window");
  int radius = 2;
  std::string cons_bound;
  consistency->add_option("--radius", radius)->check(CLI::NonNegativeNumber);
  consistency->add_option("--bound", cons_bound, "degree bound per pair");
  auto* quot = sub("quotient", "quotient by a named group action");
  std::string action, out_file;
  quot->add_option("--action", action)->required();
  quot->add_option("--out", out_file);
  auto* embed = sub("embed", "isoradial embedding as SVG");
  int embed_radius = 2;
  bool zigzags = false;
  embed->add_option("--out", out_file, "SVG file, - for stdout")->required();
  embed->add_option("--radius", embed_radius)->check(CLI::NonNegativeNumber);
  embed->add_flag("--zigzags", zigzags, "colour arrows by zig path");
  auto* report = sub("report", "run every check");
  bool timings = false;
  std::string report_bound;
  int report_radius = 2;
  report->add_flag("--timings", timings, "append per-check timings");
  report->add_option("--bound", report_bound, "cancellation degree bound");
  report->add_option("--radius", report_radius)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }
  set_thread_count(threads);

  Output o;
  try {
    auto doc = load_document(file);
    if (validate->parsed()) cmd_validate(doc, o);
    if (chi->parsed()) cmd_chi(doc, o);
    if (relations->parsed()) cmd_relations(doc, o);
    if (grading->parsed()) cmd_grading(doc, o);
    if (zigzag->parsed()) cmd_zigzag(doc, check, o);
    if (rcharge->parsed()) cmd_rcharge(doc, method, o);
    if (matchings->parsed()) cmd_matchings(doc, polygon, boundary, seed, o);
    if (cancel->parsed()) cmd_cancel(doc, bound, o);
    if (consistency->parsed()) cmd_consistency(doc, radius, cons_bound, o);
    if (quot->parsed()) cmd_quotient(doc, action, out_file, o);
    if (embed->parsed()) cmd_embed(doc, out_file, embed_radius, zigzags, o);
    if (report->parsed()) {
      ReportOptions opt;
      opt.timings = timings;
      opt.radius = report_radius;
      if (!report_bound.empty()) opt.cancel_bound = parse_rational(report_bound);
      auto rep = build_report(doc, opt);
      o.out << render_report(rep, use_color());
      o.code = rep.exit_code;
    }
  } catch (const ConsistencyViolation& e) {
    o.verdict(e.what());
  } catch (const GeometryError& e) {
    o.err << "qpoly: " << e.what() << "\n";
    o.verdict("embedding-failure");
  } catch (const UnsupportedTopology& e) {
    o.err << "qpoly: unsupported: " << e.what() << "\n";
    o.code = exit_unsupported;
  } catch (const InputError& e) {
    o.err << "qpoly: " << e.what() << "\n";
    o.code = exit_invalid;
  } catch (const ArgumentError& e) {
    o.err << "qpoly: " << e.what() << "\n";
    o.code = exit_invalid;
  } catch (const ResourceLimit& e) {
    o.err << "qpoly: resource limit: " << e.what() << "\n";
    o.code = exit_invalid;
  }
  std::cout << o.out.str() << std::flush;
  std::cerr << o.err.str() << std::flush;
  return o.code;
}
