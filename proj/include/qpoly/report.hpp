#pragma once

// Whole-polyhedron consistency report: every check in sequence, a matrix of
// cross-checks between verdicts that must coincide, and an exit code.

#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qpoly/consistency.hpp"
#include "qpoly/covers.hpp"
#include "qpoly/grading.hpp"
#include "qpoly/homology.hpp"
#include "qpoly/io.hpp"
#include "qpoly/polyhedron.hpp"
#include "qpoly/rewriting.hpp"
#include "qpoly/zigzag.hpp"

namespace qpoly {

enum ExitCode : int { exit_ok = 0, exit_inconsistent = 1, exit_invalid = 2, exit_unsupported = 3 };

enum class CheckStatus { ok, fail, info, skipped };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::info;
  std::string text;
  std::optional<double> millis;
};

struct Agreement {
  std::string left, right;
  bool agree = true;
};

struct ConsistencyReport {
  std::string name;
  std::vector<CheckResult> checks;
  std::vector<Agreement> agreement;
  std::vector<std::string> notes;
  bool internal_disagreement = false;
  std::string verdict;  // text after "VERDICT: "
  int exit_code = exit_ok;

  const CheckResult* check(std::string_view n) const {
    for (const auto& c : checks)
      if (c.name == n) return &c;
    return nullptr;
  }
};

struct ReportOptions {
  std::optional<Rational> cancel_bound;  // default: 3 * largest face degree
  int radius = 2;                        // algebraic consistency window
  bool timings = false;
  RewriteOptions rewrite;
};

// Note printed when a document records a stated Euler characteristic that
// disagrees with the formula.
inline std::optional<std::string> chi_note(const PolyhedronDocument& doc) {
  auto it = doc.expected.find("chi_stated");
  if (it == doc.expected.end()) return std::nullopt;
  Rational stated = parse_rational(it->get<std::string>());
  Rational chi = euler_characteristic(doc.qp);
  if (stated == chi) return std::nullopt;
  return "stated value " + to_string(stated) + " differs from #Q0 - #Q1 + sum 1/E = " + to_string(chi);
}

inline std::string format_charges(const QuiverPolyhedron& qp, const std::vector<Rational>& r) {
  std::string out;
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    out += (a ? " " : "") + qp.arrows[a].id + "=" + to_string(r[a]);
  return out;
}

inline std::string format_vec(const IntVec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + ")";
}

inline std::string format_certificate(const QuiverPolyhedron& qp, const RayIntersectionCertificate& c) {
  return "arrow " + qp.arrows[c.arrow].id + ": zig ray step " + std::to_string(c.i) + " meets zag ray step " +
         std::to_string(c.j) + " at arrow " + qp.arrows[c.meeting_arrow].id + " offset " + format_vec(c.offset);
}

inline std::string format_counterexample(const QuiverPolyhedron& qp, const CancellationCounterexample& c) {
  Path a = make_path(qp, {c.arrow});
  const bool right = c.side == CancellationCounterexample::Side::right;
  Path pa = right ? concat(qp, c.p, a) : concat(qp, a, c.p);
  Path qa = right ? concat(qp, c.q, a) : concat(qp, a, c.q);
  return format_path(qp, c.p) + " != " + format_path(qp, c.q) + " but " + format_path(qp, pa) + " = " +
         format_path(qp, qa) + " (degree " + to_string(c.degree) + ")";
}

inline ConsistencyReport build_report(const PolyhedronDocument& doc, const ReportOptions& opt = {}) {
  const auto& qp = doc.qp;
  ConsistencyReport rep;
  rep.name = qp.name;

  auto timed = [&](const std::string& name, const std::function<void(CheckResult&)>& body) {
    CheckResult c;
    c.name = name;
    auto start = std::chrono::steady_clock::now();
    body(c);
    if (opt.timings)
      c.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rep.checks.push_back(std::move(c));
    return &rep.checks.back();
  };
  auto agree = [&](std::string l, std::string r, bool ok) {
    rep.agreement.push_back({std::move(l), std::move(r), ok});
    if (!ok) rep.internal_disagreement = true;
  };

  auto violations = validate_polyhedron(qp);
  timed("validate", [&](CheckResult& c) {
    if (violations.empty()) {
      c.status = CheckStatus::ok;
      c.text = "ok";
      return;
    }
    c.status = CheckStatus::fail;
    for (const auto& v : violations) c.text += (c.text.empty() ? "" : "; ") + format_violation(v);
  });
  if (!violations.empty()) {
    rep.verdict = "invalid-input: " + format_violation(violations.front());
    rep.exit_code = exit_invalid;
    return rep;
  }

  const Rational chi = euler_characteristic(qp);
  timed("chi", [&](CheckResult& c) { c.text = to_string(chi); });
  if (auto note = chi_note(doc)) rep.notes.push_back("chi: " + *note);

  timed("topology", [&](CheckResult& c) {
    auto t = surface_topology(qp);
    c.text = "genus " + std::to_string(t.genus) + ", orbifold points ";
    if (t.orbifold_points.empty()) c.text += "none";
    for (std::size_t i = 0; i < t.orbifold_points.size(); ++i)
      c.text += (i ? "," : "") + std::to_string(t.orbifold_points[i]);
  });
  const int genus = surface_topology(qp).genus;
  const bool torus = qp.unweighted() && genus == 1;

  std::optional<std::vector<Rational>> charge;
  timed("grading", [&](CheckResult& c) {
    if (doc.grading && is_grading(qp, *doc.grading)) {
      charge = doc.grading;
      c.status = CheckStatus::ok;
      c.text = "given " + format_charges(qp, *charge);
      return;
    }
    if (auto g = find_grading(qp)) charge = g->charge;
    c.status = charge ? CheckStatus::ok : CheckStatus::fail;
    c.text = charge ? format_charges(qp, *charge) : "none (no strictly positive grading)";
    if (doc.grading) c.text = "given charges are not a grading; " + c.text;
  });

  if (qp.unweighted()) {
    bool hall = false;
    timed("hall", [&](CheckResult& c) {
      hall = hall_condition(qp).holds;
      c.status = hall ? CheckStatus::ok : CheckStatus::fail;
      c.text = hall ? "holds" : "fails";
    });
    agree("hall", "grading", hall == charge.has_value());
  } else {
    timed("hall", [&](CheckResult& c) {
      c.status = CheckStatus::skipped;
      c.text = "n/a (weighted)";
    });
  }

  // Condition Z: unweighted tori directly, weighted chi = 0 through a cover.
  std::optional<bool> z_passes;
  std::string z_reason;
  if (chi == 0) {
    timed("zigzag", [&](CheckResult& c) {
      std::optional<CoverMap> cover;
      if (!qp.unweighted()) cover = unweighted_cyclic_cover(qp);
      const QuiverPolyhedron& target = cover ? cover->cover : qp;
      if (cover) c.text = "on " + std::to_string(cover->cover.vertices.size() / qp.vertices.size()) + "-fold cover: ";
      auto paths = zigzag_paths(target);
      c.text += std::to_string(paths.size()) + " paths";
      for (const auto& z : paths) c.text += " " + format_vec(z.homology) + "x" + std::to_string(z.period.size());
    });
    timed("condition-Z", [&](CheckResult& c) {
      auto z = condition_z_any(qp);
      const QuiverPolyhedron& target = z.cover ? z.cover->cover : qp;
      z_passes = z.result.passes;
      c.status = z.result.passes ? CheckStatus::ok : CheckStatus::fail;
      if (z.result.passes) {
        c.text = "passes";
      } else {
        c.text = "fails at " + format_certificate(target, *z.result.certificate);
        z_reason = "condition Z fails at arrow " + target.arrows[z.result.certificate->arrow].id;
      }
      if (z.cover) c.text += " (checked on cover)";
    });
  } else {
    timed("condition-Z", [&](CheckResult& c) {
      c.status = CheckStatus::skipped;
      c.text = "n/a (chi " + to_string(chi) + ")";
    });
  }

  std::optional<bool> lp_feasible;
  timed("rcharge-lp", [&](CheckResult& c) {
    auto r = find_consistent_rcharge(qp);
    lp_feasible = r.has_value();
    c.status = r ? CheckStatus::ok : CheckStatus::fail;
    c.text = r ? "feasible " + format_charges(qp, *r) : "infeasible";
    // summing the face and vertex conditions forces chi = 0
    if (chi != 0) c.status = CheckStatus::info;
  });
  if (z_passes) agree("condition-Z", "rcharge-lp", *z_passes == *lp_feasible);

  if (torus) {
    timed("rcharge-zigzag", [&](CheckResult& c) {
      if (!*z_passes) {
        c.status = CheckStatus::skipped;
        c.text = "skipped (condition Z fails)";
        return;
      }
      auto zr = rcharge_from_zigzag(qp);
      bool closes = zr.faces_close && zr.vertices_close;
      c.status = closes ? CheckStatus::ok : CheckStatus::fail;
      std::ostringstream s;
      s.precision(6);
      for (std::size_t a = 0; a < qp.arrows.size(); ++a) s << (a ? " " : "") << qp.arrows[a].id << "=" << zr.charge[a];
      c.text = (closes ? "closes " : "does not close ") + s.str();
      agree("condition-Z", "rcharge-zigzag", closes);
    });
  }

  std::optional<bool> cancel_holds;
  std::string cancel_reason;
  if (charge) {
    timed("cancellation", [&](CheckResult& c) {
      Rational bound = opt.cancel_bound ? *opt.cancel_bound : default_cancellation_bound(qp, *charge);
      try {
        auto v = cancellation_check(qp, *charge, bound, opt.rewrite);
        cancel_holds = v.holds;
        c.status = v.holds ? CheckStatus::ok : CheckStatus::fail;
        c.text = (v.holds ? "holds up to degree " : "fails (bound " + to_string(bound) + ")") +
                 (v.holds ? to_string(bound) : std::string());
        if (!v.holds) {
          c.text += ": " + format_counterexample(qp, *v.counterexample);
          cancel_reason = "cancellation fails at degree " + to_string(v.counterexample->degree);
        }
      } catch (const ResourceLimit& e) {
        c.status = CheckStatus::skipped;
        c.text = "skipped at degree " + to_string(bound) + " (" + e.what() + ")";
      }
    });
    if (z_passes && cancel_holds) agree("condition-Z", "cancellation", *z_passes == *cancel_holds);
  } else {
    timed("cancellation", [&](CheckResult& c) {
      c.status = CheckStatus::skipped;
      c.text = "skipped (no grading)";
    });
  }

  if (torus && charge) {
    timed("algebraic", [&](CheckResult& c) {
      if (cancel_holds == false) {
        c.status = CheckStatus::skipped;
        c.text = "skipped (cancellation fails)";
        return;
      }
      auto v = algebraic_consistency_check(qp, *charge, opt.radius, opt.cancel_bound, opt.rewrite);
      c.status = v.consistent_evidence ? CheckStatus::ok : CheckStatus::fail;
      c.text = (v.consistent_evidence ? "consistent-evidence: " : "no evidence: ") + v.reason + ", " +
               std::to_string(v.pairs_checked) + " pairs at radius " + std::to_string(opt.radius);
      // a sufficient criterion: evidence without condition Z is a contradiction
      if (v.consistent_evidence) agree("algebraic", "condition-Z", *z_passes);
    });
  }

  if (chi > 0) {
    rep.verdict = "inconsistent: CY-3 impossible (Euler characteristic > 0)";
    rep.exit_code = exit_inconsistent;
  } else if (!charge) {
    rep.verdict = "inconsistent: no positive grading";
    rep.exit_code = exit_inconsistent;
  } else if (z_passes == false) {
    rep.verdict = "inconsistent: " + z_reason;
    rep.exit_code = exit_inconsistent;
  } else if (cancel_holds == false) {
    rep.verdict = "inconsistent: " + cancel_reason;
    rep.exit_code = exit_inconsistent;
  } else if (z_passes == true && lp_feasible == true) {
    rep.verdict = "consistent";
  } else {
    rep.verdict = "no-inconsistency-detected";
  }
  return rep;
}

inline std::string render_report(const ConsistencyReport& rep, bool color = false) {
  auto paint = [&](const std::string& s, const char* code) {
    return color ? std::string("\x1b[") + code + "m" + s + "\x1b[0m" : s;
  };
  auto status_word = [&](CheckStatus s) -> std::string {
    switch (s) {
      case CheckStatus::ok: return paint("ok  ", "32");
      case CheckStatus::fail: return paint("FAIL", "31");
      case CheckStatus::skipped: return paint("skip", "33");
      case CheckStatus::info: return "    ";
    }
    return "";
  };
  std::ostringstream out;
  if (rep.internal_disagreement) out << paint("INTERNAL-DISAGREEMENT", "1;31") << "\n";
  out << "report " << rep.name << "\n";
  for (const auto& c : rep.checks) {
    std::string name = c.name;
    name.resize(std::max<std::size_t>(name.size(), 15), ' ');
    out << "  " << status_word(c.status) << " " << name << " " << c.text;
    if (c.millis) {
      std::ostringstream ms;
      ms.setf(std::ios::fixed);
      ms.precision(1);
      ms << *c.millis;
      out << " [" << ms.str() << " ms]";
    }
    out << "\n";
  }
  for (const auto& n : rep.notes) out << "note: " << n << "\n";
  if (!rep.agreement.empty()) {
    out << "agreement\n";
    for (const auto& a : rep.agreement)
      out << "  " << a.left << " / " << a.right << ": " << (a.agree ? "agree" : paint("DISAGREE", "1;31")) << "\n";
  }
  out << paint("VERDICT: " + rep.verdict, rep.exit_code == exit_ok ? "1;32" : "1;31") << "\n";
  return out.str();
}

}  // namespace qpoly
