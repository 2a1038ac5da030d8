// Acceptance checks: one PASS/FAIL line per criterion.

#include <algorithm>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "qpoly/consistency.hpp"
#include "qpoly/covers.hpp"
#include "qpoly/grading.hpp"
#include "qpoly/random.hpp"
#include "qpoly/rewriting.hpp"
#include "qpoly/zigzag.hpp"
#include "support.hpp"

using namespace qpoly;
using namespace testing_support;

namespace {

struct Check {
  std::ostringstream why;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

const std::vector<std::string> corpus{"hex1", "conifold", "sphereXYZ", "antiprism", "antiprism-weighted",
                                      "hex3", "badTorus",  "ungraded"};

std::string rename(std::string s, const std::map<char, char>& sigma) {
  for (auto& c : s)
    if (sigma.count(c)) c = sigma.at(c);
  return s;
}

void sphere_example(Check& c) {
  auto qp = load("sphereXYZ").qp;
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& r : jacobi_relations(qp)) {
    auto l = format_path(qp, r.lhs), rr = format_path(qp, r.rhs);
    got.insert(std::minmax(l, rr));
  }
  const std::vector<std::pair<std::string, std::string>> want{{"x*x", "y*z"}, {"y*y", "z*x"}, {"z*z", "x*y"}};
  std::string letters = "xyz";
  bool match = false;
  do {
    std::map<char, char> sigma{{'x', letters[0]}, {'y', letters[1]}, {'z', letters[2]}};
    std::set<std::pair<std::string, std::string>> w;
    for (const auto& [l, r] : want) w.insert(std::minmax(rename(l, sigma), rename(r, sigma)));
    match = match || w == got;
  } while (std::next_permutation(letters.begin(), letters.end()));
  c.expect(match, "relations differ from x^2-yz, y^2-zx, z^2-xy");
  c.expect(euler_characteristic(qp) == 0, "chi != 0");
  auto t = surface_topology(qp);
  c.expect(t.genus == 0 && t.orbifold_points == std::vector<int>{3, 3, 3}, "topology is not S^2(3,3,3)");
  const std::vector<std::pair<std::string, std::string>> rel{{"xx", "yz"}, {"yy", "zx"}, {"zz", "xy"}};
  EquivClasses cls(qp, uniform(qp, Rational(2, 3)), 4);
  for (std::size_t n = 0; n <= 6; ++n) {
    auto count = cls.count_classes(0, 0, Rational(2 * static_cast<long long>(n), 3));
    auto oracle = word_classes("xyz", n, rel);
    c.expect(count == oracle && count == (n + 1) * (n + 2) / 2,
             "length " + std::to_string(n) + ": " + std::to_string(count) + " classes, oracle " + std::to_string(oracle));
  }
}

void antiprism_example(Check& c) {
  auto qp = load("antiprism").qp;
  c.expect(euler_characteristic(qp) == 2, "unweighted chi != 2");
  auto rep = run_cli("report " + fixture_path("antiprism"));
  c.expect(rep.exit_code == 1, "report exit " + std::to_string(rep.exit_code));
  c.expect(rep.out.find("VERDICT: inconsistent: CY-3 impossible (Euler characteristic > 0)") != std::string::npos,
           "report lacks the CY-3 verdict");
  auto g = find_grading(qp);
  c.expect(g.has_value(), "no grading");
  if (g) {
    // degrees 2 and 3 up to one common factor
    Rational sq, mid;
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
      bool square = false;
      for (Sign s : {Sign::plus, Sign::minus})
        for (const auto& f : qp.faces(s))
          if (f.cycle.size() == 4 && std::count(f.cycle.begin(), f.cycle.end(), a)) square = true;
      Rational& slot = square ? sq : mid;
      if (slot == 0) slot = g->charge[a];
      c.expect(slot == g->charge[a], "grading not constant on " + std::string(square ? "square" : "intermediate") +
                                         " arrows");
    }
    c.expect(sq * 3 == mid * 2, "square:intermediate ratio is not 2:3");
  }
  auto w = load("antiprism-weighted").qp;
  auto gw = find_grading(w);
  c.expect(gw && std::all_of(gw->charge.begin(), gw->charge.end(), [&](const Rational& r) { return r == gw->charge[0]; }),
           "weighted grading not uniform");
  c.expect(euler_characteristic(w) == Rational(-16, 3), "weighted chi != -16/3");
  auto chi = run_cli("chi " + fixture_path("antiprism-weighted"));
  c.expect(chi.out.rfind("-16/3\n", 0) == 0 && chi.out.find("-31/6") != std::string::npos, "chi note missing");
}

void equivalence(Check& c) {
  for (auto name : {"hex1", "conifold", "badTorus"}) {
    auto qp = load(name).qp;
    bool z = condition_z(qp).passes;
    bool lp = find_consistent_rcharge(qp).has_value();
    auto g = find_grading(qp);
    bool cancel = cancellation_check(qp, g->charge, default_cancellation_bound(qp, g->charge)).holds;
    c.expect(z == lp && lp == cancel, std::string(name) + ": Z " + std::to_string(z) + " LP " + std::to_string(lp) +
                                          " cancellation " + std::to_string(cancel));
    c.expect(z == (std::string(name) != "badTorus"), std::string(name) + ": unexpected verdict");
  }
}

void random_agreement(Check& c) {
  std::mt19937_64 rng(20240601);
  RandomPolyhedronOptions opt;
  opt.genus = 1;
  opt.max_vertices = 4;
  opt.max_arrows = 10;
  int n = 0, pass = 0;
  while (n < 250) {
    auto qp = random_polyhedron(rng, opt);
    if (!qp) break;
    ++n;
    bool z = condition_z(*qp).passes;
    bool lp = find_consistent_rcharge(*qp).has_value();
    pass += z;
    c.expect(z == lp, "disagreement on random torus #" + std::to_string(n));
    c.expect(qp->unweighted() && qp->vertices.size() <= 4 && qp->arrows.size() <= 10, "generator out of range");
  }
  c.expect(n >= 200, "only " + std::to_string(n) + " polyhedra generated");
  c.expect(pass > 0 && pass < n, "sample lacks one of the two verdicts");
  c.why << (c.ok ? "" : " ") << "(" << n << " tori, " << pass << " pass Z)";
}

void cover_transfer(Check& c) {
  const std::vector<IntMatrix> lattices{{{2, 0}, {0, 1}}, {{3, 0}, {0, 1}}};
  for (auto name : {"hex1", "badTorus"}) {
    auto qp = load(name).qp;
    auto g = find_grading(qp)->charge;
    auto bound = default_cancellation_bound(qp, g);
    for (const auto& l : lattices) {
      auto m = translation_cover(qp, l);
      auto pulled = pull_grading(m.arrow_proj, g);
      c.expect(is_grading(m.cover, pulled), std::string(name) + ": pulled grading invalid");
      auto v = cancellation_transfer_check(m.cover, m.deck, pulled, bound);
      c.expect(isomorphic(quotient(m.cover, m.deck).qp, qp), std::string(name) + ": quotient is not the base");
      c.expect(v.agree, std::string(name) + ": cover and base disagree");
      c.expect(v.quotient.holds == cancellation_check(qp, g, bound).holds, std::string(name) + ": base verdict differs");
      auto q = quotient(m.cover, m.deck);
      auto pushed = push_grading(q, pulled);
      c.expect(is_grading(q.qp, pushed), std::string(name) + ": pushed grading invalid");
      auto gc = find_grading(m.cover);
      c.expect(gc && is_grading(q.qp, push_grading(q, gc->charge)), std::string(name) + ": cover grading does not descend");
    }
  }
}

void matching_facts(Check& c) {
  for (auto [name, r, count, hull, area] :
       {std::tuple{"hex1", 2.0 / 3, 3u, 3u, 1LL}, std::tuple{"conifold", 0.5, 4u, 4u, 2LL}}) {
    auto qp = load(name).qp;
    auto ms = enumerate_perfect_matchings(qp);
    c.expect(ms.size() == count && matchings_by_subsets(qp).size() == count, std::string(name) + ": matching count");
    auto poly = matching_polygon(qp);
    c.expect(poly.hull.size() == hull && poly.twice_area == area, std::string(name) + ": polygon shape");
    if (hull == 4 && poly.hull.size() == 4)
      c.expect(sub(poly.hull[1], poly.hull[0]) == sub(poly.hull[2], poly.hull[3]), std::string(name) + ": not a parallelogram");
    auto emb = isoradial_embedding(qp, std::vector<double>(qp.arrows.size(), r), 2);
    for (int k = 0; k < 36; ++k) {
      auto b = boundary_matching(qp, emb, 2 * std::numbers::pi * k / 36 + 0.0137);
      c.expect(is_perfect_matching(qp, b.plus.arrows) && is_perfect_matching(qp, b.minus.arrows),
               std::string(name) + ": boundary matching not perfect");
    }
    for (const auto& z : zigzag_paths(qp)) {
      auto b = boundary_matching(qp, emb, zigzag_epsilon(qp, emb, z) + 1e-6);
      for (std::size_t i = 1; i < z.period.size(); i += 2)
        c.expect(b.plus.contains(z.period[i]), std::string(name) + ": odd zigzag arrow missing from P+");
    }
  }
}

void isoradial_closure(Check& c) {
  for (auto [name, r] : {std::pair{"hex1", 2.0 / 3}, std::pair{"conifold", 0.5}}) {
    auto qp = load(name).qp;
    auto emb = isoradial_embedding(qp, std::vector<double>(qp.arrows.size(), r), 3, 1e-9, false);
    c.expect(emb.residual < 1e-9, std::string(name) + ": residual " + std::to_string(emb.residual));
  }
}

void determinism(Check& c) {
  for (const auto& name : corpus) {
    auto a = run_cli("report " + fixture_path(name));
    auto b = run_cli("report " + fixture_path(name));
    auto t1 = run_cli("--threads 1 report " + fixture_path(name));
    auto t4 = run_cli("--threads 4 report " + fixture_path(name));
    c.expect(!a.out.empty(), name + ": empty report");
    c.expect(a.out == b.out && a.out == t1.out && a.out == t4.out, name + ": report output differs");
    c.expect(a.exit_code == b.exit_code && a.exit_code == t1.exit_code && a.exit_code == t4.exit_code,
             name + ": exit code differs");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"sphere-xyz-relations-and-loop-counts", sphere_example},
      {"antiprism-chi-grading-and-report", antiprism_example},
      {"equivalence-hex1-conifold-badTorus", equivalence},
      {"random-tori-condition-z-vs-lp", random_agreement},
      {"cover-transfer", cover_transfer},
      {"matching-facts", matching_facts},
      {"isoradial-closure-radius-3", isoradial_closure},
      {"report-determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name;
    if (!c.why.str().empty()) std::cout << ": " << c.why.str();
    std::cout << std::endl;
    failed += !c.ok;
  }
  return failed == 0 ? 0 : 1;
}
