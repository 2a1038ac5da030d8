#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qpoly/consistency.hpp"
#include "qpoly/covers.hpp"
#include "qpoly/grading.hpp"
#include "qpoly/random.hpp"
#include "support.hpp"

using namespace qpoly;
using namespace testing_support;

namespace {

std::set<std::set<std::string>> ids(const QuiverPolyhedron& qp, const std::vector<PerfectMatching>& ms) {
  std::set<std::set<std::string>> out;
  for (const auto& m : ms) {
    std::set<std::string> s;
    for (auto a : m.arrows) s.insert(qp.arrows[a].id);
    out.insert(s);
  }
  return out;
}

std::set<std::string> ids(const QuiverPolyhedron& qp, const PerfectMatching& m) {
  std::set<std::string> s;
  for (auto a : m.arrows) s.insert(qp.arrows[a].id);
  return s;
}

IsoradialEmbedding embed(const QuiverPolyhedron& qp, double r, int radius = 2) {
  return isoradial_embedding(qp, std::vector<double>(qp.arrows.size(), r), radius);
}

}  // namespace

TEST(RCharge, LinearProgram) {
  auto f1 = load("hex1").qp;
  EXPECT_EQ(find_consistent_rcharge(f1), uniform(f1, Rational(2, 3)));
  auto f2 = load("conifold").qp;
  EXPECT_EQ(find_consistent_rcharge(f2), uniform(f2, Rational(1, 2)));
  EXPECT_FALSE(find_consistent_rcharge(load("badTorus").qp));
  auto h3 = load("hex3").qp;
  auto r3 = find_consistent_rcharge(h3);
  ASSERT_TRUE(r3);
  EXPECT_TRUE(is_consistent_rcharge(h3, *r3));
}

TEST(RCharge, IsConsistentRejects) {
  auto f1 = load("hex1").qp;
  EXPECT_TRUE(is_consistent_rcharge(f1, {Rational(1, 2), Rational(3, 4), Rational(3, 4)}));
  EXPECT_FALSE(is_consistent_rcharge(f1, uniform(f1, Rational(1, 2))));
  auto f2 = load("conifold").qp;
  auto skew = uniform(f2, Rational(1, 2));
  skew[0] = Rational(1, 3);
  skew[1] = Rational(2, 3);
  EXPECT_TRUE(is_grading(f2, skew));
  EXPECT_TRUE(is_consistent_rcharge(f2, skew));
  // both faces hold all four arrows, so only the face sum matters here
  EXPECT_FALSE(is_consistent_rcharge(f2, uniform(f2, Rational(1, 3))));
  // a grading of face degree 2 that breaks the vertex condition
  auto f5 = load("badTorus").qp;
  EXPECT_TRUE(is_grading(f5, uniform(f5, Rational(1, 2))));
  EXPECT_FALSE(is_consistent_rcharge(f5, uniform(f5, Rational(1, 2))));
}

TEST(RCharge, FromZigzags) {
  auto f1 = load("hex1").qp;
  auto z1 = rcharge_from_zigzag(f1);
  EXPECT_TRUE(z1.faces_close);
  EXPECT_TRUE(z1.vertices_close);
  for (double c : z1.charge) EXPECT_NEAR(c, 2.0 / 3, 1e-12);
  auto f2 = load("conifold").qp;
  for (double c : rcharge_from_zigzag(f2).charge) EXPECT_NEAR(c, 0.5, 1e-12);
  EXPECT_THROW(rcharge_from_zigzag(load("badTorus").qp), ConsistencyViolation);
}

TEST(RCharge, ZigzagChargesSatisfyLinearConditions) {
  auto h3 = load("hex3").qp;
  auto z = rcharge_from_zigzag(h3);
  auto inc = build_incidence(h3);
  for (Sign s : {Sign::plus, Sign::minus})
    for (const auto& f : h3.faces(s)) {
      double sum = 0;
      for (auto a : f.cycle) sum += z.charge[a];
      EXPECT_NEAR(sum, 2, 1e-12);
    }
}

// Condition Z and the linear program agree on random tori.
TEST(RCharge, AgreesWithConditionZOnRandomTori) {
  std::mt19937_64 rng(404);
  RandomPolyhedronOptions opt;
  opt.genus = 1;
  int pass = 0, fail = 0;
  for (int k = 0; k < 80; ++k) {
    auto qp = random_polyhedron(rng, opt);
    ASSERT_TRUE(qp);
    bool z = condition_z(*qp).passes;
    auto lp = find_consistent_rcharge(*qp);
    EXPECT_EQ(z, lp.has_value());
    if (z) {
      ++pass;
      EXPECT_TRUE(is_consistent_rcharge(*qp, *lp));
      auto zc = rcharge_from_zigzag(*qp);
      EXPECT_TRUE(zc.faces_close);
      EXPECT_TRUE(zc.vertices_close);
    } else {
      ++fail;
    }
  }
  EXPECT_GT(pass, 0);
  EXPECT_GT(fail, 0);
}

TEST(Isoradial, ClosesOnRegularTilings) {
  auto f1 = embed(load("hex1").qp, 2.0 / 3, 3);
  EXPECT_LT(f1.residual, 1e-9);
  auto f2 = embed(load("conifold").qp, 0.5, 3);
  EXPECT_LT(f2.residual, 1e-9);
  // all arcs of hex1 span a third of the circle
  auto qp = load("hex1").qp;
  const auto& p = f1.base_face({Sign::plus, 0});
  for (std::size_t i = 0; i < 3; ++i) {
    Point u = p.head[i] - p.center, v = p.head[(i + 1) % 3] - p.center;
    double cosang = (u.x * v.x + u.y * v.y) / (norm(u) * norm(v));
    EXPECT_NEAR(cosang, -0.5, 1e-12);
  }
}

TEST(Isoradial, Failures) {
  auto qp = load("hex1").qp;
  EXPECT_THROW(isoradial_embedding(qp, {0.7, 0.7, 0.7}, 2), GeometryError);
  EXPECT_THROW(isoradial_embedding(qp, {0.0, 1.0, 1.0}, 2), ArgumentError);
  EXPECT_THROW(isoradial_embedding(load("antiprism").qp, std::vector<double>(16, 0.5), 1), UnsupportedTopology);
  auto soft = isoradial_embedding(qp, {0.7, 0.7, 0.7}, 1, 1e-9, false);
  EXPECT_GT(soft.residual, 1e-3);
  EXPECT_FALSE(soft.worst.empty());
}

TEST(Isoradial, Hex3WithLinearProgramCharges) {
  auto qp = load("hex3").qp;
  auto emb = isoradial_embedding(qp, to_doubles(*find_consistent_rcharge(qp)), 2);
  EXPECT_LT(emb.residual, 1e-9);
}

TEST(Matchings, AgreeWithSubsetOracle) {
  for (auto name : {"hex1", "conifold", "sphereXYZ", "badTorus", "hex3", "antiprism", "ungraded"}) {
    auto qp = load(name).qp;
    EXPECT_EQ(ids(qp, enumerate_perfect_matchings(qp)), matchings_by_subsets(qp)) << name;
  }
}

TEST(Matchings, Examples) {
  auto f1 = load("hex1").qp;
  EXPECT_EQ(ids(f1, enumerate_perfect_matchings(f1)), (std::set<std::set<std::string>>{{"x"}, {"y"}, {"z"}}));
  auto f2 = load("conifold").qp;
  EXPECT_EQ(ids(f2, enumerate_perfect_matchings(f2)),
            (std::set<std::set<std::string>>{{"a1"}, {"a2"}, {"b1"}, {"b2"}}));
  // regression value: every face of the weighted sphere is the same loop set
  EXPECT_EQ(enumerate_perfect_matchings(load("sphereXYZ").qp).size(), 0u);
}

TEST(Matchings, RandomAgreeWithSubsetOracle) {
  std::mt19937_64 rng(12);
  RandomPolyhedronOptions opt;
  for (int k = 0; k < 60; ++k) {
    auto qp = random_polyhedron(rng, opt);
    ASSERT_TRUE(qp);
    auto ms = enumerate_perfect_matchings(*qp);
    EXPECT_EQ(ids(*qp, ms), matchings_by_subsets(*qp));
    for (const auto& m : ms) EXPECT_TRUE(is_perfect_matching(*qp, m.arrows));
  }
}

TEST(Matchings, Polygons) {
  auto p1 = matching_polygon(load("hex1").qp);
  EXPECT_EQ(p1.hull.size(), 3u);
  EXPECT_EQ(p1.twice_area, 1);
  auto p2 = matching_polygon(load("conifold").qp);
  EXPECT_EQ(p2.hull.size(), 4u);
  EXPECT_EQ(p2.twice_area, 2);
  // parallelogram: opposite edges are equal
  const auto& h = p2.hull;
  EXPECT_EQ(sub(h[1], h[0]), sub(h[2], h[3]));
  EXPECT_THROW(matching_polygon(load("antiprism").qp), UnsupportedTopology);
}

// Changing the reference matching shifts every class by the same vector.
TEST(Matchings, ReferenceInvariance) {
  for (auto name : {"hex1", "conifold", "hex3"}) {
    auto qp = load(name).qp;
    auto h = homology(qp);
    auto ms = enumerate_perfect_matchings(qp);
    for (const auto& ref : ms) {
      std::vector<IntVec> shifted;
      for (const auto& m : ms) {
        std::vector<long long> f(qp.arrows.size(), 0);
        for (auto a : m.arrows) f[a] += 1;
        for (auto a : ref.arrows) f[a] -= 1;
        shifted.push_back(cocycle_class(qp, h, f));
      }
      for (std::size_t i = 0; i < ms.size(); ++i)
        EXPECT_EQ(sub(shifted[i], ms[i].homology), sub(shifted[0], ms[0].homology)) << name;
    }
  }
}

TEST(MatchingDegree, Examples) {
  auto qp = load("hex1").qp;
  PerfectMatching x{{arrow(qp, "x")}, {}};
  EXPECT_EQ(matching_degree(parse_path(qp, "x*y*z"), x), 1u);
  EXPECT_EQ(matching_degree(parse_path(qp, "y*z"), x), 0u);
  EXPECT_EQ(matching_degree(parse_path(qp, "x*x*y"), x), 2u);
}

TEST(MatchingDegree, AdditiveAndEllHasDegreeOne) {
  std::mt19937_64 rng(3);
  for (auto name : {"hex1", "conifold", "hex3", "badTorus", "antiprism"}) {
    auto qp = load(name).qp;
    auto ms = enumerate_perfect_matchings(qp);
    auto e = ell(qp);
    for (const auto& m : ms)
      for (const auto& rep : e.representatives) EXPECT_EQ(matching_degree(rep, m), 1u) << name;
    auto g = find_grading(qp);
    auto paths = enumerate_paths(qp, g->charge, 2);
    for (int k = 0; k < 200; ++k) {
      const auto& p = paths[rng() % paths.size()];
      const auto& q = paths[rng() % paths.size()];
      if (tail(qp, p) != head(qp, q)) continue;
      auto pq = concat(qp, p, q);
      for (const auto& m : ms) EXPECT_EQ(matching_degree(pq, m), matching_degree(p, m) + matching_degree(q, m));
    }
  }
}

TEST(BoundaryMatching, SampledDirectionsArePerfect) {
  for (auto [name, r] : {std::pair{"hex1", 2.0 / 3}, std::pair{"conifold", 0.5}}) {
    auto qp = load(name).qp;
    auto emb = embed(qp, r);
    for (int k = 0; k < 36; ++k) {
      double theta = 2 * std::numbers::pi * k / 36 + 0.0137;
      auto b = boundary_matching(qp, emb, theta);
      EXPECT_TRUE(is_perfect_matching(qp, b.plus.arrows));
      EXPECT_TRUE(is_perfect_matching(qp, b.minus.arrows));
      // the same matching is read off negative faces in the opposite direction
      EXPECT_EQ(negative_face_selection(qp, emb, theta).arrows, b.plus.arrows) << name << " k=" << k;
    }
  }
}

TEST(BoundaryMatching, BisectorOfArcSelectsThatArrow) {
  auto qp = load("hex1").qp;
  auto emb = embed(qp, 2.0 / 3);
  const auto& p = emb.base_face({Sign::plus, 0});
  const auto& cycle = qp.faces_plus[0].cycle;
  for (std::size_t i = 0; i < 3; ++i) {
    Point h = p.head[i] - p.center, t = p.head[(i + 1) % 3] - p.center;
    Point mid = (1 / norm(h)) * h + (1 / norm(t)) * t;
    auto b = boundary_matching(qp, emb, std::atan2(mid.y, mid.x));
    EXPECT_EQ(b.plus.arrows, std::vector<std::size_t>{cycle[i]});
  }
}

TEST(BoundaryMatching, DegenerateDirectionRejected) {
  auto qp = load("hex1").qp;
  auto emb = embed(qp, 2.0 / 3);
  const auto& p = emb.base_face({Sign::plus, 0});
  Point v = p.head[0] - p.center;
  EXPECT_THROW(boundary_matching(qp, emb, std::atan2(v.y, v.x)), GeometryError);
}

// Just anticlockwise of the zigzag direction the matching contains the odd
// arrows of the path, just clockwise the even ones.
TEST(BoundaryMatching, ZigzagContainment) {
  for (auto [name, r] : {std::pair{"hex1", 2.0 / 3}, std::pair{"conifold", 0.5}}) {
    auto qp = load(name).qp;
    auto emb = embed(qp, r);
    for (const auto& z : zigzag_paths(qp)) {
      double eps = zigzag_epsilon(qp, emb, z);
      auto after = boundary_matching(qp, emb, eps + 1e-6);
      auto before = boundary_matching(qp, emb, eps - 1e-6);
      for (std::size_t i = 0; i < z.period.size(); ++i) {
        if (i % 2)
          EXPECT_TRUE(after.plus.contains(z.period[i])) << name;
        else
          EXPECT_TRUE(before.plus.contains(z.period[i])) << name;
      }
    }
  }
}

// Loops with opposite nonzero classes are never both avoided by a matching.
TEST(Matchings, OppositeLoopsMeetEveryMatching) {
  for (auto name : {"hex1", "conifold", "hex3"}) {
    auto qp = load(name).qp;
    auto h = homology(qp);
    auto g = find_grading(qp);
    auto ms = enumerate_perfect_matchings(qp);
    std::map<IntVec, std::vector<Path>> loops;
    for (auto& p : enumerate_paths(qp, g->charge, 4))
      if (head(qp, p) == tail(qp, p)) loops[path_class(h, p)].push_back(p);
    std::size_t pairs = 0;
    for (const auto& [c, ps] : loops) {
      if (is_zero(c)) continue;
      auto it = loops.find(scale(c, -1));
      if (it == loops.end()) continue;
      for (const auto& p : ps)
        for (const auto& q : it->second)
          for (const auto& m : ms) {
            ++pairs;
            EXPECT_GT(matching_degree(p, m) + matching_degree(q, m), 0u) << name;
          }
    }
    EXPECT_GT(pairs, 0u) << name;
  }
}

// Paths with the same lifted endpoints and degree are equivalent.
TEST(Classes, HomotopicPathsOfEqualDegreeAreEqual) {
  for (auto name : {"hex1", "conifold"}) {
    auto qp = load(name).qp;
    auto h = homology(qp);
    auto g = find_grading(qp);
    ASSERT_TRUE(cancellation_check(qp, g->charge, 4).holds);
    EquivClasses c(qp, g->charge, 4);
    std::map<std::tuple<std::size_t, std::size_t, IntVec, Rational>, std::set<std::size_t>> groups;
    for (std::size_t id = 0; id < c.path_count(); ++id) {
      Path p = c.path(id);
      groups[{head(qp, p), tail(qp, p), path_class(h, p), c.degree(p)}].insert(c.class_of(p));
    }
    for (const auto& [k, cls] : groups) EXPECT_EQ(cls.size(), 1u) << name;
  }
  // on the bad torus the same grouping merges distinct classes
  auto qp = load("badTorus").qp;
  auto h = homology(qp);
  auto g = find_grading(qp);
  EquivClasses c(qp, g->charge, 2);
  bool split = false;
  std::map<std::tuple<std::size_t, std::size_t, IntVec, Rational>, std::set<std::size_t>> groups;
  for (std::size_t id = 0; id < c.path_count(); ++id) {
    Path p = c.path(id);
    groups[{head(qp, p), tail(qp, p), path_class(h, p), c.degree(p)}].insert(c.class_of(p));
  }
  for (const auto& [k, cls] : groups) split = split || cls.size() > 1;
  EXPECT_TRUE(split);
}

TEST(Algebraic, Examples) {
  auto f1 = load("hex1").qp;
  auto v1 = algebraic_consistency_check(f1, uniform(f1, Rational(2, 3)), 1);
  EXPECT_TRUE(v1.consistent_evidence) << v1.reason;
  EXPECT_EQ(v1.pairs_checked, 81u);
  auto f2 = load("conifold").qp;
  auto v2 = algebraic_consistency_check(f2, uniform(f2, Rational(1, 2)), 1);
  EXPECT_TRUE(v2.consistent_evidence) << v2.reason;
  auto f5 = load("badTorus").qp;
  auto v5 = algebraic_consistency_check(f5, find_grading(f5)->charge, 1);
  EXPECT_FALSE(v5.consistent_evidence);
  EXPECT_EQ(v5.reason, "cancellation fails");
  EXPECT_TRUE(v5.counterexample);
  EXPECT_THROW(algebraic_consistency_check(f1, uniform(f1, Rational(2, 3)), -1), ArgumentError);
  EXPECT_THROW(algebraic_consistency_check(load("antiprism").qp, uniform(load("antiprism").qp, 1), 1),
               UnsupportedTopology);
}

TEST(Algebraic, SmallFixedBoundLeavesPairsUnwitnessed) {
  auto f1 = load("hex1").qp;
  auto v = algebraic_consistency_check(f1, uniform(f1, Rational(2, 3)), 1, Rational(2, 3));
  EXPECT_FALSE(v.consistent_evidence);
  ASSERT_TRUE(v.unwitnessed);
  EXPECT_NE(v.reason.find("no matching-avoiding path"), std::string::npos);
}

TEST(Parallel, ThreadCountDoesNotChangeResults) {
  auto qp = load("hex3").qp;
  auto g = find_grading(qp)->charge;
  auto bad = load("badTorus").qp;
  set_thread_count(1);
  auto a1 = algebraic_consistency_check(qp, g, 1);
  auto z1 = condition_z(bad);
  set_thread_count(4);
  auto a4 = algebraic_consistency_check(qp, g, 1);
  auto z4 = condition_z(bad);
  set_thread_count(0);
  EXPECT_EQ(a1.consistent_evidence, a4.consistent_evidence);
  EXPECT_EQ(a1.reason, a4.reason);
  EXPECT_EQ(z1.certificate->arrow, z4.certificate->arrow);
  EXPECT_EQ(z1.certificate->i, z4.certificate->i);
  EXPECT_EQ(z1.certificate->offset, z4.certificate->offset);
}
