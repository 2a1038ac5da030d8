#include <gtest/gtest.h>

#include "qpoly/grading.hpp"
#include "qpoly/rewriting.hpp"
#include "support.hpp"

using namespace qpoly;
using namespace testing_support;

namespace {

const std::vector<std::pair<std::string, std::string>> hex1_relations{{"yz", "zy"}, {"zx", "xz"}, {"xy", "yx"}};
const std::vector<std::pair<std::string, std::string>> xyz_relations{{"xx", "yz"}, {"yy", "zx"}, {"zz", "xy"}};

std::size_t monomials(std::size_t n) { return (n + 1) * (n + 2) / 2; }

}  // namespace

TEST(Enumerate, Hex1SmallBounds) {
  auto qp = load("hex1").qp;
  auto r = uniform(qp, Rational(2, 3));
  auto p = enumerate_paths(qp, r, Rational(2, 3));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_TRUE(p[0].arrows.empty());
  std::set<std::string> ids;
  for (std::size_t i = 1; i < p.size(); ++i) ids.insert(format_path(qp, p[i]));
  EXPECT_EQ(ids, (std::set<std::string>{"x", "y", "z"}));
  EXPECT_EQ(enumerate_paths(qp, r, Rational(4, 3)).size(), 1u + 3u + 9u);
}

TEST(Enumerate, ConifoldPerVertexPair) {
  auto qp = load("conifold").qp;
  auto r = uniform(qp, Rational(1, 2));
  auto paths = enumerate_paths(qp, r, 1);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, int> count;
  for (const auto& p : paths) ++count[{head(qp, p), tail(qp, p), p.arrows.size()}];
  EXPECT_EQ((count[{1, 0, 1}]), 2);
  EXPECT_EQ((count[{0, 1, 1}]), 2);
  EXPECT_EQ((count[{0, 0, 2}]), 4);
  EXPECT_EQ((count[{1, 1, 2}]), 4);
  EXPECT_EQ((count[{0, 0, 0}]), 1);
  EXPECT_EQ(paths.size(), 2u + 4u + 8u);
}

TEST(Enumerate, CeilingThrows) {
  auto qp = load("hex1").qp;
  RewriteOptions opt;
  opt.max_paths = 100;
  EXPECT_THROW(enumerate_paths(qp, uniform(qp, Rational(2, 3)), 4, opt), ResourceLimit);
  EXPECT_THROW(equivalence_classes(qp, uniform(qp, Rational(2, 3)), -1), ArgumentError);
}

TEST(Classes, Hex1LengthTwoLoops) {
  auto qp = load("hex1").qp;
  EquivClasses c(qp, uniform(qp, Rational(2, 3)), 2);
  EXPECT_EQ(c.count_classes(0, 0, Rational(4, 3)), 6u);
  EXPECT_EQ(c.count_paths(0, 0, Rational(4, 3)), 9u);
}

TEST(Classes, SphereXYZLengthTwoLoops) {
  auto qp = load("sphereXYZ").qp;
  EquivClasses c(qp, uniform(qp, Rational(2, 3)), 2);
  EXPECT_EQ(c.count_classes(0, 0, Rational(4, 3)), 6u);
  EXPECT_EQ(word_classes("xyz", 2, xyz_relations), 6u);
}

// Loop classes of length n against the naive word closure and the
// commutative monomial count.
TEST(Classes, LoopCountsMatchMonomials) {
  for (auto name : {"hex1", "sphereXYZ"}) {
    auto qp = load(name).qp;
    EquivClasses c(qp, uniform(qp, Rational(2, 3)), 4);
    const auto& rel = std::string(name) == "hex1" ? hex1_relations : xyz_relations;
    for (std::size_t n = 0; n <= 6; ++n) {
      Rational deg = Rational(2 * static_cast<long long>(n), 3);
      EXPECT_EQ(c.count_classes(0, 0, deg), word_classes("xyz", n, rel)) << name << " n=" << n;
      EXPECT_EQ(c.count_classes(0, 0, deg), monomials(n)) << name << " n=" << n;
    }
  }
}

TEST(Classes, InvariantsOfEveryClass) {
  for (auto name : {"hex1", "conifold", "hex3", "badTorus", "antiprism"}) {
    auto qp = load(name).qp;
    auto g = find_grading(qp);
    EquivClasses c(qp, g->charge, 3);
    for (const auto& members : c.partition()) {
      ASSERT_FALSE(members.empty());
      Path first = c.path(members.front());
      for (auto id : members) {
        Path p = c.path(id);
        EXPECT_EQ(head(qp, p), head(qp, first));
        EXPECT_EQ(tail(qp, p), tail(qp, first));
        EXPECT_EQ(c.degree(p), c.degree(first));
      }
    }
  }
}

TEST(Classes, ShuffledRelationOrderGivesSamePartition) {
  for (auto name : {"hex1", "conifold", "sphereXYZ", "badTorus", "hex3"}) {
    auto qp = load(name).qp;
    auto g = find_grading(qp);
    EquivClasses base(qp, g->charge, 3);
    for (std::uint64_t seed : {1u, 7u, 99u}) {
      RewriteOptions opt;
      opt.shuffle_seed = seed;
      EquivClasses other(qp, g->charge, 3, opt);
      EXPECT_EQ(other.class_count(), base.class_count()) << name;
      auto a = base.partition(), b = other.partition();
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b) << name;
    }
  }
}

TEST(PathsEqual, Examples) {
  auto qp = load("hex1").qp;
  auto r = uniform(qp, Rational(2, 3));
  EXPECT_EQ(paths_equal(qp, r, parse_path(qp, "x*y"), parse_path(qp, "y*x"), 2), PathComparison::equal);
  EXPECT_EQ(paths_equal(qp, r, parse_path(qp, "x*y"), parse_path(qp, "x*z"), 2), PathComparison::distinct);
  EXPECT_EQ(paths_equal(qp, r, parse_path(qp, "x*y"), parse_path(qp, "y*x"), 1), PathComparison::bound_too_small);
  EXPECT_EQ(paths_equal(qp, r, parse_path(qp, "x"), parse_path(qp, "y*x"), 2), PathComparison::distinct);
  EXPECT_EQ(to_string(PathComparison::distinct), "distinct-within-bound");

  auto f3 = load("sphereXYZ").qp;
  EXPECT_EQ(paths_equal(f3, uniform(f3, Rational(2, 3)), parse_path(f3, "x*x"), parse_path(f3, "y*z"), 2),
            PathComparison::equal);

  auto f2 = load("conifold").qp;
  EXPECT_THROW(paths_equal(f2, uniform(f2, Rational(1, 2)), parse_path(f2, "a1"), parse_path(f2, "b1"), 2),
               ArgumentError);
}

TEST(Ell, Representatives) {
  auto qp = load("hex1").qp;
  auto e = ell(qp);
  ASSERT_EQ(e.representatives.size(), 1u);
  EXPECT_EQ(format_path(qp, e.representatives[0]), "x*y*z");

  auto f2 = load("conifold").qp;
  auto e2 = ell(f2);
  for (std::size_t v = 0; v < 2; ++v) {
    EXPECT_EQ(head(f2, e2.representatives[v]), v);
    EXPECT_EQ(tail(f2, e2.representatives[v]), v);
    EXPECT_EQ(e2.representatives[v].arrows.size(), 4u);
  }
  EXPECT_EQ(format_path(f2, e2.representatives[0]), "b1*a2*b2*a1");

  auto f3 = load("sphereXYZ").qp;
  EXPECT_EQ(format_path(f3, ell(f3).representatives[0]), "x*x*x");
}

TEST(Ell, CentralOnCorpus) {
  for (auto name : {"hex1", "conifold", "sphereXYZ", "antiprism", "hex3", "badTorus"}) {
    auto qp = load(name).qp;
    auto g = find_grading(qp);
    EXPECT_TRUE(verify_central(qp, g->charge)) << name;
  }
  auto qp = load("hex1").qp;
  EXPECT_THROW(verify_central(qp, uniform(qp, Rational(2, 3)), Rational(1)), ArgumentError);
}

TEST(Ell, SphereXYZCubeEqualsCycle) {
  auto qp = load("sphereXYZ").qp;
  EXPECT_EQ(paths_equal(qp, uniform(qp, Rational(2, 3)), parse_path(qp, "x*x*x"), parse_path(qp, "x*y*z"), 2),
            PathComparison::equal);
}

TEST(Cancellation, HoldsOnDomains) {
  for (auto name : {"hex1", "sphereXYZ"}) {
    auto qp = load(name).qp;
    auto v = cancellation_check(qp, uniform(qp, Rational(2, 3)), 4);
    EXPECT_TRUE(v.holds) << name;
    EXPECT_FALSE(v.counterexample);
  }
}

TEST(Cancellation, BadTorusCounterexample) {
  auto qp = load("badTorus").qp;
  auto g = find_grading(qp);
  auto v = cancellation_check(qp, g->charge, 6);
  ASSERT_FALSE(v.holds);
  const auto& c = *v.counterexample;
  EXPECT_EQ(c.degree, 1);
  // the pair really is distinct, and really becomes equal after the arrow
  Path a = make_path(qp, {c.arrow});
  bool right = c.side == CancellationCounterexample::Side::right;
  Path pa = right ? concat(qp, c.p, a) : concat(qp, a, c.p);
  Path qa = right ? concat(qp, c.q, a) : concat(qp, a, c.q);
  EquivClasses cls(qp, g->charge, 2);
  EXPECT_NE(cls.class_of(c.p), cls.class_of(c.q));
  EXPECT_EQ(cls.class_of(pa), cls.class_of(qa));
  EXPECT_EQ(format_path(qp, c.p), "a2*a3");
  EXPECT_EQ(format_path(qp, c.q), "a3*a2");
}

// Small bounds must report the same first counterexample as large ones.
TEST(Cancellation, CounterexampleIndependentOfBound) {
  auto qp = load("badTorus").qp;
  auto g = find_grading(qp);
  auto small = cancellation_check(qp, g->charge, 1);
  auto large = cancellation_check(qp, g->charge, 5);
  ASSERT_FALSE(small.holds);
  ASSERT_FALSE(large.holds);
  EXPECT_EQ(small.counterexample->p.arrows, large.counterexample->p.arrows);
  EXPECT_EQ(small.counterexample->q.arrows, large.counterexample->q.arrows);
  EXPECT_EQ(small.counterexample->arrow, large.counterexample->arrow);
  EXPECT_TRUE(cancellation_check(qp, g->charge, Rational(1, 2)).holds);
}
