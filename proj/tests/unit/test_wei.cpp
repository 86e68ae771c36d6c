#include <gtest/gtest.h>

#include <set>

#include "oligo/wei.hpp"
#include "oracles.hpp"

using namespace oligo;

namespace {

std::set<Tuple> as_set(const std::vector<Tuple>& v) { return {v.begin(), v.end()}; }

std::vector<Tuple> tuples_of(std::size_t n, std::size_t len) {
  std::vector<Tuple> out;
  detail::all_tuples(n, len, out);
  return out;
}

}  // namespace

TEST(Wei, AlternationMatchesLiteralOracle) {
  for (const auto& [spec, level] : std::vector<std::pair<StructureSpec, int>>{{make_spec(Kind::equivalence, 2), 1},
                                                                              {make_spec(Kind::pure_set), 2},
                                                                              {make_spec(Kind::dlo), 2},
                                                                              {make_spec(Kind::random_graph), 1},
                                                                              {make_spec(Kind::vector_space, 2), 1}}) {
    Window w = build_window(spec, level);
    ClosureLattice lat = build_lattice(w, 1);
    for (const auto& a : lat.nodes)
      for (const auto& b : lat.nodes)
        for (const auto& c : tuples_of(w.n, 1)) {
          auto alt = as_set(alternation_orbit(w, a, b, c));
          EXPECT_EQ(alt, oracle::literal_alternation(w, a.points, b.points, c)) << spec.name();
        }
  }
}

TEST(Wei, AlternationIsSoundAndSymmetric) {
  for (const auto& e : catalog()) {
    if (e.spec.kind == Kind::vector_space && e.spec.param > 2) continue;
    Window w = build_window(e.spec, 1);
    ClosureLattice lat = build_lattice(w, 1);
    for (const auto& a : lat.nodes)
      for (const auto& b : lat.nodes) {
        std::vector<Point> ab;
        std::set_intersection(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(), std::back_inserter(ab));
        for (const auto& c : tuples_of(w.n, 2)) {
          if (c[0] > 2) continue;
          auto alt = alternation_orbit(w, a, b, c);
          auto ref = as_set(reference_orbit(w, ab, c));
          for (const auto& t : alt) EXPECT_TRUE(ref.count(t)) << e.spec.name();
          EXPECT_EQ(as_set(alt), as_set(alternation_orbit(w, b, a, c)));
        }
      }
  }
}

TEST(Wei, AlternationIsMonotoneInTheWindow) {
  for (const auto& spec : {make_spec(Kind::equivalence, 2), make_spec(Kind::pure_set), make_spec(Kind::random_graph),
                           make_spec(Kind::henson, 3)}) {
    Window w1 = build_window(spec, 1), w2 = build_window(spec, 2);
    auto m = window_embedding(spec, 1, 2, w1.n);
    auto lift = [&](const std::vector<Point>& v) {
      std::vector<Point> r;
      for (Point p : v) r.push_back(m[p]);
      return r;
    };
    ClosureLattice lat = build_lattice(w1, 1);
    for (const auto& a : lat.nodes)
      for (const auto& b : lat.nodes)
        for (const auto& c : tuples_of(w1.n, 1)) {
          ClosedSet a2 = acl(w2, lift(a.points)), b2 = acl(w2, lift(b.points));
          auto big = as_set(alternation_orbit(w2, a2, b2, lift(c)));
          for (const auto& t : alternation_orbit(w1, a, b, c)) EXPECT_TRUE(big.count(lift(t))) << spec.name();
        }
  }
}

TEST(Wei, PureSetAlternationIsFull) {
  for (int level = 0; level <= 3; ++level) {
    Window w = build_window(make_spec(Kind::pure_set), level);
    ClosureLattice lat = build_lattice(w, 1);
    for (const auto& a : lat.nodes)
      for (const auto& b : lat.nodes) {
        std::vector<Point> ab;
        std::set_intersection(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(), std::back_inserter(ab));
        // if A and B cover the window, the two fixers have disjoint supports and only commute
        if (a.points.size() + b.points.size() - ab.size() == w.n) continue;
        for (std::size_t len = 1; len <= 2; ++len)
          for (const auto& c : tuples_of(w.n, len))
            EXPECT_EQ(as_set(alternation_orbit(w, a, b, c)), as_set(reference_orbit(w, ab, c)));
      }
  }
}

TEST(Wei, EquivalenceFailsWithSameClassWitness) {
  WeiParams p;
  p.level = 1;
  WeiVerdict v = wei_check(make_spec(Kind::equivalence, 2), p);
  ASSERT_TRUE(v.fail);
  ASSERT_TRUE(v.witness.has_value());
  Window w = build_window(make_spec(Kind::equivalence, 2), 1);
  const auto& x = *v.witness;
  ASSERT_EQ(x.A.points.size(), 1u);
  ASSERT_EQ(x.B.points.size(), 1u);
  EXPECT_EQ(w.col(x.A.points[0], x.B.points[0]), 0);  // same class
  EXPECT_LT(x.alternation_orbit.size(), x.reference_orbit.size());
  EXPECT_EQ(as_set(x.alternation_orbit), oracle::literal_alternation(w, x.A.points, x.B.points, x.tuple));
}

TEST(Wei, ConsistentOnSmallKinds) {
  for (const auto& spec : {make_spec(Kind::pure_set), make_spec(Kind::dlo), make_spec(Kind::henson, 3)}) {
    WeiVerdict v = wei_check(spec, {});
    EXPECT_FALSE(v.fail) << spec.name();
    EXPECT_GT(v.pairs_tested, 0u);
  }
}

TEST(Wei, ThreadCountDoesNotChangeTheVerdict) {
  WeiParams p;
  p.level = 2;
  WeiVerdict a = wei_check(make_spec(Kind::equivalence, 2), p, 1);
  WeiVerdict b = wei_check(make_spec(Kind::equivalence, 2), p, 3);
  ASSERT_TRUE(a.fail && b.fail);
  EXPECT_EQ(a.witness->A, b.witness->A);
  EXPECT_EQ(a.witness->B, b.witness->B);
  EXPECT_EQ(a.witness->tuple, b.witness->tuple);
}

TEST(Wei, RejectsBadInput) {
  EXPECT_THROW(wei_check(make_spec(Kind::pure_set), {0, 2, 2}), std::invalid_argument);
  FiniteStructure fs;
  fs.domain_size = 2;
  EXPECT_THROW(wei_check(make_finite_spec(fs), {}), std::invalid_argument);
  Budget b(10);
  EXPECT_THROW(wei_check(make_spec(Kind::colored_graph, 3), {}, 1, &b), BudgetExceeded);
}
