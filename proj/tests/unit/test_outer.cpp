#include <gtest/gtest.h>

#include <set>

#include "oligo/outer.hpp"

using namespace oligo;

namespace {

std::vector<StructureSpec> relational_kinds() {
  return {make_spec(Kind::pure_set),         make_spec(Kind::dlo),              make_spec(Kind::random_graph),
          make_spec(Kind::henson, 3),        make_spec(Kind::colored_graph, 2), make_spec(Kind::colored_graph, 3),
          make_spec(Kind::equivalence, 2)};
}

std::set<std::vector<Point>> accepted_set(const OuterResult& r) {
  std::set<std::vector<Point>> s;
  for (const auto& p : r.accepted) s.insert(p.images());
  return s;
}

}  // namespace

TEST(Outer, AcceptedSigmasFormAGroup) {
  for (const auto& s : relational_kinds()) {
    OuterResult r = outer_group(s, 5);
    auto acc = accepted_set(r);
    EXPECT_EQ(BigInt(acc.size()), r.group.order()) << s.name();
    for (const auto& a : r.accepted) {
      EXPECT_TRUE(acc.count(a.inverse().images()));
      for (const auto& b : r.accepted) EXPECT_TRUE(acc.count((a * b).images())) << s.name();
    }
  }
}

TEST(Outer, StableInAgeSize) {
  for (const auto& s : relational_kinds())
    for (int k = 3; k < 5; ++k) EXPECT_EQ(accepted_set(outer_group(s, k)), accepted_set(outer_group(s, k + 1))) << s.name();
}

TEST(Outer, ExpectedOrders) {
  EXPECT_EQ(outer_group(make_spec(Kind::dlo), 5).group.order(), BigInt(2));
  EXPECT_EQ(outer_group(make_spec(Kind::random_graph), 5).group.order(), BigInt(2));
  EXPECT_EQ(outer_group(make_spec(Kind::colored_graph, 2), 5).group.order(), BigInt(2));
  EXPECT_EQ(outer_group(make_spec(Kind::colored_graph, 3), 5).group.order(), BigInt(6));
  EXPECT_EQ(outer_group(make_spec(Kind::henson, 3), 5).group.order(), BigInt(1));
  EXPECT_EQ(outer_group(make_spec(Kind::pure_set), 5).group.order(), BigInt(1));
  auto h = outer_group(make_spec(Kind::henson, 3), 5);
  ASSERT_EQ(h.rejected.size(), 1u);
  EXPECT_FALSE(h.rejected[0].second.empty());
}

TEST(Outer, RealizedBijectionsInduceSigma) {
  for (const auto& s : relational_kinds()) {
    if (s.kind == Kind::pure_set) continue;
    for (int level = 1; level <= 2; ++level) {
      Window w = build_window(s, level);
      for (const auto& sigma : outer_group(s, 5).accepted) {
        auto pi = realize_outer(w, sigma);
        if (sigma.is_identity()) EXPECT_TRUE(pi.has_value());
        if (!pi) continue;
        for (Point a = 0; a < static_cast<Point>(w.n); ++a)
          for (Point b = 0; b < static_cast<Point>(w.n); ++b)
            if (a != b) EXPECT_EQ(w.col((*pi)(a), (*pi)(b)), sigma(w.col(a, b))) << s.name();
      }
    }
  }
  // any finite chain is isomorphic to its reverse
  Window w = build_window(make_spec(Kind::dlo), 3);
  auto pi = realize_outer(w, Permutation::parse_cycles(2, "(0 1)"));
  ASSERT_TRUE(pi.has_value());
  EXPECT_THROW(realize_outer(build_vector_window(2, 2), Permutation::identity(1)), std::invalid_argument);
}

TEST(Outer, RejectsAlgebraicity) {
  EXPECT_THROW(outer_group(make_spec(Kind::vector_space, 2), 5), std::invalid_argument);
  EXPECT_THROW(outer_group(make_spec(Kind::dlo), 2), std::invalid_argument);
}

TEST(Outer, AutFx) {
  EXPECT_EQ(aut_fx(2).order(), BigInt(1));
  EXPECT_EQ(aut_fx(3).order(), BigInt(1));
  EXPECT_EQ(aut_fx(4).order(), BigInt(2));
  EXPECT_EQ(aut_fx(5).order(), BigInt(2));
  EXPECT_EQ(aut_fx(8).order(), BigInt(6));
  EXPECT_THROW(aut_fx(6), std::invalid_argument);
}

TEST(Outer, GlvKernelSmallCases) {
  for (int q : {2, 3}) {
    GlvReport d2 = glv_kernel_check(q, 2), d3 = glv_kernel_check(q, 3);
    EXPECT_TRUE(d2.kernel_abelian && d3.kernel_abelian);
    EXPECT_EQ(d2.kernel_order, d3.kernel_order) << q;
    EXPECT_TRUE(d2.elements_verified && d3.elements_verified);
    EXPECT_TRUE(d2.gl_section_ok && d3.gl_section_ok);
    EXPECT_TRUE(d2.matches && d3.matches);
  }
  GlvReport r = glv_kernel_check(4, 2);
  EXPECT_TRUE(r.kernel_abelian);
  EXPECT_TRUE(r.elements_verified);
  EXPECT_EQ(r.lines, 5u);
  EXPECT_THROW(glv_kernel_check(6, 2), std::invalid_argument);
  EXPECT_THROW(glv_kernel_check(2, 1), std::invalid_argument);
}
