#include <gtest/gtest.h>

#include <set>

#include "oligo/genstab.hpp"

using namespace oligo;

namespace {

// Every subgroup of a small group, as <x, y> over element pairs.
std::vector<PermGroup> all_subgroups(const PermGroup& g) {
  auto els = g.elements();
  std::vector<PermGroup> out;
  std::set<std::set<std::vector<Point>>> seen;
  for (const auto& x : els)
    for (const auto& y : els) {
      PermGroup h(g.degree(), {x, y});
      std::set<std::vector<Point>> key;
      for (const auto& e : h.elements()) key.insert(e.images());
      if (seen.insert(key).second) out.push_back(h);
    }
  return out;
}

struct Case {
  StructureSpec spec;
  int level;
};

std::vector<Case> small_windows() {
  return {{make_spec(Kind::pure_set), 1},       {make_spec(Kind::pure_set), 2},      {make_spec(Kind::pure_set), 3},
          {make_spec(Kind::dlo), 2},            {make_spec(Kind::random_graph), 1},  {make_spec(Kind::henson, 3), 1},
          {make_spec(Kind::equivalence, 2), 2}, {make_spec(Kind::colored_graph, 2), 1}};
}

bool homogeneous_window(const Case& c) { return c.spec.kind == Kind::pure_set || c.spec.kind == Kind::equivalence; }

// Nodes of at most m points whose pointwise stabilizer moves every other point inside an orbit of more
// than m points. Among such nodes G_(K) <= G_(K,L) <= G_{K} pins K down, as in the limit.
bool roomy(const PermGroup& gw, const ClosedSet& k, std::size_t m) {
  if (k.points.size() > m) return false;
  PermGroup pw = pointwise_stabilizer(gw, k.points);
  for (Point x = 0; x < static_cast<Point>(gw.degree()); ++x)
    if (!k.contains(x) && orbit(pw, {x}).size() <= m) return false;
  return true;
}

}  // namespace

TEST(GenStab, OrderIdentityAndClassification) {
  for (const auto& c : small_windows()) {
    Window w = build_window(c.spec, c.level);
    ASSERT_LE(w.n, 8u);
    PermGroup gw = window_group(w);
    ClosureLattice lat = build_lattice(w, 3);
    ClosureLattice small = build_lattice(w, 2);
    std::erase_if(small.nodes, [&](const ClosedSet& k) { return !roomy(gw, k, 2); });
    for (const auto& k : lat.nodes) {
      PermGroup aut = aut_closed(w, k);
      auto rq = restriction_quotient(gw, k.points);
      PermGroup pw = pointwise_stabilizer(gw, k.points);
      for (const auto& l : all_subgroups(aut)) {
        GenStab h = gen_stabilizer(gw, k, l, &aut);
        // |G_(K,L)| = |L restricted to the realized image| * |G_(K)|
        std::size_t both = 0;
        for (const auto& e : l.elements()) both += rq.image.contains(e);
        EXPECT_EQ(h.group.order(), BigInt(both) * pw.order()) << c.spec.name();
        EXPECT_TRUE(h.group.is_subgroup_of(gw));
        auto cls = classify_subgroup(gw, h.group, lat);
        if (cls) {
          EXPECT_TRUE(cls->verified);
          EXPECT_EQ(gen_stabilizer(gw, cls->K, cls->L).group, h.group);
        }
        // on roomy nodes the inputs come back
        if (homogeneous_window(c) && roomy(gw, k, 2)) {
          auto back = classify_subgroup(gw, h.group, small);
          ASSERT_TRUE(back.has_value()) << c.spec.name();
          EXPECT_EQ(back->K, k);
          EXPECT_EQ(back->L, l);
        }
      }
    }
  }
}

TEST(GenStab, NormalityForwardDirection) {
  for (const auto& c : small_windows()) {
    Window w = build_window(c.spec, c.level);
    PermGroup gw = window_group(w);
    ClosureLattice lat = build_lattice(w, 3);
    for (const auto& k : lat.nodes) {
      PermGroup aut = aut_closed(w, k);
      auto subs = all_subgroups(aut);
      for (const auto& l1 : subs)
        for (const auto& l2 : subs) {
          if (!l1.is_subgroup_of(l2) || !is_normal_finite_index(l1, l2).normal) continue;
          EXPECT_TRUE(check_normality_forward(gw, k, l1, l2, &aut).holds) << c.spec.name();
        }
    }
  }
  Window w = build_window(make_spec(Kind::pure_set), 2);
  ClosedSet k = acl(w, {0, 1, 2});
  PermGroup aut = aut_closed(w, k);
  PermGroup c2(3, {Permutation::parse_cycles(3, "(0 1)")});
  EXPECT_THROW(check_normality_forward(window_group(w), k, c2, aut), std::invalid_argument);
}

TEST(GenStab, PointwiseAmongGenStabs) {
  for (const auto& c : small_windows()) {
    if (!homogeneous_window(c)) continue;
    Window w = build_window(c.spec, c.level);
    PermGroup gw = window_group(w);
    ClosureLattice lat = build_lattice(w, 2);
    for (const auto& k : lat.nodes) {
      PermGroup aut = aut_closed(w, k);
      for (const auto& l : all_subgroups(aut)) {
        GenStab h = gen_stabilizer(gw, k, l, &aut);
        EXPECT_EQ(pointwise_among_genstabs(gw, h).pointwise, l.is_trivial()) << c.spec.name();
      }
      GenStab p = gen_stabilizer(gw, k, PermGroup(k.points.size()), &aut);
      auto qt = aut_type_of_pointwise(gw, p, aut);
      EXPECT_TRUE(qt.matches_aut_k);
    }
  }
}

TEST(GenStab, PointwiseChainsMirrorTheLattice) {
  for (const auto& c : std::vector<Case>{{make_spec(Kind::pure_set), 2}, {make_spec(Kind::pure_set), 3},
                                         {make_spec(Kind::equivalence, 2), 2}}) {
    Window w = build_window(c.spec, c.level);
    PermGroup gw = window_group(w);
    ClosureLattice lat = build_lattice(w, 2);
    for (const auto& k1 : lat.nodes)
      for (const auto& k2 : lat.nodes) {
        bool groups = pointwise_stabilizer(gw, k2.points).is_subgroup_of(pointwise_stabilizer(gw, k1.points));
        EXPECT_EQ(groups, k1.subset_of(k2)) << c.spec.name();
      }
  }
}

TEST(GenStab, RejectsForeignL) {
  Window w = build_window(make_spec(Kind::pure_set), 2);
  PermGroup gw = window_group(w);
  ClosedSet k = acl(w, {0, 1});
  EXPECT_THROW(gen_stabilizer(gw, k, PermGroup(3)), std::invalid_argument);
  PermGroup aut(2);
  PermGroup swap(2, {Permutation::parse_cycles(2, "(0 1)")});
  EXPECT_THROW(gen_stabilizer(gw, k, swap, &aut), std::invalid_argument);
}
