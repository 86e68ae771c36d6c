#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oligo/orbital.hpp"

using namespace oligo;

namespace {

OrbitalStructure hat_eex(const StructureSpec& s, int level, int n_max = 3) {
  OrbitalStructure E = build_eex(build_window(s, level), 1, n_max);
  hat_expand(E);
  return E;
}

std::vector<Point> concat_dom(const OrbitalStructure& E, const std::vector<AtomId>& t, bool images) {
  std::vector<Point> out;
  for (AtomId a : t)
    for (auto [x, y] : E.pairs(a)) out.push_back(images ? y : x);
  return out;
}

std::vector<StructureSpec> small_specs() {
  return {make_spec(Kind::pure_set),         make_spec(Kind::dlo),           make_spec(Kind::random_graph),
          make_spec(Kind::henson, 3),        make_spec(Kind::equivalence, 2), make_spec(Kind::colored_graph, 2),
          make_spec(Kind::vector_space, 2)};
}

}  // namespace

TEST(Orbital, PureSetAtomCount) {
  OrbitalStructure E = build_eex(build_window(make_spec(Kind::pure_set), 1), 1, 2);
  EXPECT_EQ(E.size(), 9u);
  EXPECT_EQ(std::count(E.unary.begin(), E.unary.end(), 1), 3);
}

TEST(Orbital, AtomsAreExactlyTheExtendableMaps) {
  for (const auto& s : small_specs()) {
    Window w = build_window(s, 1);
    OrbitalStructure E = build_eex(w, 1, 2);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < E.nodes.size(); ++i)
      for (std::size_t j = 0; j < E.nodes.size(); ++j) {
        auto img = E.nodes[j].points;
        if (img.size() != E.nodes[i].points.size()) continue;
        do {
          bool ext = same_orbit(w, E.nodes[i].points, img, {});
          expected += ext;
          EXPECT_EQ(ext, E.find_atom(i, img).has_value()) << s.name();
        } while (std::next_permutation(img.begin(), img.end()));
      }
    EXPECT_EQ(E.size(), expected) << s.name();
  }
}

TEST(Orbital, E2MatchesJointOrbits) {
  for (const auto& s : small_specs()) {
    Window w = build_window(s, 1);
    OrbitalStructure E = build_eex(w, 1, 2);
    const Relation& e2 = E.E[0];
    for (AtomId x = 0; x < E.size(); ++x)
      for (AtomId y = 0; y < E.size(); ++y) {
        std::vector<AtomId> t{x, y};
        auto a = concat_dom(E, t, false), b = concat_dom(E, t, true);
        bool functional = true;
        for (std::size_t i = 0; i < a.size(); ++i)
          for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) functional = false;
        bool expect = functional && same_orbit(w, a, b, {});
        EXPECT_EQ(e2.contains(t.data()), expect) << s.name();
        EXPECT_EQ(in_E(E, t), expect);
      }
  }
}

TEST(Orbital, DloPairRule) {
  Window w = build_window(make_spec(Kind::dlo), 2);
  OrbitalStructure E = build_eex(w, 1, 2);
  for (AtomId x = 0; x < E.size(); ++x)
    for (AtomId y = 0; y < E.size(); ++y) {
      auto [a, b] = E.pairs(x)[0];
      auto [c, d] = E.pairs(y)[0];
      bool functional = (a == c) == (b == d);
      bool order = a == c || w.col(a, c) == w.col(b, d);
      std::vector<AtomId> t{x, y};
      EXPECT_EQ(E.E[0].contains(t.data()), functional && order);
    }
}

TEST(Orbital, ProjectionsAndCoordinatePermutations) {
  for (const auto& s : small_specs()) {
    OrbitalStructure E = build_eex(build_window(s, 1), 1, 3);
    const Relation& e2 = E.E[0];
    const Relation& e3 = E.E[1];
    for (std::size_t r = 0; r < e3.size(); ++r) {
      const AtomId* t = &e3.tuples[r * 3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          AtomId p[2] = {t[i], t[j]};
          EXPECT_TRUE(e2.contains(p)) << s.name();
        }
      AtomId perm[3] = {t[2], t[0], t[1]};
      EXPECT_TRUE(e3.contains(perm));
    }
    // identity atoms on one node are jointly realized by g = id
    for (AtomId id : E.identity_atom) {
      AtomId t[3] = {id, id, id};
      EXPECT_TRUE(e3.contains(t));
    }
  }
}

TEST(Orbital, HatPredicates) {
  for (const auto& s : small_specs()) {
    OrbitalStructure E = hat_eex(s, 1);
    std::map<std::pair<AtomId, AtomId>, AtomId> comp;
    for (std::size_t r = 0; r < E.composition.size(); ++r) {
      const AtomId* t = &E.composition.tuples[r * 3];
      comp[{t[0], t[1]}] = t[2];
      // (p2 o p1)(x) = p2(p1(x))
      auto p1 = E.pairs(t[0]), p2 = E.pairs(t[1]), p3 = E.pairs(t[2]);
      std::map<Point, Point> m2(p2.begin(), p2.end());
      for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_EQ(p3[i].second, m2.at(p1[i].second));
    }
    std::map<AtomId, AtomId> inv;
    for (std::size_t r = 0; r < E.inverse.size(); ++r) inv[E.inverse.tuples[r * 2]] = E.inverse.tuples[r * 2 + 1];
    ASSERT_EQ(inv.size(), E.size());
    for (AtomId a = 0; a < E.size(); ++a) {
      EXPECT_EQ(inv.at(inv.at(a)), a);
      EXPECT_EQ(comp.at({a, inv.at(a)}), E.identity_atom[E.atoms[a].dom]);
      if (E.unary[a]) EXPECT_EQ(inv.at(a), a);
    }
    // associativity where defined
    for (auto [xy, z1] : comp)
      for (AtomId w = 0; w < E.size(); ++w) {
        auto yz = comp.find({xy.second, w});
        if (yz == comp.end()) continue;
        auto left = comp.find({z1, w});
        auto right = comp.find({xy.first, yz->second});
        ASSERT_TRUE(left != comp.end() && right != comp.end());
        EXPECT_EQ(left->second, right->second);
      }
    // P_1(A, A)
    for (AtomId id : E.identity_atom) {
      AtomId t[2] = {id, id};
      EXPECT_TRUE(E.P[0].contains(t));
    }
  }
}

TEST(Orbital, DomCodIncidence) {
  OrbitalStructure E = hat_eex(make_spec(Kind::random_graph), 1);
  RelStructure r = E.relational();
  for (const auto& rel : r.relations) {
    if (rel.name != "Dom" && rel.name != "Cod") continue;
    std::vector<int> seen(E.size(), 0);
    for (std::size_t i = 0; i < rel.size(); ++i) ++seen[rel.tuples[i * 2]];
    for (int c : seen) EXPECT_EQ(c, 1);
  }
  EXPECT_EQ(r.relations[0].name, "U");
}

TEST(Orbital, VectorLinesShareOneAutomorphismType) {
  OrbitalStructure E = hat_eex(make_spec(Kind::vector_space, 2), 1);
  EXPECT_EQ(E.P_L.size(), 1u);
  EXPECT_EQ(E.P_L.begin()->second.size(), E.nodes.size());
}

TEST(Orbital, OrbitCounts) {
  EXPECT_EQ(orbit_counts(build_eex(build_window(make_spec(Kind::pure_set), 2), 1, 2), 1), 2u);
  // identity, increasing and decreasing singleton maps
  EXPECT_EQ(orbit_counts(build_eex(build_window(make_spec(Kind::dlo), 2), 1, 2), 1), 3u);
  for (const auto& s : small_specs()) {
    auto e2 = build_eex(build_window(s, 2), 1, 2);
    auto e3 = build_eex(build_window(s, 3), 1, 2);
    EXPECT_EQ(orbit_counts(e2, 1), orbit_counts(e3, 1)) << s.name();
  }
}

TEST(Orbital, InducedMapsAreAutomorphismsOfE) {
  for (const auto& s : small_specs()) {
    Window w = build_window(s, 1);
    OrbitalStructure E = build_eex(w, 1, 3);
    PermGroup g = window_group(w);
    for (const auto& x : g.generators()) {
      auto f = induced_atom_map(E, x);
      for (const auto& rel : E.E)
        for (std::size_t r = 0; r < rel.size(); ++r) {
          std::vector<AtomId> t(rel.arity);
          for (int i = 0; i < rel.arity; ++i) t[i] = f[rel.tuples[r * rel.arity + i]];
          EXPECT_TRUE(rel.contains(t.data())) << s.name();
        }
    }
  }
}

TEST(Orbital, RejectsBadParameters) {
  Window w = build_window(make_spec(Kind::pure_set), 1);
  EXPECT_THROW(build_eex(w, 0, 2), std::invalid_argument);
  EXPECT_THROW(build_eex(w, 1, 1), std::invalid_argument);
  EXPECT_THROW(orbit_counts(build_eex(w, 1, 2), 5), std::invalid_argument);
}
