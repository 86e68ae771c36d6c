#include <gtest/gtest.h>

#include <random>

#include "oligo/canon.hpp"
#include "oligo/orbital.hpp"

using namespace oligo;

namespace {

RelStructure eex_rel(const StructureSpec& s, int level, int n_max) {
  OrbitalStructure E = build_eex(build_window(s, level), 1, n_max);
  hat_expand(E);
  return E.relational();
}

std::vector<AtomId> random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<AtomId> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

std::string digest(const RelStructure& s) { return canonical_digest(s, canonical_labeling(s).label); }

}  // namespace

TEST(Canon, RelabelingInvariance) {
  std::mt19937_64 rng(42);
  for (const auto& [spec, level] : std::vector<std::pair<StructureSpec, int>>{{make_spec(Kind::pure_set), 2},
                                                                              {make_spec(Kind::dlo), 2},
                                                                              {make_spec(Kind::random_graph), 1},
                                                                              {make_spec(Kind::henson, 3), 1},
                                                                              {make_spec(Kind::equivalence, 2), 1},
                                                                              {make_spec(Kind::colored_graph, 3), 1},
                                                                              {make_spec(Kind::vector_space, 2), 1}}) {
    RelStructure s = eex_rel(spec, level, 3);
    const std::string d0 = digest(s);
    for (int trial = 0; trial < 100; ++trial) {
      auto p = random_perm(s.n, rng);
      RelStructure t = relabel(s, p);
      ASSERT_TRUE(is_isomorphism(s, t, p));
      ASSERT_EQ(digest(t), d0) << spec.name() << " trial " << trial;
    }
  }
}

TEST(Canon, SingleRelationEditsChangeTheDigest) {
  std::mt19937_64 rng(3);
  for (const auto& spec : {make_spec(Kind::pure_set), make_spec(Kind::dlo), make_spec(Kind::equivalence, 2)}) {
    RelStructure s = eex_rel(spec, 1, 2);
    const std::string d0 = digest(s);
    for (int trial = 0; trial < 30; ++trial) {
      RelStructure t = s;
      auto& rel = t.relations[rng() % t.relations.size()];
      if (rel.size() > 0 && rng() % 2) {
        std::size_t r = rng() % rel.size();
        rel.tuples.erase(rel.tuples.begin() + r * rel.arity, rel.tuples.begin() + (r + 1) * rel.arity);
      } else {
        // add a tuple that is not present
        for (int tries = 0; tries < 1000; ++tries) {
          std::vector<AtomId> tup(rel.arity);
          for (auto& x : tup) x = static_cast<AtomId>(rng() % t.n);
          if (rel.contains(tup.data())) continue;
          rel.tuples.insert(rel.tuples.end(), tup.begin(), tup.end());
          rel.normalize();
          break;
        }
      }
      EXPECT_NE(digest(t), d0) << spec.name() << " " << rel.name;
    }
  }
}

TEST(Canon, AutomorphismsFoundAreGenuine) {
  RelStructure s = eex_rel(make_spec(Kind::pure_set), 2, 3);
  CanonResult r = canonical_labeling(s);
  EXPECT_FALSE(r.automorphisms.empty());
  for (const auto& a : r.automorphisms) {
    std::vector<AtomId> f(a.images().begin(), a.images().end());
    EXPECT_TRUE(is_isomorphism(s, s, f));
  }
}

TEST(Canon, AutomorphismGroupOfAFiniteGraph) {
  // the 5-cycle: automorphism group of order 10
  RelStructure s;
  s.n = 5;
  Relation e{"E", 2, {}};
  for (AtomId i = 0; i < 5; ++i) {
    e.tuples.insert(e.tuples.end(), {i, static_cast<AtomId>((i + 1) % 5)});
    e.tuples.insert(e.tuples.end(), {static_cast<AtomId>((i + 1) % 5), i});
  }
  e.normalize();
  s.relations.push_back(e);
  CanonResult r = canonical_labeling(s);
  EXPECT_EQ(PermGroup(5, r.automorphisms).order(), BigInt(10));
}

TEST(Canon, DistinguishesStructures) {
  EXPECT_NE(digest(eex_rel(make_spec(Kind::pure_set), 2, 3)), digest(eex_rel(make_spec(Kind::dlo), 2, 3)));
  EXPECT_NE(digest(eex_rel(make_spec(Kind::random_graph), 1, 2)), digest(eex_rel(make_spec(Kind::henson, 3), 1, 2)));
}
