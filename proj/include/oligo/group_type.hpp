// Abstract identification of small permutation groups.
#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "oligo/permgroup.hpp"

namespace oligo {

struct GroupType {
  BigInt order = 1;
  bool abelian = true;
  bool cyclic = true;
  std::string name = "1";                    // "1", "C3", "Sym(3)", or "order N"
  std::map<int, std::size_t> element_orders;  // element order -> count (empty when too large)

  // Stable label used for bucketing isomorphism types.
  std::string label() const {
    std::string s = "order=" + order.str() + ";abelian=" + (abelian ? "1" : "0");
    if (!element_orders.empty()) {
      s += ";orders=";
      bool first = true;
      for (auto [o, c] : element_orders) {
        if (!first) s += ',';
        s += std::to_string(o) + ":" + std::to_string(c);
        first = false;
      }
    }
    return s;
  }
};

namespace detail {

struct PermHash {
  std::size_t operator()(const Permutation& p) const {
    std::size_t h = 1469598103934665603ull;
    for (Point x : p.images()) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

inline int element_order(const Permutation& p) {
  int o = 1;
  Permutation q = p;
  while (!q.is_identity()) {
    q = q * p;
    ++o;
  }
  return o;
}

// Generators with redundant ones removed greedily.
inline std::vector<Permutation> reduced_generators(const PermGroup& g) {
  std::vector<Permutation> keep;
  PermGroup cur(g.degree());
  for (const auto& s : g.generators()) {
    if (cur.contains(s)) continue;
    keep.push_back(s);
    cur = PermGroup(g.degree(), keep);
    if (cur.order() == g.order()) break;
  }
  return keep;
}

inline BigInt factorial(unsigned k) {
  BigInt f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

inline constexpr std::size_t kIdentifyCap = 40320;

// Isomorphism test by searching generator images; only for small groups.
inline bool isomorphic(const PermGroup& a, const PermGroup& b, std::size_t cap = 5040) {
  if (a.order() != b.order()) return false;
  if (a.order() > cap) throw BudgetExceeded("isomorphism test: groups too large");
  auto gens = detail::reduced_generators(a);
  if (gens.empty()) return true;
  auto ea = a.elements();
  auto eb = b.elements();
  std::unordered_map<Permutation, std::size_t, detail::PermHash> ia, ib;
  for (std::size_t i = 0; i < ea.size(); ++i) ia[ea[i]] = i;
  for (std::size_t i = 0; i < eb.size(); ++i) ib[eb[i]] = i;
  std::vector<int> ordb(eb.size());
  for (std::size_t i = 0; i < eb.size(); ++i) ordb[i] = detail::element_order(eb[i]);
  std::map<int, std::size_t> profa, profb;
  for (const auto& e : ea) profa[detail::element_order(e)]++;
  for (int o : ordb) profb[o]++;
  if (profa != profb) return false;

  // word tree: each element reached as parent * gens[s]
  const std::size_t n = ea.size();
  std::vector<long> parent(n, -1), via(n, -1);
  std::vector<std::size_t> bfs{ia[Permutation::identity(a.degree())]};
  std::vector<char> seen(n, 0);
  seen[bfs[0]] = 1;
  for (std::size_t k = 0; k < bfs.size(); ++k)
    for (std::size_t s = 0; s < gens.size(); ++s) {
      std::size_t c = ia[ea[bfs[k]] * gens[s]];
      if (!seen[c]) {
        seen[c] = 1;
        parent[c] = static_cast<long>(bfs[k]);
        via[c] = static_cast<long>(s);
        bfs.push_back(c);
      }
    }
  std::vector<std::vector<std::size_t>> cand(gens.size());
  for (std::size_t s = 0; s < gens.size(); ++s) {
    int o = detail::element_order(gens[s]);
    for (std::size_t j = 0; j < eb.size(); ++j)
      if (ordb[j] == o) cand[s].push_back(j);
  }
  std::vector<std::size_t> choice(gens.size(), 0);
  std::vector<std::size_t> phi(n);
  for (;;) {
    // evaluate the assignment
    phi[bfs[0]] = ib[Permutation::identity(b.degree())];
    for (std::size_t k = 1; k < bfs.size(); ++k) {
      std::size_t c = bfs[k];
      phi[c] = ib[eb[phi[parent[c]]] * eb[cand[via[c]][choice[via[c]]]]];
    }
    bool ok = true;
    std::vector<char> hit(n, 0);
    for (std::size_t e = 0; e < n && ok; ++e) {
      if (hit[phi[e]]) ok = false;
      hit[phi[e]] = 1;
    }
    for (std::size_t e = 0; e < n && ok; ++e)
      for (std::size_t s = 0; s < gens.size() && ok; ++s) {
        std::size_t c = ia[ea[e] * gens[s]];
        if (phi[c] != ib[eb[phi[e]] * eb[cand[s][choice[s]]]]) ok = false;
      }
    if (ok) return true;
    std::size_t s = 0;
    while (s < gens.size() && ++choice[s] == cand[s].size()) choice[s++] = 0;
    if (s == gens.size()) return false;
  }
}

inline PermGroup symmetric_group(std::size_t n) {
  if (n < 2) return PermGroup(n);
  std::vector<Point> cyc(n);
  std::iota(cyc.begin(), cyc.end(), 0);
  return PermGroup(n, {Permutation::from_cycles(n, {{0, 1}}), Permutation::from_cycles(n, {cyc})});
}

inline PermGroup cyclic_group(std::size_t n) {
  if (n < 2) return PermGroup(std::max<std::size_t>(n, 1));
  std::vector<Point> cyc(n);
  std::iota(cyc.begin(), cyc.end(), 0);
  return PermGroup(n, {Permutation::from_cycles(n, {cyc})});
}

inline GroupType identify(const PermGroup& g) {
  GroupType t;
  t.order = g.order();
  const auto& gens = g.generators();
  for (std::size_t i = 0; i < gens.size() && t.abelian; ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (gens[i] * gens[j] != gens[j] * gens[i]) {
        t.abelian = false;
        break;
      }
  if (t.order == 1) {
    t.name = "1";
    return t;
  }
  if (t.order <= kIdentifyCap) {
    for (const auto& e : g.elements()) t.element_orders[detail::element_order(e)]++;
    t.cyclic = t.element_orders.count(static_cast<int>(t.order)) > 0;
  } else {
    t.cyclic = false;
  }
  if (t.cyclic) {
    t.name = "C" + t.order.str();
    return t;
  }
  t.name = "order " + t.order.str();
  if (t.order <= 24 && !t.abelian) {
    for (unsigned k = 3; k <= 4; ++k)
      if (t.order == detail::factorial(k) && isomorphic(g, symmetric_group(k))) t.name = "Sym(" + std::to_string(k) + ")";
  }
  if (t.order == 4 && !t.cyclic) t.name = "C2xC2";
  return t;
}

}  // namespace oligo
