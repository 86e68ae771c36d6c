// Automorphism groups of small explicit structures by backtracking.
#pragma once

#include <functional>
#include <vector>

#include "oligo/permgroup.hpp"

namespace oligo {

// A structure seen through a compatibility test on partial maps. `extend_ok(map, x)`
// is called after map[x] was assigned; it must check every relation instance that
// involves x and only points already mapped (map entries are -1 when unassigned).
struct SearchableStructure {
  std::size_t n = 0;
  std::vector<long> invariant;  // per point; automorphisms preserve it
  std::function<bool(const std::vector<Point>&, Point)> extend_ok;
};

namespace detail {

inline bool extend_search(const SearchableStructure& s, std::vector<Point>& map, std::vector<char>& used,
                          std::size_t next, Budget* budget) {
  while (next < s.n && map[next] >= 0) ++next;
  if (next == s.n) return true;
  for (std::size_t y = 0; y < s.n; ++y) {
    if (used[y] || s.invariant[y] != s.invariant[next]) continue;
    if (budget) budget->tick();
    map[next] = static_cast<Point>(y);
    used[y] = 1;
    if (s.extend_ok(map, static_cast<Point>(next)) && extend_search(s, map, used, next + 1, budget)) return true;
    map[next] = -1;
    used[y] = 0;
  }
  return false;
}

}  // namespace detail

// An automorphism extending the partial assignment `pre` (pairs x -> y), if any.
inline std::optional<Permutation> find_automorphism(const SearchableStructure& s,
                                                    const std::vector<std::pair<Point, Point>>& pre,
                                                    Budget* budget = nullptr) {
  std::vector<Point> map(s.n, -1);
  std::vector<char> used(s.n, 0);
  for (auto [x, y] : pre) {
    if (map[x] >= 0 && map[x] != y) return std::nullopt;
    if (map[x] < 0 && used[y]) return std::nullopt;
    if (s.invariant[x] != s.invariant[y]) return std::nullopt;
    map[x] = y;
    used[y] = 1;
  }
  // check the fixed part incrementally
  std::vector<Point> partial(s.n, -1);
  for (auto [x, y] : pre) {
    if (partial[x] >= 0) continue;
    partial[x] = y;
    if (!s.extend_ok(partial, x)) return std::nullopt;
  }
  if (!detail::extend_search(s, map, used, 0, budget)) return std::nullopt;
  return Permutation(map);
}

// Full automorphism group via the stabilizer-chain search on base 0,1,...,n-1.
inline PermGroup automorphism_group(const SearchableStructure& s, Budget* budget = nullptr) {
  std::vector<Permutation> gens;
  for (std::size_t i = s.n; i-- > 0;) {
    std::vector<Permutation> level;
    for (const auto& g : gens) level.push_back(g);  // all found so far fix 0..i-1
    auto orbit_of = [&](Point p) {
      std::vector<char> in(s.n, 0);
      std::vector<Point> q{p};
      in[p] = 1;
      for (std::size_t k = 0; k < q.size(); ++k)
        for (const auto& g : level)
          if (!in[g(q[k])]) {
            in[g(q[k])] = 1;
            q.push_back(g(q[k]));
          }
      return in;
    };
    std::vector<char> in = orbit_of(static_cast<Point>(i));
    for (std::size_t j = i + 1; j < s.n; ++j) {
      if (in[j] || s.invariant[j] != s.invariant[i]) continue;
      std::vector<std::pair<Point, Point>> pre;
      for (std::size_t f = 0; f < i; ++f) pre.emplace_back(static_cast<Point>(f), static_cast<Point>(f));
      pre.emplace_back(static_cast<Point>(i), static_cast<Point>(j));
      if (auto a = find_automorphism(s, pre, budget)) {
        gens.push_back(*a);
        level.push_back(*a);
        in = orbit_of(static_cast<Point>(i));
      }
    }
  }
  return PermGroup(s.n, gens);
}

}  // namespace oligo
