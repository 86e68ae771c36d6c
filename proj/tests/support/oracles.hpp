// Brute-force reference implementations used by the test suites.
#pragma once

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <vector>

#include "oligo/permgroup.hpp"
#include "oligo/structures.hpp"

namespace oligo::oracle {

inline Permutation random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<Point> img(n);
  std::iota(img.begin(), img.end(), 0);
  std::shuffle(img.begin(), img.end(), rng);
  return Permutation(img);
}

// All elements of <gens> by closure under right multiplication.
inline std::set<std::vector<Point>> elements(std::size_t n, const std::vector<Permutation>& gens) {
  std::set<std::vector<Point>> seen;
  std::deque<Permutation> todo{Permutation::identity(n)};
  seen.insert(todo.front().images());
  while (!todo.empty()) {
    Permutation p = todo.front();
    todo.pop_front();
    for (const auto& g : gens) {
      Permutation q = p * g;
      if (seen.insert(q.images()).second) todo.push_back(q);
    }
  }
  return seen;
}

inline std::vector<Point> orbit_of(std::size_t n, const std::vector<Permutation>& gens, Point x) {
  std::vector<char> in(n, 0);
  std::vector<Point> out{x};
  in[x] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto& g : gens) {
      Point y = g(out[i]);
      if (!in[y]) {
        in[y] = 1;
        out.push_back(y);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool fixes_setwise(const std::vector<Point>& p, const std::vector<Point>& set) {
  for (Point x : set)
    if (!std::binary_search(set.begin(), set.end(), p[x])) return false;
  return true;
}

inline bool fixes_pointwise(const std::vector<Point>& p, const std::vector<Point>& set) {
  for (Point x : set)
    if (p[x] != x) return false;
  return true;
}

// Orbit of a tuple under an explicit list of group elements (closed under the generated group).
inline std::set<std::vector<Point>> tuple_orbit(const std::vector<std::vector<Point>>& elems, const std::vector<Point>& t) {
  std::set<std::vector<Point>> out{t};
  std::deque<std::vector<Point>> todo{t};
  while (!todo.empty()) {
    auto u = todo.front();
    todo.pop_front();
    for (const auto& e : elems) {
      std::vector<Point> v(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) v[i] = e[u[i]];
      if (out.insert(v).second) todo.push_back(v);
    }
  }
  return out;
}

// Literal alternation: close {c} under "same orbit over A" and "same orbit over B" inside the window.
inline std::set<std::vector<Point>> literal_alternation(const Window& w, const std::vector<Point>& a,
                                                        const std::vector<Point>& b, const std::vector<Point>& c) {
  std::vector<std::vector<Point>> all;
  std::vector<Point> t(c.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == t.size()) {
      all.push_back(t);
      return;
    }
    for (std::size_t x = 0; x < w.n; ++x) {
      t[i] = static_cast<Point>(x);
      rec(i + 1);
    }
  };
  rec(0);
  std::set<std::vector<Point>> out{c};
  std::deque<std::vector<Point>> todo{c};
  while (!todo.empty()) {
    auto u = todo.front();
    todo.pop_front();
    for (const auto& d : all) {
      if (out.count(d)) continue;
      if (same_orbit(w, u, d, a) || same_orbit(w, u, d, b)) {
        out.insert(d);
        todo.push_back(d);
      }
    }
  }
  return out;
}

}  // namespace oligo::oracle
