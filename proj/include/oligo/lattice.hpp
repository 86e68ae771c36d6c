// Windowed lattice of closed sets, level sets and the depth invariant k_M.
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oligo/structures.hpp"

namespace oligo {

struct ClosureLattice {
  std::vector<ClosedSet> nodes;  // smallest first, ties by point list
  std::size_t bottom = 0;
  std::vector<std::pair<std::size_t, std::size_t>> hasse_edges;  // (lower, upper)
  std::vector<int> depth;
  int max_generators = 1;

  std::optional<std::size_t> find(const std::vector<Point>& pts) const {
    ClosedSet probe;
    probe.points = pts;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), probe);
    if (it != nodes.end() && it->points == pts) return static_cast<std::size_t>(it - nodes.begin());
    return std::nullopt;
  }

  int height() const { return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end()); }
};

namespace detail {

template <class F>
void for_each_subset(std::size_t n, std::size_t max_size, F&& f) {
  std::vector<Point> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    f(cur);
    if (cur.size() == max_size) return;
    for (std::size_t x = from; x < n; ++x) {
      cur.push_back(static_cast<Point>(x));
      rec(x + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace detail

inline ClosureLattice build_lattice(const Window& w, int max_generators, Budget* budget = nullptr) {
  if (max_generators < 1) throw std::invalid_argument("lattice: max_generators must be >= 1");
  ClosureLattice lat;
  lat.max_generators = max_generators;
  std::map<std::vector<Point>, ClosedSet> uniq;
  ClosedSet bottom = dcl0(w);
  uniq.emplace(bottom.points, bottom);
  detail::for_each_subset(w.n, static_cast<std::size_t>(max_generators), [&](const std::vector<Point>& b) {
    if (budget) budget->tick();
    ClosedSet c = acl(w, b);
    uniq.emplace(c.points, std::move(c));
  });
  for (auto& [pts, c] : uniq) lat.nodes.push_back(c);
  std::sort(lat.nodes.begin(), lat.nodes.end());
  lat.bottom = *lat.find(bottom.points);

  const std::size_t m = lat.nodes.size();
  std::vector<std::vector<std::size_t>> below(m);  // strict subsets
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t l = 0; l < m; ++l)
      if (l != u && lat.nodes[l].points.size() < lat.nodes[u].points.size() && lat.nodes[l].subset_of(lat.nodes[u]))
        below[u].push_back(l);
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t l : below[u]) {
      bool cover = true;
      for (std::size_t mid : below[u])
        if (mid != l && lat.nodes[l].points.size() < lat.nodes[mid].points.size() &&
            lat.nodes[l].subset_of(lat.nodes[mid])) {
          cover = false;
          break;
        }
      if (cover) lat.hasse_edges.emplace_back(l, u);
    }
  std::sort(lat.hasse_edges.begin(), lat.hasse_edges.end());

  std::vector<std::vector<std::size_t>> adj(m);
  for (auto [l, u] : lat.hasse_edges) {
    adj[l].push_back(u);
    adj[u].push_back(l);
  }
  lat.depth.assign(m, -1);
  std::deque<std::size_t> q{lat.bottom};
  lat.depth[lat.bottom] = 0;
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop_front();
    for (std::size_t y : adj[x])
      if (lat.depth[y] < 0) {
        lat.depth[y] = lat.depth[x] + 1;
        q.push_back(y);
      }
  }
  return lat;
}

// Nodes other than dcl0 at depth <= k.
inline std::vector<ClosedSet> level_set(const ClosureLattice& lat, int k) {
  if (k < 1) throw std::invalid_argument("level_set: k must be >= 1");
  std::vector<ClosedSet> out;
  for (std::size_t i = 0; i < lat.nodes.size(); ++i)
    if (i != lat.bottom && lat.depth[i] >= 0 && lat.depth[i] <= k) out.push_back(lat.nodes[i]);
  return out;
}

inline ClosedSet meet(const ClosedSet& a, const ClosedSet& b) {
  ClosedSet c;
  std::set_intersection(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                        std::back_inserter(c.points));
  c.generated_by = c.points;
  return c;
}

inline ClosedSet join(const Window& w, const ClosedSet& a, const ClosedSet& b) {
  std::vector<Point> u;
  std::set_union(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(), std::back_inserter(u));
  return acl(w, u);
}

// Longest strict chain of singleton closures, ignoring closures equal to dcl0.
inline int compute_kM(const Window& w) {
  if (w.n == 0) throw std::invalid_argument("compute_kM: empty window");
  ClosedSet bottom = dcl0(w);
  std::map<std::vector<Point>, ClosedSet> uniq;
  for (std::size_t a = 0; a < w.n; ++a) {
    ClosedSet c = acl(w, {static_cast<Point>(a)});
    if (c.points != bottom.points) uniq.emplace(c.points, c);
  }
  std::vector<ClosedSet> cl;
  for (auto& [p, c] : uniq) cl.push_back(c);
  std::sort(cl.begin(), cl.end());
  std::vector<int> best(cl.size(), 1);
  int res = cl.empty() ? 0 : 1;
  for (std::size_t i = 0; i < cl.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (cl[j].points.size() < cl[i].points.size() && cl[j].subset_of(cl[i])) best[i] = std::max(best[i], best[j] + 1);
    res = std::max(res, best[i]);
  }
  return res;
}

inline std::string lattice_dot(const ClosureLattice& lat, const Window& w) {
  std::ostringstream os;
  os << "digraph lattice {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < lat.nodes.size(); ++i) {
    os << "  n" << i << " [label=\"{";
    for (std::size_t j = 0; j < lat.nodes[i].points.size(); ++j) {
      if (j) os << ",";
      os << w.labels[lat.nodes[i].points[j]];
    }
    os << "}\"";
    if (i == lat.bottom) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (auto [l, u] : lat.hasse_edges) os << "  n" << l << " -> n" << u << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace oligo
