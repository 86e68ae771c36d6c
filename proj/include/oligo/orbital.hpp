// Expanded orbital structures E^ex(k) on windows: atoms (K, p, K'), joint-orbit relations E_n,
// Dom/Cod, and the hat predicates P_n, composition, inverse and P_L.
#pragma once

#include <boost/container_hash/hash.hpp>
#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "oligo/group_type.hpp"
#include "oligo/lattice.hpp"
#include "oligo/structures.hpp"
#include "oligo/union_find.hpp"

namespace oligo {

using AtomId = std::uint32_t;

struct Atom {
  std::size_t dom = 0, cod = 0;  // node indices
  std::vector<Point> img;        // image of each point of the domain node, in its sorted order
};

// A relation as a flat, lexicographically sorted list of tuples.
struct Relation {
  std::string name;
  int arity = 1;
  std::vector<AtomId> tuples;

  std::size_t size() const { return arity ? tuples.size() / arity : 0; }
  void normalize() {
    std::vector<std::vector<AtomId>> rows(size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].assign(tuples.begin() + i * arity, tuples.begin() + (i + 1) * arity);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    tuples.clear();
    for (const auto& r : rows) tuples.insert(tuples.end(), r.begin(), r.end());
  }
  bool contains(const AtomId* t) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      int c = 0;
      for (int j = 0; j < arity && c == 0; ++j) {
        AtomId v = tuples[mid * arity + j];
        c = v < t[j] ? -1 : (v > t[j] ? 1 : 0);
      }
      if (c == 0) return true;
      if (c < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return false;
  }
};

// Relational structure on atoms 0..n-1 (input to canonical forms).
struct RelStructure {
  std::size_t n = 0;
  std::vector<Relation> relations;
};

struct OrbitalStructure {
  std::shared_ptr<const Window> window;
  int k = 1;
  int n_max = 2;
  std::vector<ClosedSet> nodes;
  std::vector<Atom> atoms;
  std::vector<AtomId> identity_atom;  // per node
  std::vector<char> unary;
  std::vector<Relation> E;  // E[i] has arity i + 2

  bool hat = false;
  std::vector<Relation> P;  // P[i] has arity i + 2 (P_{i+1})
  Relation composition{"Comp", 3, {}};
  Relation inverse{"Inv", 2, {}};
  std::map<std::string, std::vector<AtomId>> P_L;

  std::size_t size() const { return atoms.size(); }

  std::optional<AtomId> find_atom(std::size_t dom, const std::vector<Point>& img) const {
    auto it = index_.find({dom, img});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  // nodes are sorted lexicographically by point list
  std::optional<std::size_t> find_node(const std::vector<Point>& pts) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), pts,
                               [](const ClosedSet& c, const std::vector<Point>& v) { return c.points < v; });
    if (it != nodes.end() && it->points == pts) return static_cast<std::size_t>(it - nodes.begin());
    return std::nullopt;
  }

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < atoms.size(); ++i) index_[{atoms[i].dom, atoms[i].img}] = static_cast<AtomId>(i);
  }

  // The map p of an atom as (point -> image) pairs.
  std::vector<std::pair<Point, Point>> pairs(AtomId a) const {
    std::vector<std::pair<Point, Point>> out;
    const auto& pts = nodes[atoms[a].dom].points;
    for (std::size_t i = 0; i < pts.size(); ++i) out.emplace_back(pts[i], atoms[a].img[i]);
    return out;
  }

  RelStructure relational() const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::size_t, std::vector<Point>>& k) const {
      std::size_t h = boost::hash_value(k.second);
      boost::hash_combine(h, k.first);
      return h;
    }
  };
  std::unordered_map<std::pair<std::size_t, std::vector<Point>>, AtomId, KeyHash> index_;
};

namespace detail {

// Isomorphisms K -> K2 that extend to automorphisms of the ambient structure, as image lists.
inline std::vector<std::vector<Point>> closed_isos(const Window& w, const ClosedSet& k, const ClosedSet& k2) {
  std::vector<std::vector<Point>> out;
  if (k.points.size() != k2.points.size()) return out;
  const auto& a = k.points;
  const auto& b = k2.points;
  if (w.binary()) {
    std::vector<Point> img = b;
    do {
      bool ok = true;
      for (std::size_t i = 0; i < a.size() && ok; ++i)
        for (std::size_t j = 0; j < a.size() && ok; ++j)
          if (i != j && w.col(a[i], a[j]) != w.col(img[i], img[j])) ok = false;
      if (ok) out.push_back(img);
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
  }
  if (w.linear()) {
    std::vector<Point> basis = greedy_basis(w, a);
    const std::size_t d = basis.size();
    if (greedy_basis(w, b).size() != d) return out;
    std::vector<Point> nz;
    for (Point p : b)
      if (p != 0) nz.push_back(p);
    std::vector<Point> choice;
    std::function<void()> rec = [&] {
      if (choice.size() == d) {
        auto full = hull_iso_extends(w, {basis, choice});
        if (!full) return;
        std::map<Point, Point> m;
        for (std::size_t i = 0; i < full->dom.size(); ++i) m[full->dom[i]] = full->cod[i];
        std::vector<Point> img;
        for (Point p : a) img.push_back(m.at(p));
        out.push_back(img);
        return;
      }
      for (Point p : nz) {
        choice.push_back(p);
        if (orbit_key(w, {}, choice) == orbit_key(w, {}, std::vector<Point>(basis.begin(), basis.begin() + choice.size())))
          rec();
        choice.pop_back();
      }
    };
    rec();
    std::sort(out.begin(), out.end());
    return out;
  }
  // explicit: K = K2 is the whole domain
  for (const auto& g : w.explicit_aut->elements()) {
    std::vector<Point> img;
    for (Point p : a) img.push_back(g(p));
    out.push_back(img);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Generating tuple of a node: a basis for linear windows, all points otherwise.
inline std::vector<Point> node_generators(const Window& w, const ClosedSet& k) {
  if (w.linear()) return greedy_basis(w, k.points);
  return k.points;
}

}  // namespace detail

// Pure membership test for E_n: one automorphism g with g|A_i = p_i for every i.
inline bool in_E(const OrbitalStructure& E, const std::vector<AtomId>& t) {
  const Window& w = *E.window;
  std::vector<std::pair<Point, Point>> u;
  for (AtomId a : t) {
    auto pr = E.pairs(a);
    u.insert(u.end(), pr.begin(), pr.end());
  }
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      if ((u[i].first == u[j].first) != (u[i].second == u[j].second)) return false;
  PartialMap q;
  for (auto [x, y] : u) {
    q.dom.push_back(x);
    q.cod.push_back(y);
  }
  return hull_iso_extends(w, q).has_value();
}

namespace detail {

// Fast E_n membership used during construction.
class EChecker {
 public:
  explicit EChecker(const OrbitalStructure& e) : e_(e), w_(*e.window) {
    for (std::size_t i = 0; i < e.atoms.size(); ++i) {
      auto g = node_generators(w_, e.nodes[e.atoms[i].dom]);
      std::vector<Point> im;
      const auto& pts = e.nodes[e.atoms[i].dom].points;
      for (Point p : g) im.push_back(e.atoms[i].img[std::lower_bound(pts.begin(), pts.end(), p) - pts.begin()]);
      gens_.push_back(std::move(g));
      imgs_.push_back(std::move(im));
    }
  }

  bool operator()(const std::vector<AtomId>& t) {
    if (w_.linear()) {
      std::vector<Point> a, b;
      for (AtomId x : t) {
        a.insert(a.end(), gens_[x].begin(), gens_[x].end());
        b.insert(b.end(), imgs_[x].begin(), imgs_[x].end());
      }
      return key_id(a) == key_id(b);
    }
    if (w_.binary()) {
      std::vector<std::pair<Point, Point>> u;
      for (AtomId x : t) {
        auto pr = e_.pairs(x);
        u.insert(u.end(), pr.begin(), pr.end());
      }
      for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j) {
          bool same = u[i].first == u[j].first;
          if (same != (u[i].second == u[j].second)) return false;
          if (!same && w_.col(u[i].first, u[j].first) != w_.col(u[i].second, u[j].second)) return false;
        }
      return true;
    }
    return in_E(e_, t);
  }

 private:
  const OrbitalStructure& e_;
  const Window& w_;
  std::vector<std::vector<Point>> gens_, imgs_;
  std::unordered_map<std::vector<Point>, std::size_t, boost::hash<std::vector<Point>>> ids_;
  std::map<std::vector<int>, std::size_t> keys_;

  std::size_t key_id(const std::vector<Point>& pts) {
    auto it = ids_.find(pts);
    if (it != ids_.end()) return it->second;
    auto k = orbit_key(w_, {}, pts);
    std::size_t id = keys_.emplace(std::move(k), keys_.size()).first->second;
    ids_.emplace(pts, id);
    return id;
  }
};

}  // namespace detail

// Nodes, atoms and the unary predicate only; E_n is left empty.
inline OrbitalStructure build_atoms(std::shared_ptr<const Window> wp, int k, Budget* budget = nullptr) {
  if (k < 1) throw std::invalid_argument("build_eex: k must be >= 1");
  const Window& w = *wp;
  OrbitalStructure E;
  E.window = wp;
  E.k = k;
  E.n_max = 2;
  ClosureLattice lat = build_lattice(w, k, budget);
  E.nodes = level_set(lat, k);
  std::sort(E.nodes.begin(), E.nodes.end(), [](const ClosedSet& a, const ClosedSet& b) { return a.points < b.points; });

  // atoms in lexicographic order of (K points, image list)
  const std::size_t m = E.nodes.size();
  E.identity_atom.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<std::vector<Point>, std::size_t>> imgs;
    for (std::size_t j = 0; j < m; ++j)
      for (auto& img : detail::closed_isos(w, E.nodes[i], E.nodes[j])) imgs.emplace_back(std::move(img), j);
    std::sort(imgs.begin(), imgs.end());
    for (auto& [img, j] : imgs) {
      if (budget) budget->tick();
      if (img == E.nodes[i].points) E.identity_atom[i] = static_cast<AtomId>(E.atoms.size());
      E.atoms.push_back({i, j, std::move(img)});
    }
  }
  E.reindex();
  const std::size_t N = E.atoms.size();
  E.unary.assign(N, 0);
  for (AtomId id : E.identity_atom) E.unary[id] = 1;
  return E;
}

inline OrbitalStructure build_eex(std::shared_ptr<const Window> wp, int k, int n_max, Budget* budget = nullptr) {
  if (n_max < 2) throw std::invalid_argument("build_eex: n_max must be >= 2");
  OrbitalStructure E = build_atoms(std::move(wp), k, budget);
  E.n_max = n_max;
  const std::size_t N = E.atoms.size();
  detail::EChecker check(E);
  std::vector<boost::dynamic_bitset<>> adj(N, boost::dynamic_bitset<>(N));
  Relation e2{"E2", 2, {}};
  for (AtomId x = 0; x < N; ++x)
    for (AtomId y = 0; y < N; ++y) {
      if (budget) budget->tick();
      if (check({x, y})) {
        adj[x].set(y);
        e2.tuples.push_back(x);
        e2.tuples.push_back(y);
      }
    }
  E.E.push_back(std::move(e2));
  for (int n = 3; n <= n_max; ++n) {
    const Relation& prev = E.E.back();
    Relation en{"E" + std::to_string(n), n, {}};
    std::vector<AtomId> t(n);
    for (std::size_t r = 0; r < prev.size(); ++r) {
      boost::dynamic_bitset<> cand = adj[prev.tuples[r * (n - 1)]];
      for (int j = 1; j < n - 1; ++j) cand &= adj[prev.tuples[r * (n - 1) + j]];
      for (std::size_t z = cand.find_first(); z != boost::dynamic_bitset<>::npos; z = cand.find_next(z)) {
        if (budget) budget->tick();
        std::copy(prev.tuples.begin() + r * (n - 1), prev.tuples.begin() + (r + 1) * (n - 1), t.begin());
        t[n - 1] = static_cast<AtomId>(z);
        if (check(t)) en.tuples.insert(en.tuples.end(), t.begin(), t.end());
      }
    }
    E.E.push_back(std::move(en));  // already sorted: prev sorted, z ascending
  }
  return E;
}

inline OrbitalStructure build_eex(const Window& w, int k, int n_max, Budget* budget = nullptr) {
  return build_eex(std::make_shared<const Window>(w), k, n_max, budget);
}

// Adds P_n (n < n_max), composition, inverse and P_L.
inline void hat_expand(OrbitalStructure& E) {
  const Window& w = *E.window;
  const std::size_t m = E.nodes.size();
  E.P.clear();
  for (int n = 1; n < E.n_max; ++n) {
    Relation p{"P" + std::to_string(n), n + 1, {}};
    std::vector<std::size_t> bs(n, 0);
    std::vector<std::vector<AtomId>> rows;
    for (;;) {
      std::vector<Point> u;
      for (std::size_t b : bs) u.insert(u.end(), E.nodes[b].points.begin(), E.nodes[b].points.end());
      ClosedSet cl = acl(w, u);
      for (std::size_t a = 0; a < m; ++a)
        if (E.nodes[a].subset_of(cl)) {
          std::vector<AtomId> row{E.identity_atom[a]};
          for (std::size_t b : bs) row.push_back(E.identity_atom[b]);
          rows.push_back(std::move(row));
        }
      std::size_t i = 0;
      while (i < bs.size() && ++bs[i] == m) bs[i++] = 0;
      if (i == bs.size()) break;
    }
    for (auto& r : rows) p.tuples.insert(p.tuples.end(), r.begin(), r.end());
    p.normalize();
    E.P.push_back(std::move(p));
  }

  E.composition.tuples.clear();
  E.inverse.tuples.clear();
  std::vector<std::vector<AtomId>> by_dom(m);
  for (AtomId a = 0; a < E.atoms.size(); ++a) by_dom[E.atoms[a].dom].push_back(a);
  for (AtomId x = 0; x < E.atoms.size(); ++x) {
    const Atom& ax = E.atoms[x];
    const auto& kx = E.nodes[ax.dom].points;
    const auto& ky = E.nodes[ax.cod].points;
    for (AtomId y : by_dom[ax.cod]) {
      const Atom& ay = E.atoms[y];
      std::vector<Point> img;
      for (Point v : ax.img) img.push_back(ay.img[std::lower_bound(ky.begin(), ky.end(), v) - ky.begin()]);
      auto z = E.find_atom(ax.dom, img);
      if (!z) throw std::logic_error("hat: composite is not an atom");
      E.composition.tuples.insert(E.composition.tuples.end(), {x, y, *z});
    }
    std::vector<Point> inv(kx.size());
    for (std::size_t i = 0; i < kx.size(); ++i) inv[std::lower_bound(ky.begin(), ky.end(), ax.img[i]) - ky.begin()] = kx[i];
    auto xi = E.find_atom(ax.cod, inv);
    if (!xi) throw std::logic_error("hat: inverse is not an atom");
    E.inverse.tuples.insert(E.inverse.tuples.end(), {x, *xi});
  }
  E.composition.normalize();
  E.inverse.normalize();

  E.P_L.clear();
  for (std::size_t i = 0; i < m; ++i) E.P_L[identify(aut_closed(w, E.nodes[i])).label()].push_back(E.identity_atom[i]);
  E.hat = true;
}

inline RelStructure OrbitalStructure::relational() const {
  RelStructure r;
  r.n = atoms.size();
  Relation u{"U", 1, {}}, dom{"Dom", 2, {}}, cod{"Cod", 2, {}};
  for (AtomId a = 0; a < atoms.size(); ++a) {
    if (unary[a]) u.tuples.push_back(a);
    dom.tuples.insert(dom.tuples.end(), {a, identity_atom[atoms[a].dom]});
    cod.tuples.insert(cod.tuples.end(), {a, identity_atom[atoms[a].cod]});
  }
  r.relations = {u, dom, cod};
  for (const auto& e : E) r.relations.push_back(e);
  if (hat) {
    for (const auto& p : P) r.relations.push_back(p);
    r.relations.push_back(composition);
    r.relations.push_back(inverse);
    for (const auto& [label, ids] : P_L) {
      Relation pl{"PL:" + label, 1, ids};
      pl.normalize();
      r.relations.push_back(std::move(pl));
    }
  }
  for (auto& rel : r.relations) rel.normalize();
  return r;
}

// Atom permutation induced by a window automorphism: (K, p, K') -> (gK, g p g^-1, gK').
inline std::vector<AtomId> induced_atom_map(const OrbitalStructure& E, const Permutation& g) {
  std::vector<AtomId> out(E.atoms.size());
  for (AtomId a = 0; a < E.atoms.size(); ++a) {
    const auto& pts = E.nodes[E.atoms[a].dom].points;
    std::vector<Point> gd;
    for (Point p : pts) gd.push_back(g(p));
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return gd[x] < gd[y]; });
    std::vector<Point> dom_pts, img;
    for (std::size_t i : order) {
      dom_pts.push_back(gd[i]);
      img.push_back(g(E.atoms[a].img[i]));
    }
    auto node = E.find_node(dom_pts);
    if (!node) throw std::invalid_argument("induced_atom_map: permutation does not preserve the level set");
    auto id = E.find_atom(*node, img);
    if (!id) throw std::invalid_argument("induced_atom_map: image is not an atom");
    out[a] = *id;
  }
  return out;
}

namespace detail {

// Orderings of a node's generators that give the same orbit test (every choice of generating tuple).
inline std::vector<std::vector<Point>> generator_choices(const Window& w, const ClosedSet& k) {
  std::vector<std::vector<Point>> out;
  if (w.linear()) {
    std::vector<Point> basis = greedy_basis(w, k.points);
    for (auto& img : closed_isos(w, k, k)) {
      std::vector<Point> b;
      for (Point p : basis) b.push_back(img[std::lower_bound(k.points.begin(), k.points.end(), p) - k.points.begin()]);
      out.push_back(std::move(b));
    }
  } else {
    std::vector<Point> p = k.points;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Number of orbits of the natural automorphism action on n-tuples of atoms.
inline std::size_t orbit_counts(const OrbitalStructure& E, int n, Budget* budget = nullptr) {
  if (n < 1 || n > std::max(E.n_max, 2)) throw std::invalid_argument("orbit_counts: arity out of range");
  const Window& w = *E.window;
  const std::size_t N = E.atoms.size();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= N;
  std::vector<AtomId> t(n, 0);
  auto advance = [&] {
    int i = n - 1;
    while (i >= 0 && ++t[i] == N) t[i--] = 0;
    return i >= 0;
  };
  if (N == 0) return 0;

  if (w.explicit_kind()) {
    std::vector<std::vector<AtomId>> gmaps;
    for (const auto& g : w.explicit_aut->generators()) gmaps.push_back(induced_atom_map(E, g));
    detail::UnionFind uf(total);
    auto code = [&](const std::vector<AtomId>& v) {
      std::size_t c = 0;
      for (AtomId x : v) c = c * N + x;
      return c;
    };
    do {
      for (const auto& gm : gmaps) {
        std::vector<AtomId> im(n);
        for (int i = 0; i < n; ++i) im[i] = gm[t[i]];
        uf.unite(code(t), code(im));
      }
    } while (advance());
    std::size_t roots = 0;
    for (std::size_t i = 0; i < total; ++i)
      if (uf.find(i) == i) ++roots;
    return roots;
  }

  // key of a tuple: least orbit key over every choice of generating tuples for its domains
  std::vector<std::vector<std::vector<Point>>> choices(E.nodes.size());
  auto key_of = [&](const std::vector<AtomId>& tup) {
    if (budget) budget->tick();
    std::vector<std::size_t> doms;
    for (AtomId x : tup)
      if (std::find(doms.begin(), doms.end(), E.atoms[x].dom) == doms.end()) doms.push_back(E.atoms[x].dom);
    for (std::size_t d : doms)
      if (choices[d].empty()) choices[d] = detail::generator_choices(w, E.nodes[d]);
    std::vector<std::size_t> sel(doms.size(), 0);
    std::optional<std::vector<int>> best;
    for (;;) {
      std::vector<Point> flat;
      for (AtomId x : tup) {
        const Atom& a = E.atoms[x];
        const auto& pts = E.nodes[a.dom].points;
        const auto& ch = choices[a.dom][sel[std::find(doms.begin(), doms.end(), a.dom) - doms.begin()]];
        for (Point p : ch) flat.push_back(p);
        for (Point p : ch) flat.push_back(a.img[std::lower_bound(pts.begin(), pts.end(), p) - pts.begin()]);
      }
      auto key = orbit_key(w, {}, flat);
      if (!best || key < *best) best = std::move(key);
      std::size_t i = 0;
      while (i < sel.size() && ++sel[i] == choices[doms[i]].size()) sel[i++] = 0;
      if (i == sel.size()) break;
    }
    return std::move(*best);
  };

  std::unordered_set<std::vector<int>, boost::hash<std::vector<int>>> keys;
  if (!w.linear()) {
    // binary windows are not homogeneous, so every tuple is visited
    do keys.insert(key_of(t));
    while (advance());
    return keys.size();
  }

  // vector-space windows carry the full linear group: one representative per orbit of single atoms suffices
  std::vector<AtomId> reps;
  for (AtomId x = 0; x < N; ++x)
    if (keys.insert(key_of({x})).second) reps.push_back(x);
  if (n == 1) return keys.size();

  // every orbit of n-tuples meets a tuple whose first entry is a representative
  keys.clear();
  std::vector<AtomId> rest(n - 1, 0);
  for (AtomId r : reps) {
    std::fill(rest.begin(), rest.end(), 0);
    for (;;) {
      t[0] = r;
      std::copy(rest.begin(), rest.end(), t.begin() + 1);
      keys.insert(key_of(t));
      int i = n - 2;
      while (i >= 0 && ++rest[i] == N) rest[i--] = 0;
      if (i < 0) break;
    }
  }
  return keys.size();
}

inline nlohmann::json to_json(const OrbitalStructure& E) {
  nlohmann::json j;
  j["k"] = E.k;
  j["n_max"] = E.n_max;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : E.nodes) j["nodes"].push_back(n.points);
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : E.atoms) j["atoms"].push_back({{"dom", a.dom}, {"cod", a.cod}, {"img", a.img}});
  auto rs = E.relational();
  j["relations"] = nlohmann::json::object();
  for (const auto& r : rs.relations) j["relations"][r.name] = {{"arity", r.arity}, {"tuples", r.tuples}};
  return j;
}

}  // namespace oligo
