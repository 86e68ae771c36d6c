// Finite permutation groups: deterministic Schreier-Sims, orbits, stabilizers.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "oligo/budget.hpp"

namespace oligo {

using BigInt = boost::multiprecision::cpp_int;
using Point = int;

inline std::string to_string(const BigInt& v) { return v.str(); }

// A bijection of {0..n-1}. Products compose right to left: (a * b)(x) = a(b(x)).
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<Point> images) : img_(std::move(images)) {
    std::vector<char> seen(img_.size(), 0);
    for (Point p : img_) {
      if (p < 0 || static_cast<std::size_t>(p) >= img_.size() || seen[p])
        throw std::invalid_argument("permutation: image array is not a bijection");
      seen[p] = 1;
    }
  }

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.img_.resize(n);
    std::iota(p.img_.begin(), p.img_.end(), 0);
    return p;
  }

  static Permutation from_cycles(std::size_t n, const std::vector<std::vector<Point>>& cycles) {
    Permutation p = identity(n);
    std::vector<char> used(n, 0);
    for (const auto& c : cycles) {
      for (Point x : c) {
        if (x < 0 || static_cast<std::size_t>(x) >= n)
          throw std::invalid_argument("permutation: cycle point out of range");
        if (used[x]) throw std::invalid_argument("permutation: point repeated in cycles");
        used[x] = 1;
      }
      for (std::size_t i = 0; i < c.size(); ++i) p.img_[c[i]] = c[(i + 1) % c.size()];
    }
    return p;
  }

  // Accepts "(0 1 2)(3 4)", "()" or "" for the identity; commas are allowed as separators.
  static Permutation parse_cycles(std::size_t n, std::string_view text) {
    std::vector<std::vector<Point>> cycles;
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == ',' || text[i] == '\t')) ++i;
    };
    skip_ws();
    while (i < text.size()) {
      if (text[i] != '(') throw std::invalid_argument("cycle notation: expected '('");
      ++i;
      std::vector<Point> cyc;
      for (;;) {
        skip_ws();
        if (i >= text.size()) throw std::invalid_argument("cycle notation: unterminated cycle");
        if (text[i] == ')') {
          ++i;
          break;
        }
        if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("cycle notation: bad point");
        long v = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') v = v * 10 + (text[i++] - '0');
        cyc.push_back(static_cast<Point>(v));
      }
      if (!cyc.empty()) cycles.push_back(std::move(cyc));
      skip_ws();
    }
    return from_cycles(n, cycles);
  }

  std::size_t degree() const { return img_.size(); }
  Point operator()(Point x) const { return img_[x]; }
  const std::vector<Point>& images() const { return img_; }

  Permutation operator*(const Permutation& rhs) const {
    if (rhs.degree() != degree()) throw std::invalid_argument("permutation: degree mismatch");
    Permutation r;
    r.img_.resize(img_.size());
    for (std::size_t x = 0; x < img_.size(); ++x) r.img_[x] = img_[rhs.img_[x]];
    return r;
  }

  Permutation inverse() const {
    Permutation r;
    r.img_.resize(img_.size());
    for (std::size_t x = 0; x < img_.size(); ++x) r.img_[img_[x]] = static_cast<Point>(x);
    return r;
  }

  bool is_identity() const {
    for (std::size_t x = 0; x < img_.size(); ++x)
      if (img_[x] != static_cast<Point>(x)) return false;
    return true;
  }

  // Smallest moved point, or -1.
  Point first_moved() const {
    for (std::size_t x = 0; x < img_.size(); ++x)
      if (img_[x] != static_cast<Point>(x)) return static_cast<Point>(x);
    return -1;
  }

  std::string to_cycles() const {
    std::string out;
    std::vector<char> seen(img_.size(), 0);
    for (std::size_t s = 0; s < img_.size(); ++s) {
      if (seen[s] || img_[s] == static_cast<Point>(s)) continue;
      out += '(';
      Point x = static_cast<Point>(s);
      bool first = true;
      while (!seen[x]) {
        seen[x] = 1;
        if (!first) out += ' ';
        out += std::to_string(x);
        first = false;
        x = img_[x];
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.img_ <=> b.img_; }

 private:
  std::vector<Point> img_;
};

// Permutation group stored as a base and strong generating set.
class PermGroup {
 public:
  PermGroup() = default;

  // Trivial group of the given degree.
  explicit PermGroup(std::size_t degree) : degree_(degree) {}

  PermGroup(std::size_t degree, std::vector<Permutation> gens, std::vector<Point> base_prefix = {})
      : degree_(degree) {
    for (const auto& g : gens)
      if (g.degree() != degree) throw std::invalid_argument("group: generator degree mismatch");
    for (Point b : base_prefix)
      if (b < 0 || static_cast<std::size_t>(b) >= degree)
        throw std::invalid_argument("group: base point out of range");
    for (auto& g : gens)
      if (!g.is_identity() && std::find(gens_.begin(), gens_.end(), g) == gens_.end())
        gens_.push_back(g);
    build(base_prefix);
  }

  std::size_t degree() const { return degree_; }
  const std::vector<Permutation>& generators() const { return gens_; }
  const std::vector<Point>& base() const { return base_; }
  const std::vector<Permutation>& strong_generators() const { return strong_; }

  BigInt order() const {
    BigInt o = 1;
    for (const auto& lv : levels_) o *= static_cast<unsigned>(lv.orbit.size());
    return o;
  }

  bool is_trivial() const { return strong_.empty(); }

  // Fundamental orbit of base point i.
  const std::vector<Point>& basic_orbit(std::size_t i) const { return levels_[i].orbit; }

  // Transversal element u with u(base[i]) == x, if x lies in the basic orbit.
  std::optional<Permutation> transversal(std::size_t i, Point x) const {
    const auto& lv = levels_[i];
    if (lv.index[x] < 0) return std::nullopt;
    return lv.trans[lv.index[x]];
  }

  bool contains(const Permutation& p) const {
    if (p.degree() != degree_) return false;
    auto [res, lvl] = sift(p);
    return lvl == levels_.size() && res.is_identity();
  }

  bool is_subgroup_of(const PermGroup& h) const {
    if (h.degree() != degree_) return false;
    for (const auto& g : gens_)
      if (!h.contains(g)) return false;
    return true;
  }

  friend bool operator==(const PermGroup& a, const PermGroup& b) {
    return a.degree_ == b.degree_ && a.order() == b.order() && a.is_subgroup_of(b);
  }

  // Strong generators fixing base[0..i-1] pointwise.
  std::vector<Permutation> level_generators(std::size_t i) const {
    std::vector<Permutation> r;
    for (const auto& s : strong_) {
      bool fixes = true;
      for (std::size_t j = 0; j < i && j < base_.size(); ++j)
        if (s(base_[j]) != base_[j]) {
          fixes = false;
          break;
        }
      if (fixes) r.push_back(s);
    }
    return r;
  }

  // All elements, in sorted order. Only for small groups.
  std::vector<Permutation> elements(std::size_t cap = 1000000) const {
    if (order() > cap) throw BudgetExceeded("group: too many elements to enumerate");
    std::vector<Permutation> out{Permutation::identity(degree_)};
    for (std::size_t i = levels_.size(); i-- > 0;) {
      std::vector<Permutation> next;
      next.reserve(out.size() * levels_[i].trans.size());
      for (const auto& u : levels_[i].trans)
        for (const auto& e : out) next.push_back(u * e);
      out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Some element whose images of base[0..k-1] are the given points, if one exists.
  std::optional<Permutation> element_with_base_images(const std::vector<Point>& imgs) const {
    Permutation g = Permutation::identity(degree_);
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      // need h with g(h(base_i)) = imgs[i]; h ranges over level i transversal
      Point want = g.inverse()(imgs[i]);
      auto u = transversal(i, want);
      if (!u) return std::nullopt;
      g = g * *u;
    }
    return g;
  }

 private:
  struct Level {
    std::vector<Point> orbit;
    std::vector<int> index;  // point -> slot in orbit/trans, or -1
    std::vector<Permutation> trans;
  };

  std::size_t degree_ = 0;
  std::vector<Permutation> gens_;
  std::vector<Point> base_;
  std::vector<Permutation> strong_;
  std::vector<Level> levels_;

  bool fixes_prefix(const Permutation& s, std::size_t i) const {
    for (std::size_t j = 0; j < i; ++j)
      if (s(base_[j]) != base_[j]) return false;
    return true;
  }

  void compute_level(std::size_t i) {
    Level lv;
    lv.index.assign(degree_, -1);
    Point b = base_[i];
    lv.orbit.push_back(b);
    lv.index[b] = 0;
    lv.trans.push_back(Permutation::identity(degree_));
    std::vector<Permutation> gens = level_generators(i);
    for (std::size_t k = 0; k < lv.orbit.size(); ++k) {
      Point x = lv.orbit[k];
      for (const auto& s : gens) {
        Point y = s(x);
        if (lv.index[y] < 0) {
          lv.index[y] = static_cast<int>(lv.orbit.size());
          lv.orbit.push_back(y);
          lv.trans.push_back(s * lv.trans[k]);
        }
      }
    }
    if (levels_.size() <= i) levels_.resize(i + 1);
    levels_[i] = std::move(lv);
  }

  // Strip p through levels from `from`; returns residue and the level where it stopped.
  std::pair<Permutation, std::size_t> sift(Permutation p, std::size_t from = 0) const {
    for (std::size_t i = from; i < levels_.size(); ++i) {
      Point x = p(base_[i]);
      int slot = levels_[i].index[x];
      if (slot < 0) return {p, i};
      p = levels_[i].trans[slot].inverse() * p;
    }
    return {p, levels_.size()};
  }

  void build(const std::vector<Point>& base_prefix) {
    for (Point b : base_prefix)
      if (std::find(base_.begin(), base_.end(), b) == base_.end()) base_.push_back(b);
    for (const auto& g : gens_) {
      if (fixes_prefix(g, base_.size())) base_.push_back(g.first_moved());
      strong_.push_back(g);
    }
    levels_.clear();
    for (std::size_t i = 0; i < base_.size(); ++i) compute_level(i);

    // Deterministic Schreier-Sims: verify levels from the bottom up, restarting
    // at the level where a new strong generator was inserted.
    std::size_t i = base_.size();
    while (i > 0) {
      std::size_t lvl = i - 1;
      bool added = false;
      const std::vector<Permutation> gens = level_generators(lvl);
      const Level& lv = levels_[lvl];
      for (std::size_t k = 0; !added && k < lv.orbit.size(); ++k) {
        for (const auto& s : gens) {
          Point y = s(lv.orbit[k]);
          Permutation h = levels_[lvl].trans[levels_[lvl].index[y]].inverse() * s * levels_[lvl].trans[k];
          if (h.is_identity()) continue;
          auto [res, stop] = sift(h, lvl + 1);
          if (stop == levels_.size() && res.is_identity()) continue;
          if (stop == levels_.size()) {
            base_.push_back(res.first_moved());
            levels_.emplace_back();
          }
          strong_.push_back(res);
          for (std::size_t j = lvl + 1; j <= stop; ++j) compute_level(j);
          i = stop + 1;
          added = true;
          break;
        }
      }
      if (!added) --i;
    }
  }
};

inline void check_point(const PermGroup& g, Point p) {
  if (p < 0 || static_cast<std::size_t>(p) >= g.degree())
    throw std::out_of_range("point " + std::to_string(p) + " out of range");
}

inline PermGroup group_from_generators(std::size_t degree, const std::vector<Permutation>& gens) {
  return PermGroup(degree, gens);
}

inline PermGroup group_from_generators(const std::vector<Permutation>& gens) {
  if (gens.empty()) throw std::invalid_argument("group: degree unknown for empty generator list");
  return PermGroup(gens.front().degree(), gens);
}

// Orbit of a tuple under componentwise action, sorted.
inline std::vector<std::vector<Point>> orbit(const PermGroup& g, const std::vector<Point>& pts) {
  for (Point p : pts) check_point(g, p);
  std::set<std::vector<Point>> seen{pts};
  std::vector<std::vector<Point>> queue{pts};
  for (std::size_t k = 0; k < queue.size(); ++k) {
    for (const auto& s : g.generators()) {
      std::vector<Point> t(queue[k].size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = s(queue[k][i]);
      if (seen.insert(t).second) queue.push_back(std::move(t));
    }
  }
  return {seen.begin(), seen.end()};
}

// Orbits of single points, each sorted, listed by smallest element.
inline std::vector<std::vector<Point>> point_orbits(std::size_t degree, const std::vector<Permutation>& gens) {
  std::vector<int> comp(degree, -1);
  std::vector<std::vector<Point>> out;
  for (std::size_t s = 0; s < degree; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Point> orb{static_cast<Point>(s)};
    comp[s] = static_cast<int>(out.size());
    for (std::size_t k = 0; k < orb.size(); ++k)
      for (const auto& g : gens) {
        Point y = g(orb[k]);
        if (comp[y] < 0) {
          comp[y] = static_cast<int>(out.size());
          orb.push_back(y);
        }
      }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

inline std::vector<Point> sorted_unique(std::vector<Point> a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

inline PermGroup pointwise_stabilizer(const PermGroup& g, const std::vector<Point>& a_in) {
  for (Point p : a_in) check_point(g, p);
  std::vector<Point> a = sorted_unique(a_in);
  if (a.empty()) return g;
  PermGroup h(g.degree(), g.strong_generators(), a);
  return PermGroup(g.degree(), h.level_generators(a.size()));
}

// Setwise stabilizer by backtracking over images of the points of A along a base
// beginning with A. Leaves already in the subgroup found so far are skipped. While the
// prefix images are still the base points themselves, candidates are pruned by orbits
// of the found subgroup's stabilizer of that prefix.
inline PermGroup setwise_stabilizer(const PermGroup& g, const std::vector<Point>& a_in, Budget* budget = nullptr) {
  for (Point p : a_in) check_point(g, p);
  std::vector<Point> a = sorted_unique(a_in);
  if (a.empty() || a.size() == g.degree()) return g;
  PermGroup chain(g.degree(), g.strong_generators(), a);
  std::vector<char> in_a(g.degree(), 0);
  for (Point p : a) in_a[p] = 1;

  const std::size_t m = a.size();
  const std::vector<Point> base(chain.base().begin(), chain.base().begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<Permutation> found = chain.level_generators(m);
  // sharing the search base makes prefix stabilizers of `current` free
  PermGroup current(g.degree(), found, base);

  std::function<void(const Permutation&, std::size_t, bool)> search = [&](const Permutation& elt, std::size_t depth,
                                                                          bool identity_branch) {
    if (budget) budget->tick();
    if (depth == m) {
      if (!current.contains(elt)) {
        found.push_back(elt);
        current = PermGroup(g.degree(), found, base);
      }
      return;
    }
    std::vector<char> done;
    std::vector<std::vector<Point>> orbs;
    std::size_t orbs_version = 0;
    if (identity_branch) done.assign(g.degree(), 0);
    for (Point x : chain.basic_orbit(depth)) {
      if (!in_a[elt(x)]) continue;
      if (identity_branch) {
        // elt is the identity here, so x is also the image of base[depth]
        if (orbs.empty() || orbs_version != found.size()) {
          orbs = point_orbits(g.degree(), current.level_generators(depth));
          orbs_version = found.size();
        }
        bool pruned = false;
        for (const auto& orb : orbs) {
          if (!std::binary_search(orb.begin(), orb.end(), x)) continue;
          for (Point q : orb)
            if (done[q]) pruned = true;
          break;
        }
        done[x] = 1;
        if (pruned) continue;
      }
      search(elt * *chain.transversal(depth, x), depth + 1, identity_branch && x == base[depth]);
    }
  };
  search(Permutation::identity(g.degree()), 0, true);
  return PermGroup(g.degree(), found);
}

inline PermGroup subgroup_join(const PermGroup& g, const PermGroup& h1, const PermGroup& h2) {
  if (h1.degree() != g.degree() || h2.degree() != g.degree())
    throw std::invalid_argument("join: degree mismatch");
  std::vector<Permutation> gens;
  for (const auto* h : {&h1, &h2})
    for (const auto& x : h->generators()) {
      if (!g.contains(x)) throw std::invalid_argument("join: generator not in ambient group");
      gens.push_back(x);
    }
  return PermGroup(g.degree(), gens);
}

struct NormalIndex {
  bool normal = false;
  BigInt index = 0;
};

inline NormalIndex is_normal_finite_index(const PermGroup& h1, const PermGroup& h2) {
  if (!h1.is_subgroup_of(h2)) throw std::invalid_argument("normality: H1 is not a subgroup of H2");
  NormalIndex r;
  r.index = h2.order() / h1.order();
  r.normal = true;
  for (const auto& y : h2.generators()) {
    Permutation yi = y.inverse();
    for (const auto& x : h1.generators())
      if (!h1.contains(y * x * yi)) {
        r.normal = false;
        return r;
      }
  }
  return r;
}

// Restriction of a permutation fixing K setwise, as a permutation of K's slots.
inline Permutation restrict_to(const Permutation& p, const std::vector<Point>& k) {
  std::vector<Point> img(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    auto it = std::lower_bound(k.begin(), k.end(), p(k[i]));
    if (it == k.end() || *it != p(k[i])) throw std::invalid_argument("restriction: set not invariant");
    img[i] = static_cast<Point>(it - k.begin());
  }
  return Permutation(std::move(img));
}

struct RestrictionQuotient {
  std::vector<Point> points;  // sorted K; image acts on slot indices
  PermGroup setwise;
  PermGroup image;
  PermGroup kernel;
};

inline RestrictionQuotient restriction_quotient(const PermGroup& g, const std::vector<Point>& k_in,
                                                Budget* budget = nullptr) {
  for (Point p : k_in) check_point(g, p);
  RestrictionQuotient r;
  r.points = sorted_unique(k_in);
  r.setwise = setwise_stabilizer(g, r.points, budget);
  std::vector<Permutation> imgs;
  for (const auto& s : r.setwise.generators()) imgs.push_back(restrict_to(s, r.points));
  r.image = PermGroup(r.points.size(), imgs);
  r.kernel = pointwise_stabilizer(r.setwise, r.points);
  return r;
}

}  // namespace oligo
