// Canonical labeling of relational structures: color refinement plus individualization,
// with automorphism pruning. Leaves are ranked by a 128-bit order-independent certificate,
// ties broken by the full relabeled encoding.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "oligo/budget.hpp"
#include "oligo/digest.hpp"
#include "oligo/orbital.hpp"
#include "oligo/permgroup.hpp"

namespace oligo {

struct CanonOptions {
  // Relations of arity >= 3 with more tuples than this are left out of refinement
  // (they still enter certificates and automorphism checks).
  std::size_t refine_tuple_limit = 300000;
  Budget* budget = nullptr;
};

struct CanonResult {
  std::vector<AtomId> label;  // vertex -> canonical position
  std::array<std::uint64_t, 2> certificate{};
  std::vector<Permutation> automorphisms;  // generators found during the search
  std::size_t nodes = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Membership oracle for one relation under relabeling checks.
class RelIndex {
 public:
  RelIndex(const Relation& r, std::size_t n) : rel_(r), n_(n) {
    double cells = 1;
    for (int i = 0; i < r.arity; ++i) cells *= static_cast<double>(n);
    if (cells <= static_cast<double>(1ULL << 31)) {
      bits_.assign((static_cast<std::size_t>(cells) + 63) / 64, 0);
      for (std::size_t t = 0; t < r.size(); ++t) {
        std::size_t c = code(&r.tuples[t * r.arity]);
        bits_[c >> 6] |= 1ULL << (c & 63);
      }
      dense_ = true;
    }
  }
  bool contains(const AtomId* t) const {
    if (dense_) {
      std::size_t c = code(t);
      return bits_[c >> 6] >> (c & 63) & 1ULL;
    }
    return rel_.contains(t);
  }

 private:
  const Relation& rel_;
  std::size_t n_;
  bool dense_ = false;
  std::vector<std::uint64_t> bits_;
  std::size_t code(const AtomId* t) const {
    std::size_t c = 0;
    for (int i = 0; i < rel_.arity; ++i) c = c * n_ + t[i];
    return c;
  }
};

class Canonizer {
 public:
  Canonizer(const RelStructure& s, const CanonOptions& opt) : s_(s), opt_(opt), n_(s.n) {
    for (std::size_t r = 0; r < s.relations.size(); ++r) {
      const auto& rel = s.relations[r];
      index_.emplace_back(rel, n_);
      if (rel.arity >= 3 && rel.size() > opt.refine_tuple_limit) continue;
      refine_rel_.push_back(r);
    }
    // incidence lists for refinement: (relation slot, tuple index, position)
    inc_start_.assign(n_ + 1, 0);
    for (std::size_t r : refine_rel_) {
      const auto& rel = s.relations[r];
      for (std::size_t i = 0; i < rel.tuples.size(); ++i) ++inc_start_[rel.tuples[i] + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) inc_start_[v + 1] += inc_start_[v];
    inc_.resize(inc_start_[n_]);
    std::vector<std::size_t> fill(inc_start_.begin(), inc_start_.end() - 1);
    for (std::size_t r : refine_rel_) {
      const auto& rel = s.relations[r];
      for (std::size_t t = 0; t < rel.size(); ++t)
        for (int p = 0; p < rel.arity; ++p) inc_[fill[rel.tuples[t * rel.arity + p]]++] = {r, t, p};
    }
  }

  CanonResult run() {
    CanonResult res;
    std::vector<std::uint32_t> colors(n_, 0);
    refine(colors);
    std::vector<AtomId> prefix;
    if (n_ > 0) search(colors, prefix);
    res.label = best_label_;
    res.certificate = best_cert_;
    res.automorphisms = autos_;
    res.nodes = nodes_;
    return res;
  }

 private:
  struct Inc {
    std::size_t rel, tuple;
    int pos;
  };
  const RelStructure& s_;
  CanonOptions opt_;
  std::size_t n_;
  std::vector<RelIndex> index_;
  std::vector<std::size_t> refine_rel_;
  std::vector<std::size_t> inc_start_;
  std::vector<Inc> inc_;

  std::vector<AtomId> first_label_, best_label_;
  std::array<std::uint64_t, 2> first_cert_{}, best_cert_{};
  bool have_leaf_ = false;
  std::vector<Permutation> autos_;
  std::size_t nodes_ = 0;

  static std::size_t count_colors(const std::vector<std::uint32_t>& c) {
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
  }

  // Re-rank vertices by (old color, signature) until the partition is stable.
  void refine(std::vector<std::uint32_t>& colors) const {
    std::size_t k = count_colors(colors);
    std::vector<std::array<std::uint64_t, 3>> key(n_);
    std::vector<std::size_t> order(n_);
    for (;;) {
      for (std::size_t v = 0; v < n_; ++v) {
        std::uint64_t a = 0, b = 0;
        for (std::size_t i = inc_start_[v]; i < inc_start_[v + 1]; ++i) {
          const Inc& in = inc_[i];
          const auto& rel = s_.relations[in.rel];
          std::uint64_t h = mix64(in.rel * 131 + static_cast<std::uint64_t>(in.pos));
          for (int p = 0; p < rel.arity; ++p) h = mix64(h ^ (colors[rel.tuples[in.tuple * rel.arity + p]] + 0x51ULL * p));
          a += h;
          b += mix64(h ^ 0xabcdefULL);
        }
        key[v] = {colors[v], a, b};
      }
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });
      std::uint32_t c = 0;
      std::vector<std::uint32_t> next(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        if (i > 0 && key[order[i]] != key[order[i - 1]]) ++c;
        next[order[i]] = c;
      }
      std::size_t nk = n_ ? c + 1 : 0;
      colors.swap(next);
      if (nk == k) return;
      k = nk;
    }
  }

  std::array<std::uint64_t, 2> certificate(const std::vector<AtomId>& lab) const {
    std::uint64_t a = 0, b = 0;
    for (std::size_t r = 0; r < s_.relations.size(); ++r) {
      const auto& rel = s_.relations[r];
      for (std::size_t t = 0; t < rel.size(); ++t) {
        std::uint64_t h = mix64(0x1234567ULL + r);
        for (int p = 0; p < rel.arity; ++p) h = mix64(h ^ lab[rel.tuples[t * rel.arity + p]]);
        a += h;
        b += mix64(h ^ 0x5555ULL);
      }
      a = mix64(a + r);
      b = mix64(b ^ (r + 1));
    }
    return {a, b};
  }

  std::vector<std::vector<AtomId>> encoding(const std::vector<AtomId>& lab) const {
    std::vector<std::vector<AtomId>> out;
    for (const auto& rel : s_.relations) {
      std::vector<std::vector<AtomId>> rows(rel.size());
      for (std::size_t t = 0; t < rel.size(); ++t)
        for (int p = 0; p < rel.arity; ++p) rows[t].push_back(lab[rel.tuples[t * rel.arity + p]]);
      std::sort(rows.begin(), rows.end());
      std::vector<AtomId> flat;
      for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
      out.push_back(std::move(flat));
    }
    return out;
  }

  bool is_automorphism(const std::vector<AtomId>& g) const {
    std::vector<AtomId> t;
    for (std::size_t r = 0; r < s_.relations.size(); ++r) {
      const auto& rel = s_.relations[r];
      t.resize(rel.arity);
      for (std::size_t i = 0; i < rel.size(); ++i) {
        for (int p = 0; p < rel.arity; ++p) t[p] = g[rel.tuples[i * rel.arity + p]];
        if (!index_[r].contains(t.data())) return false;
      }
    }
    return true;
  }

  // g with lab_b(g(v)) = lab_a(v)
  std::vector<AtomId> transfer(const std::vector<AtomId>& lab_a, const std::vector<AtomId>& lab_b) const {
    std::vector<AtomId> inv_b(n_), g(n_);
    for (std::size_t v = 0; v < n_; ++v) inv_b[lab_b[v]] = static_cast<AtomId>(v);
    for (std::size_t v = 0; v < n_; ++v) g[v] = inv_b[lab_a[v]];
    return g;
  }

  void record_automorphism(const std::vector<AtomId>& g) {
    std::vector<Point> img(g.begin(), g.end());
    Permutation p(img);
    if (p.is_identity()) return;
    autos_.push_back(p);
  }

  void leaf(const std::vector<std::uint32_t>& colors) {
    std::vector<AtomId> lab(colors.begin(), colors.end());
    auto cert = certificate(lab);
    if (!have_leaf_) {
      have_leaf_ = true;
      first_label_ = best_label_ = lab;
      first_cert_ = best_cert_ = cert;
      return;
    }
    for (const auto* ref : {&first_label_, &best_label_}) {
      const auto& rc = ref == &first_label_ ? first_cert_ : best_cert_;
      if (cert != rc) continue;
      auto g = transfer(*ref, lab);
      if (is_automorphism(g)) {
        record_automorphism(g);
        return;
      }
    }
    bool better = cert < best_cert_;
    if (cert == best_cert_) better = encoding(lab) < encoding(best_label_);
    if (better) {
      best_label_ = lab;
      best_cert_ = cert;
    }
  }

  void search(const std::vector<std::uint32_t>& colors, std::vector<AtomId>& prefix) {
    ++nodes_;
    if (opt_.budget) opt_.budget->tick();
    std::size_t k = count_colors(colors);
    if (k == n_) {
      leaf(colors);
      return;
    }
    // smallest non-singleton cell, lowest color first
    std::vector<std::size_t> size(k, 0);
    for (auto c : colors) ++size[c];
    std::size_t target = k;
    for (std::size_t c = 0; c < k; ++c)
      if (size[c] > 1 && (target == k || size[c] < size[target])) target = c;
    std::vector<AtomId> cell;
    for (std::size_t v = 0; v < n_; ++v)
      if (colors[v] == target) cell.push_back(static_cast<AtomId>(v));

    std::vector<AtomId> explored;
    for (AtomId v : cell) {
      if (!explored.empty() && !autos_.empty()) {
        // skip v if an automorphism fixing the prefix maps an explored child to it
        std::vector<Point> base(prefix.begin(), prefix.end());
        PermGroup g(n_, autos_, base);
        auto gens = g.level_generators(base.size());
        auto orbs = point_orbits(n_, gens);
        bool skip = false;
        for (const auto& o : orbs)
          if (std::binary_search(o.begin(), o.end(), static_cast<Point>(v))) {
            for (AtomId e : explored)
              if (std::binary_search(o.begin(), o.end(), static_cast<Point>(e))) skip = true;
            break;
          }
        if (skip) continue;
      }
      std::vector<std::uint32_t> child(n_);
      for (std::size_t u = 0; u < n_; ++u) child[u] = colors[u] * 2 + (u == v ? 0 : 1);
      // compact ranks
      std::vector<std::uint32_t> vals(child);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (auto& c : child) c = static_cast<std::uint32_t>(std::lower_bound(vals.begin(), vals.end(), c) - vals.begin());
      refine(child);
      prefix.push_back(v);
      search(child, prefix);
      prefix.pop_back();
      explored.push_back(v);
    }
  }
};

}  // namespace detail

inline CanonResult canonical_labeling(const RelStructure& s, const CanonOptions& opt = {}) {
  detail::Canonizer c(s, opt);
  return c.run();
}

// SHA-256 of the relabeled structure: relation names, arities and sorted relabeled tuples.
inline std::string canonical_digest(const RelStructure& s, const std::vector<AtomId>& label) {
  Sha256 h;
  h.update("oligo-canon-v1");
  h.update_u32(static_cast<std::uint32_t>(s.n));
  for (const auto& rel : s.relations) {
    h.update(rel.name);
    h.update_u32(static_cast<std::uint32_t>(rel.arity));
    h.update_u32(static_cast<std::uint32_t>(rel.size()));
    if (rel.arity == 0) continue;
    std::vector<std::uint64_t> rows;
    bool packed = rel.arity <= 3 && s.n < (1u << 21);
    if (packed) {
      rows.reserve(rel.size());
      for (std::size_t t = 0; t < rel.size(); ++t) {
        std::uint64_t c = 0;
        for (int p = 0; p < rel.arity; ++p) c = (c << 21) | label[rel.tuples[t * rel.arity + p]];
        rows.push_back(c);
      }
      std::sort(rows.begin(), rows.end());
      for (std::uint64_t c : rows)
        for (int p = rel.arity - 1; p >= 0; --p) h.update_u32(static_cast<std::uint32_t>((c >> (21 * p)) & ((1u << 21) - 1)));
    } else {
      std::vector<std::vector<AtomId>> r(rel.size());
      for (std::size_t t = 0; t < rel.size(); ++t)
        for (int p = 0; p < rel.arity; ++p) r[t].push_back(label[rel.tuples[t * rel.arity + p]]);
      std::sort(r.begin(), r.end());
      for (const auto& row : r)
        for (AtomId x : row) h.update_u32(x);
    }
  }
  return h.hex();
}

// Applies a vertex renaming (old -> new) to every relation.
inline RelStructure relabel(const RelStructure& s, const std::vector<AtomId>& perm) {
  RelStructure out;
  out.n = s.n;
  for (const auto& rel : s.relations) {
    Relation r{rel.name, rel.arity, {}};
    r.tuples.reserve(rel.tuples.size());
    for (AtomId x : rel.tuples) r.tuples.push_back(perm[x]);
    r.normalize();
    out.relations.push_back(std::move(r));
  }
  return out;
}

// True iff f (vertices of a -> vertices of b) maps every relation of a onto the same-named relation of b.
inline bool is_isomorphism(const RelStructure& a, const RelStructure& b, const std::vector<AtomId>& f) {
  if (a.n != b.n || a.relations.size() != b.relations.size() || f.size() != a.n) return false;
  std::vector<char> seen(a.n, 0);
  for (AtomId x : f) {
    if (x >= a.n || seen[x]) return false;
    seen[x] = 1;
  }
  for (std::size_t r = 0; r < a.relations.size(); ++r) {
    const auto& ra = a.relations[r];
    const auto& rb = b.relations[r];
    if (ra.name != rb.name || ra.arity != rb.arity || ra.size() != rb.size()) return false;
    detail::RelIndex idx(rb, b.n);
    std::vector<AtomId> t(ra.arity);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      for (int p = 0; p < ra.arity; ++p) t[p] = f[ra.tuples[i * ra.arity + p]];
      if (!idx.contains(t.data())) return false;
    }
  }
  return true;
}

}  // namespace oligo
