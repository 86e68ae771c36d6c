// Homogeneous-structure catalog: specs, finite windows, closure and orbit oracles.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oligo/autsearch.hpp"
#include "oligo/budget.hpp"
#include "oligo/gf.hpp"
#include "oligo/permgroup.hpp"

namespace oligo {

enum class Kind { pure_set, dlo, random_graph, henson, colored_graph, equivalence, vector_space, finite };

inline std::string kind_name(Kind k) {
  switch (k) {
    case Kind::pure_set: return "pure_set";
    case Kind::dlo: return "dlo";
    case Kind::random_graph: return "random_graph";
    case Kind::henson: return "henson";
    case Kind::colored_graph: return "colored_graph";
    case Kind::equivalence: return "equivalence";
    case Kind::vector_space: return "vector_space";
    case Kind::finite: return "finite";
  }
  return "?";
}

struct FiniteStructure {
  std::size_t domain_size = 0;
  std::vector<std::pair<std::string, int>> signature;
  std::map<std::string, std::set<std::vector<Point>>> relations;

  void validate() const {
    for (const auto& [name, arity] : signature) {
      auto it = relations.find(name);
      if (it == relations.end()) continue;
      for (const auto& t : it->second) {
        if (static_cast<int>(t.size()) != arity)
          throw std::invalid_argument("relation " + name + ": tuple arity mismatch");
        for (Point p : t)
          if (p < 0 || static_cast<std::size_t>(p) >= domain_size)
            throw std::invalid_argument("relation " + name + ": point out of range");
      }
    }
    for (const auto& [name, tuples] : relations) {
      bool known = false;
      for (const auto& s : signature) known = known || s.first == name;
      if (!known) throw std::invalid_argument("relation " + name + " missing from signature");
    }
  }

  // Induced substructure on `pts`, relabelled by position in `pts`.
  FiniteStructure induced(const std::vector<Point>& pts) const {
    FiniteStructure r;
    r.domain_size = pts.size();
    r.signature = signature;
    std::map<Point, Point> pos;
    for (std::size_t i = 0; i < pts.size(); ++i) pos[pts[i]] = static_cast<Point>(i);
    for (const auto& [name, tuples] : relations) {
      auto& out = r.relations[name];
      for (const auto& t : tuples) {
        std::vector<Point> u;
        for (Point p : t) {
          auto it = pos.find(p);
          if (it == pos.end()) break;
          u.push_back(it->second);
        }
        if (u.size() == t.size()) out.insert(u);
      }
    }
    return r;
  }
};

struct StructureSpec {
  Kind kind = Kind::pure_set;
  int param = 0;  // m for henson, colors, classes, or q
  std::shared_ptr<const FiniteStructure> finite;

  std::string name() const {
    switch (kind) {
      case Kind::henson:
      case Kind::colored_graph:
      case Kind::equivalence:
      case Kind::vector_space: return kind_name(kind) + "(" + std::to_string(param) + ")";
      case Kind::finite: return "finite(" + std::to_string(finite ? finite->domain_size : 0) + ")";
      default: return kind_name(kind);
    }
  }

  bool has_algebraicity() const { return kind == Kind::vector_space || kind == Kind::finite; }
  bool is_binary() const { return kind != Kind::vector_space && kind != Kind::finite; }

  void validate() const {
    switch (kind) {
      case Kind::henson:
        if (param < 3) throw std::invalid_argument("henson requires m >= 3");
        break;
      case Kind::colored_graph:
        if (param < 2) throw std::invalid_argument("colored_graph requires colors >= 2");
        if (param > 250) throw std::invalid_argument("colored_graph: too many colors");
        break;
      case Kind::equivalence:
        if (param < 2) throw std::invalid_argument("equivalence requires classes >= 2");
        break;
      case Kind::vector_space:
        if (!is_prime_power(param)) throw std::invalid_argument("vector_space requires q a prime power");
        break;
      case Kind::finite:
        if (!finite) throw std::invalid_argument("finite spec without structure");
        finite->validate();
        break;
      default: break;
    }
  }
};

inline StructureSpec make_spec(Kind k, int param = 0) {
  StructureSpec s;
  s.kind = k;
  s.param = param;
  s.validate();
  return s;
}

inline StructureSpec make_finite_spec(FiniteStructure fs) {
  StructureSpec s;
  s.kind = Kind::finite;
  s.finite = std::make_shared<const FiniteStructure>(std::move(fs));
  s.validate();
  return s;
}

// Binary kinds are complete graphs whose ordered pairs carry a colour from a palette.
inline int palette_size(const StructureSpec& s) {
  switch (s.kind) {
    case Kind::pure_set: return 1;
    case Kind::dlo:
    case Kind::random_graph:
    case Kind::henson:
    case Kind::equivalence: return 2;
    case Kind::colored_graph: return s.param;
    default: return 0;
  }
}

inline std::vector<int> palette_transpose(const StructureSpec& s) {
  std::vector<int> tr(palette_size(s));
  for (std::size_t i = 0; i < tr.size(); ++i) tr[i] = static_cast<int>(i);
  if (s.kind == Kind::dlo) tr = {1, 0};
  return tr;
}

inline std::vector<std::string> palette_names(const StructureSpec& s) {
  switch (s.kind) {
    case Kind::pure_set: return {"distinct"};
    case Kind::dlo: return {"<", ">"};
    case Kind::random_graph:
    case Kind::henson: return {"non-edge", "edge"};
    case Kind::equivalence: return {"same", "different"};
    case Kind::colored_graph: {
      std::vector<std::string> v;
      for (int i = 1; i <= s.param; ++i) v.push_back("C" + std::to_string(i));
      return v;
    }
    default: return {};
  }
}

inline constexpr std::uint8_t kNoColor = 255;

namespace age {

// Checks every configuration that involves point x and points < x.
// `col` is an n*n matrix; only entries among points <= x are read.
inline bool extension_ok(const StructureSpec& s, const std::vector<std::uint8_t>& col, std::size_t n, Point x) {
  auto c = [&](Point a, Point b) { return col[static_cast<std::size_t>(a) * n + b]; };
  switch (s.kind) {
    case Kind::dlo: {
      // colour 0 means a < b; transitivity through x
      for (Point a = 0; a < x; ++a)
        for (Point b = 0; b < x; ++b) {
          if (a == b) continue;
          if (c(a, x) == 0 && c(x, b) == 0 && c(a, b) != 0) return false;
          if (c(a, b) == 0 && c(b, x) == 0 && c(a, x) != 0) return false;
          if (c(x, a) == 0 && c(a, b) == 0 && c(x, b) != 0) return false;
        }
      return true;
    }
    case Kind::henson: {
      // no K_m through x: look for an (m-1)-clique among x's neighbours
      std::vector<Point> nb;
      for (Point a = 0; a < x; ++a)
        if (c(a, x) == 1) nb.push_back(a);
      const int need = s.param - 1;
      std::vector<Point> cur;
      std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
        if (static_cast<int>(cur.size()) == need) return true;
        for (std::size_t i = from; i < nb.size(); ++i) {
          bool ok = true;
          for (Point y : cur)
            if (c(y, nb[i]) != 1) {
              ok = false;
              break;
            }
          if (!ok) continue;
          cur.push_back(nb[i]);
          if (rec(i + 1)) return true;
          cur.pop_back();
        }
        return false;
      };
      return !rec(0);
    }
    case Kind::equivalence: {
      // colour 0 = same class; transitivity and at most `classes` classes
      for (Point a = 0; a < x; ++a)
        for (Point b = 0; b < x; ++b) {
          if (a == b) continue;
          bool xa = c(x, a) == 0, xb = c(x, b) == 0, ab = c(a, b) == 0;
          if (xa && xb && !ab) return false;
          if (xa && ab && !xb) return false;
        }
      int classes = 0;
      for (Point a = 0; a <= x; ++a) {
        bool rep = true;
        for (Point b = 0; b < a; ++b)
          if (c(a, b) == 0) rep = false;
        if (rep) ++classes;
      }
      return classes <= s.param;
    }
    default: return true;
  }
}

inline bool member(const StructureSpec& s, const std::vector<std::uint8_t>& col, std::size_t n) {
  for (std::size_t x = 0; x < n; ++x)
    if (!extension_ok(s, col, n, static_cast<Point>(x))) return false;
  return true;
}

}  // namespace age

struct Window {
  StructureSpec spec;
  int level = 0;
  std::size_t n = 0;
  std::vector<std::string> labels;

  // binary kinds
  int palette = 0;
  std::vector<int> transpose;
  std::vector<std::uint8_t> color;  // n*n, diagonal unused

  // vector_space: point index = sum of coords[i] * q^i
  std::shared_ptr<const GF> field;
  int dim = 0;
  std::vector<int> coords;  // n*dim

  // finite
  std::shared_ptr<const PermGroup> explicit_aut;

  std::size_t size() const { return n; }
  bool binary() const { return spec.is_binary(); }
  bool linear() const { return spec.kind == Kind::vector_space; }
  bool explicit_kind() const { return spec.kind == Kind::finite; }

  int col(Point a, Point b) const { return color[static_cast<std::size_t>(a) * n + b]; }
  int coord(Point p, int i) const { return coords[static_cast<std::size_t>(p) * dim + i]; }

  Point from_coords(const std::vector<int>& v) const {
    Point r = 0, scale = 1;
    for (int i = 0; i < dim; ++i) {
      r += v[i] * scale;
      scale *= field->order();
    }
    return r;
  }
  std::vector<int> vec(Point p) const { return {coords.begin() + p * dim, coords.begin() + (p + 1) * dim}; }
  Point vadd(Point a, Point b) const {
    std::vector<int> v(dim);
    for (int i = 0; i < dim; ++i) v[i] = field->add(coord(a, i), coord(b, i));
    return from_coords(v);
  }
  Point vscale(int lambda, Point a) const {
    std::vector<int> v(dim);
    for (int i = 0; i < dim; ++i) v[i] = field->mul(lambda, coord(a, i));
    return from_coords(v);
  }

  // Relational view.
  FiniteStructure structure() const {
    FiniteStructure fs;
    fs.domain_size = n;
    switch (spec.kind) {
      case Kind::pure_set: break;
      case Kind::dlo: {
        fs.signature = {{"lt", 2}};
        auto& r = fs.relations["lt"];
        for (Point a = 0; a < static_cast<Point>(n); ++a)
          for (Point b = 0; b < static_cast<Point>(n); ++b)
            if (a != b && col(a, b) == 0) r.insert({a, b});
        break;
      }
      case Kind::random_graph:
      case Kind::henson:
      case Kind::colored_graph:
      case Kind::equivalence: {
        std::vector<std::string> names;
        if (spec.kind == Kind::colored_graph)
          for (int i = 1; i <= spec.param; ++i) names.push_back("C" + std::to_string(i));
        else
          names = {"", "E"};
        int related = spec.kind == Kind::equivalence ? 0 : 1;
        for (std::size_t i = 0; i < names.size(); ++i)
          if (!names[i].empty()) fs.signature.push_back({names[i], 2});
        for (Point a = 0; a < static_cast<Point>(n); ++a) {
          if (spec.kind == Kind::equivalence) fs.relations["E"].insert({a, a});
          for (Point b = 0; b < static_cast<Point>(n); ++b) {
            if (a == b) continue;
            int c = col(a, b);
            if (spec.kind == Kind::colored_graph)
              fs.relations[names[c]].insert({a, b});
            else if (c == related)
              fs.relations["E"].insert({a, b});
          }
        }
        break;
      }
      case Kind::vector_space: {
        fs.signature = {{"zero", 1}, {"sum", 3}};
        fs.relations["zero"].insert({0});
        auto& sum = fs.relations["sum"];
        for (Point a = 0; a < static_cast<Point>(n); ++a)
          for (Point b = 0; b < static_cast<Point>(n); ++b) sum.insert({a, b, vadd(a, b)});
        for (int l = 2; l < field->order(); ++l) {
          std::string nm = "scale" + std::to_string(l);
          fs.signature.push_back({nm, 2});
          auto& r = fs.relations[nm];
          for (Point a = 0; a < static_cast<Point>(n); ++a) r.insert({a, vscale(l, a)});
        }
        break;
      }
      case Kind::finite: return *spec.finite;
    }
    return fs;
  }
};

struct ClosedSet {
  std::vector<Point> points;        // sorted
  std::vector<Point> generated_by;  // the input set

  friend bool operator==(const ClosedSet& a, const ClosedSet& b) { return a.points == b.points; }
  friend bool operator<(const ClosedSet& a, const ClosedSet& b) {
    if (a.points.size() != b.points.size()) return a.points.size() < b.points.size();
    return a.points < b.points;
  }
  bool contains(Point p) const { return std::binary_search(points.begin(), points.end(), p); }
  bool subset_of(const ClosedSet& o) const {
    return std::includes(o.points.begin(), o.points.end(), points.begin(), points.end());
  }
};

struct WindowOptions {
  std::size_t max_points = 20000;
};

// ---------------------------------------------------------------------------
// Automorphism search on windows

inline SearchableStructure searchable(const Window& w) {
  SearchableStructure s;
  s.n = w.n;
  s.invariant.assign(w.n, 0);
  if (w.binary()) {
    for (std::size_t a = 0; a < w.n; ++a) {
      std::vector<long> cnt(w.palette, 0);
      for (std::size_t b = 0; b < w.n; ++b)
        if (a != b) cnt[w.col(static_cast<Point>(a), static_cast<Point>(b))]++;
      long h = 0;
      for (long c : cnt) h = h * 1000003 + c;
      s.invariant[a] = h;
    }
    s.extend_ok = [&w](const std::vector<Point>& m, Point x) {
      for (std::size_t a = 0; a < w.n; ++a) {
        if (m[a] < 0 || static_cast<Point>(a) == x) continue;
        if (w.col(static_cast<Point>(a), x) != w.col(m[a], m[x])) return false;
      }
      return true;
    };
    return s;
  }
  throw std::logic_error("searchable: binary windows only");
}

inline SearchableStructure searchable(const FiniteStructure& fs) {
  SearchableStructure s;
  s.n = fs.domain_size;
  s.invariant.assign(s.n, 0);
  auto rel = std::make_shared<std::vector<std::pair<int, std::set<std::vector<Point>>>>>();
  for (const auto& [name, arity] : fs.signature) {
    auto it = fs.relations.find(name);
    rel->push_back({arity, it == fs.relations.end() ? std::set<std::vector<Point>>{} : it->second});
  }
  for (std::size_t r = 0; r < rel->size(); ++r)
    for (const auto& t : (*rel)[r].second)
      for (std::size_t i = 0; i < t.size(); ++i) s.invariant[t[i]] = s.invariant[t[i]] * 31 + static_cast<long>(r * 7 + i + 1);
  // per point incidence lists
  auto inc = std::make_shared<std::vector<std::vector<std::pair<int, std::vector<Point>>>>>(s.n);
  for (std::size_t r = 0; r < rel->size(); ++r)
    for (const auto& t : (*rel)[r].second)
      for (Point p : std::set<Point>(t.begin(), t.end())) (*inc)[p].push_back({static_cast<int>(r), t});
  std::size_t n = s.n;
  s.extend_ok = [rel, inc, n](const std::vector<Point>& m, Point x) {
    // forward: tuples through x that are fully mapped must map into the relation
    for (const auto& [r, t] : (*inc)[x]) {
      std::vector<Point> img;
      bool full = true;
      for (Point p : t) {
        if (m[p] < 0) {
          full = false;
          break;
        }
        img.push_back(m[p]);
      }
      if (full && !(*rel)[r].second.count(img)) return false;
    }
    // backward: tuples through m[x] whose preimage is fully known must come from the relation
    std::vector<Point> inv(n, -1);
    for (std::size_t a = 0; a < n; ++a)
      if (m[a] >= 0) inv[m[a]] = static_cast<Point>(a);
    for (const auto& [r, t] : (*inc)[m[x]]) {
      std::vector<Point> pre;
      bool full = true;
      for (Point p : t) {
        if (inv[p] < 0) {
          full = false;
          break;
        }
        pre.push_back(inv[p]);
      }
      if (full && !(*rel)[r].second.count(pre)) return false;
    }
    return true;
  };
  return s;
}

// GL(dim, q) acting on the window's vectors, or on the span of `basis` when given.
inline std::vector<Permutation> linear_generators(const Window& w, const std::vector<Point>& domain,
                                                  const std::vector<Point>& basis) {
  // each generator is a linear map given on the basis; extend to `domain` (a subspace)
  const GF& f = *w.field;
  const std::size_t r = basis.size();
  std::vector<std::vector<Point>> images;
  if (r == 0) return {};
  auto push = [&](std::vector<Point> img) { images.push_back(std::move(img)); };
  if (r >= 2) {
    std::vector<Point> sw = basis;
    std::swap(sw[0], sw[1]);
    push(sw);
    std::vector<Point> cyc(r);
    for (std::size_t i = 0; i < r; ++i) cyc[i] = basis[(i + 1) % r];
    push(cyc);
    std::vector<Point> tv = basis;
    tv[0] = w.vadd(basis[0], basis[1]);
    push(tv);
  }
  if (f.order() > 2) {
    std::vector<Point> sc = basis;
    sc[0] = w.vscale(f.primitive(), basis[0]);
    push(sc);
  }
  // express each domain point in the basis
  std::vector<std::vector<int>> comb(domain.size());
  {
    std::map<Point, std::vector<int>> by_point;
    std::vector<int> c(r, 0);
    const int q = f.order();
    std::size_t total = 1;
    for (std::size_t i = 0; i < r; ++i) total *= q;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t t = code;
      Point v = 0;
      for (std::size_t i = 0; i < r; ++i) {
        c[i] = static_cast<int>(t % q);
        t /= q;
        v = w.vadd(v, w.vscale(c[i], basis[i]));
      }
      by_point[v] = c;
    }
    for (std::size_t i = 0; i < domain.size(); ++i) comb[i] = by_point.at(domain[i]);
  }
  std::vector<Permutation> out;
  for (const auto& img : images) {
    std::vector<Point> slot(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) {
      Point v = 0;
      for (std::size_t j = 0; j < r; ++j) v = w.vadd(v, w.vscale(comb[i][j], img[j]));
      auto it = std::lower_bound(domain.begin(), domain.end(), v);
      slot[i] = static_cast<Point>(it - domain.begin());
    }
    out.emplace_back(std::move(slot));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear algebra on window vectors

namespace linalg {

struct Row {
  std::vector<int> vec;
  std::vector<int> comb;  // coefficients over the generator list
  int pivot = 0;
};

// Incremental echelon basis tracking combinations of accepted generators.
class Echelon {
 public:
  Echelon(const GF& f, int dim) : f_(&f), dim_(dim) {}

  // Reduces v; returns coefficients over accepted generators if v lies in the span.
  std::optional<std::vector<int>> express(const std::vector<int>& v) const {
    auto [res, comb] = reduce(v);
    for (int x : res)
      if (x != 0) return std::nullopt;
    return comb;
  }

  // Adds v as a generator if independent; returns true if added.
  bool add(const std::vector<int>& v) {
    auto [res, comb] = reduce(v);
    int piv = -1;
    for (int i = 0; i < dim_; ++i)
      if (res[i] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    std::size_t g = gens_++;
    Row row;
    row.vec = res;
    row.comb.assign(gens_, 0);
    for (std::size_t k = 0; k < comb.size(); ++k) row.comb[k] = f_->neg(comb[k]);
    row.comb[g] = 1;
    int s = f_->inv(res[piv]);
    for (int& x : row.vec) x = f_->mul(s, x);
    for (int& x : row.comb) x = f_->mul(s, x);
    row.pivot = piv;
    for (auto& r : rows_) r.comb.resize(gens_, 0);
    rows_.push_back(std::move(row));
    return true;
  }

  std::size_t rank() const { return gens_; }

 private:
  const GF* f_;
  int dim_;
  std::size_t gens_ = 0;
  std::vector<Row> rows_;

  // returns (v - sum comb_k g_k, comb)
  std::pair<std::vector<int>, std::vector<int>> reduce(std::vector<int> v) const {
    std::vector<int> comb(gens_, 0);
    for (const auto& r : rows_) {
      int c = v[r.pivot];
      if (c == 0) continue;
      for (int i = 0; i < dim_; ++i) v[i] = f_->sub(v[i], f_->mul(c, r.vec[i]));
      for (std::size_t k = 0; k < r.comb.size(); ++k) comb[k] = f_->add(comb[k], f_->mul(c, r.comb[k]));
    }
    return {v, comb};
  }
};

}  // namespace linalg

// Basis (greedy, in the given order) of span(pts).
inline std::vector<Point> greedy_basis(const Window& w, const std::vector<Point>& pts) {
  linalg::Echelon e(*w.field, w.dim);
  std::vector<Point> b;
  for (Point p : pts)
    if (e.add(w.vec(p))) b.push_back(p);
  return b;
}

inline std::vector<Point> span(const Window& w, const std::vector<Point>& pts) {
  std::vector<Point> b = greedy_basis(w, pts);
  std::set<Point> out{0};
  for (Point g : b) {
    std::set<Point> next = out;
    for (Point v : out)
      for (int l = 1; l < w.field->order(); ++l) next.insert(w.vadd(v, w.vscale(l, g)));
    out = std::move(next);
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Window builders

namespace build {

inline void init_binary(Window& w) {
  w.palette = palette_size(w.spec);
  w.transpose = palette_transpose(w.spec);
}

inline std::vector<std::uint8_t> resize_matrix(const std::vector<std::uint8_t>& col, std::size_t n, std::size_t m) {
  std::vector<std::uint8_t> out(m * m, kNoColor);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out[a * m + b] = col[a * n + b];
  return out;
}

// Canonical key of a coloured complete graph on k points (min over relabellings).
inline std::vector<std::uint8_t> iso_key(const std::vector<std::uint8_t>& col, std::size_t k) {
  std::vector<Point> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint8_t> best;
  do {
    std::vector<std::uint8_t> key;
    key.reserve(k * k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (i != j) key.push_back(col[perm[i] * k + perm[j]]);
    if (best.empty() || key < best) best = key;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// All age members on k points up to isomorphism, as colour matrices, in key order.
inline std::vector<std::vector<std::uint8_t>> age_types(const StructureSpec& s, std::size_t k) {
  const int P = palette_size(s);
  const auto tr = palette_transpose(s);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  std::map<std::vector<std::uint8_t>, std::vector<std::uint8_t>> found;
  std::vector<int> c(pairs.size(), 0);
  for (;;) {
    std::vector<std::uint8_t> col(k * k, kNoColor);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      col[pairs[e].first * k + pairs[e].second] = static_cast<std::uint8_t>(c[e]);
      col[pairs[e].second * k + pairs[e].first] = static_cast<std::uint8_t>(tr[c[e]]);
    }
    if (age::member(s, col, k)) {
      auto key = iso_key(col, k);
      found.emplace(key, col);
    }
    std::size_t e = 0;
    while (e < c.size() && ++c[e] == P) c[e++] = 0;
    if (e == c.size()) break;
  }
  std::vector<std::vector<std::uint8_t>> out;
  for (auto& [key, col] : found) out.push_back(col);
  return out;
}

// An embedding of the k-point structure `x` into the window, if one exists.
inline std::optional<std::vector<Point>> embed(const Window& w, const std::vector<std::uint8_t>& x, std::size_t k,
                                               const std::vector<std::size_t>& order) {
  std::vector<Point> img;
  std::vector<char> used(w.n, 0);
  std::function<bool()> rec = [&]() -> bool {
    std::size_t i = img.size();
    if (i == order.size()) return true;
    for (std::size_t y = 0; y < w.n; ++y) {
      if (used[y]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = w.col(img[j], static_cast<Point>(y)) == x[order[j] * k + order[i]];
      if (!ok) continue;
      used[y] = 1;
      img.push_back(static_cast<Point>(y));
      if (rec()) return true;
      img.pop_back();
      used[y] = 0;
    }
    return false;
  };
  if (rec()) return img;
  return std::nullopt;
}

// Universal windows: level t realizes every age member on at most t+2 points.
// Missing members are added one point at a time over an embedded copy of the
// member minus one point; colours to the remaining points follow a fixed
// pseudo-random preference, falling back to the next colour that stays in the age.
inline void extend_universal(Window& w, std::size_t k, const WindowOptions& opt) {
  for (const auto& x : age_types(w.spec, k)) {
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), 0);
    if (embed(w, x, k, all)) continue;
    bool done = false;
    for (std::size_t v = k; v-- > 0 && !done;) {
      std::vector<std::size_t> sub;
      for (std::size_t u = 0; u < k; ++u)
        if (u != v) sub.push_back(u);
      auto e = embed(w, x, k, sub);
      if (!e) continue;
      const std::size_t n = w.n, m = n + 1;
      if (m > opt.max_points) throw BudgetExceeded("window exceeds " + std::to_string(opt.max_points) + " points");
      auto col = resize_matrix(w.color, n, m);
      std::vector<int> fixed(n, -1);
      for (std::size_t i = 0; i < sub.size(); ++i) fixed[(*e)[i]] = x[sub[i] * k + v];
      const int P = w.palette;
      // fixed colours first, then the remaining points in index order
      std::vector<Point> order;
      for (std::size_t y = 0; y < n; ++y)
        if (fixed[y] >= 0) order.push_back(static_cast<Point>(y));
      for (std::size_t y = 0; y < n; ++y)
        if (fixed[y] < 0) order.push_back(static_cast<Point>(y));
      std::vector<Point> assigned;
      for (Point y : order) {
        std::vector<int> prefs;
        if (fixed[y] >= 0)
          prefs = {fixed[y]};
        else
          for (int d = 0; d < P; ++d) prefs.push_back(static_cast<int>((n * 5 + y * 3 + n * y) % P + d) % P);
        assigned.push_back(y);
        bool placed = false;
        for (int c : prefs) {
          col[y * m + n] = static_cast<std::uint8_t>(c);
          col[n * m + y] = static_cast<std::uint8_t>(w.transpose[c]);
          std::vector<Point> pts = assigned;
          pts.push_back(static_cast<Point>(n));
          std::vector<std::uint8_t> sub_col(pts.size() * pts.size(), kNoColor);
          for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j)
              if (i != j) sub_col[i * pts.size() + j] = col[pts[i] * m + pts[j]];
          if (age::extension_ok(w.spec, sub_col, pts.size(), static_cast<Point>(pts.size() - 1))) {
            placed = true;
            break;
          }
        }
        if (!placed) throw std::logic_error("window builder: no age-safe colour");
      }
      w.color = std::move(col);
      w.n = m;
      w.labels.push_back("p" + std::to_string(n));
      done = true;
    }
    if (!done) throw std::logic_error("window builder: member not reachable by one-point extension");
  }
}

inline std::string dyadic_label(std::size_t idx, long& num, long& den) {
  // breadth-first enumeration of dyadic rationals in (0,1): 1/2, 1/4, 3/4, 1/8, ...
  std::size_t i = idx + 1;
  den = 2;
  while (i > static_cast<std::size_t>(den / 2)) {
    i -= den / 2;
    den *= 2;
  }
  num = 2 * static_cast<long>(i) - 1;
  return std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace build

// Vector-space window GF(q)^dim; the level is recorded as dim - 2.
inline Window build_vector_window(int q, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  Window w;
  w.spec = make_spec(Kind::vector_space, q);
  w.level = dim - 2;
  w.field = std::make_shared<const GF>(q);
  w.dim = dim;
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= q;
  w.n = n;
  w.coords.assign(n * dim, 0);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t t = p;
    std::string lab = "(";
    for (int i = 0; i < dim; ++i) {
      w.coords[p * dim + i] = static_cast<int>(t % q);
      t /= q;
      if (i) lab += ",";
      lab += std::to_string(w.coords[p * dim + i]);
    }
    w.labels.push_back(lab + ")");
  }
  return w;
}

inline Window build_window(const StructureSpec& spec, int level, const WindowOptions& opt = {}) {
  if (level < 0) throw std::invalid_argument("window level must be >= 0");
  spec.validate();
  Window w;
  w.spec = spec;
  w.level = level;
  switch (spec.kind) {
    case Kind::pure_set:
    case Kind::dlo:
    case Kind::equivalence: {
      build::init_binary(w);
      std::size_t n = spec.kind == Kind::equivalence ? static_cast<std::size_t>(spec.param) * (level + 2) : level + 2;
      if (n > opt.max_points) throw BudgetExceeded("window exceeds point cap");
      w.n = n;
      w.color.assign(n * n, kNoColor);
      std::vector<double> val(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (spec.kind == Kind::dlo) {
          long num, den;
          w.labels.push_back(build::dyadic_label(i, num, den));
          val[i] = static_cast<double>(num) / static_cast<double>(den);
        } else if (spec.kind == Kind::equivalence) {
          w.labels.push_back("c" + std::to_string(i / (level + 2)) + "." + std::to_string(i % (level + 2)));
        } else {
          w.labels.push_back("p" + std::to_string(i));
        }
      }
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b) continue;
          std::uint8_t c = 0;
          if (spec.kind == Kind::dlo) c = val[a] < val[b] ? 0 : 1;
          if (spec.kind == Kind::equivalence) c = (a / (level + 2) == b / (level + 2)) ? 0 : 1;
          w.color[a * n + b] = c;
        }
      return w;
    }
    case Kind::random_graph:
    case Kind::henson:
    case Kind::colored_graph: {
      build::init_binary(w);
      if (level == 0) {
        w.n = 1;
        w.color.assign(1, kNoColor);
        w.labels = {"p0"};
      } else {
        w = build_window(spec, level - 1, opt);
        w.level = level;
      }
      for (std::size_t k = 2; k <= static_cast<std::size_t>(level) + 2; ++k) build::extend_universal(w, k, opt);
      return w;
    }
    case Kind::vector_space: {
      std::size_t n = 1;
      for (int i = 0; i < level + 2; ++i) {
        n *= spec.param;
        if (n > opt.max_points) throw BudgetExceeded("window exceeds point cap");
      }
      return build_vector_window(spec.param, level + 2);
    }
    case Kind::finite: {
      w.n = spec.finite->domain_size;
      for (std::size_t i = 0; i < w.n; ++i) w.labels.push_back("x" + std::to_string(i));
      w.explicit_aut = std::make_shared<const PermGroup>(automorphism_group(searchable(*spec.finite)));
      return w;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Oracles

inline void check_points(const Window& w, const std::vector<Point>& pts) {
  for (Point p : pts)
    if (p < 0 || static_cast<std::size_t>(p) >= w.n)
      throw std::out_of_range("point " + std::to_string(p) + " outside the window");
}

inline ClosedSet acl(const Window& w, const std::vector<Point>& a) {
  check_points(w, a);
  ClosedSet c;
  c.generated_by = a;
  if (w.linear())
    c.points = span(w, a);
  else if (w.explicit_kind()) {
    c.points.resize(w.n);
    std::iota(c.points.begin(), c.points.end(), 0);
  } else
    c.points = sorted_unique(a);
  return c;
}

inline ClosedSet dcl0(const Window& w) {
  ClosedSet c;
  if (w.linear()) c.points = {0};
  if (w.explicit_kind()) {
    for (const auto& orb : point_orbits(w.n, w.explicit_aut->generators()))
      if (orb.size() == 1) c.points.push_back(orb[0]);
    std::sort(c.points.begin(), c.points.end());
  }
  return c;
}

inline bool is_closed(const Window& w, const std::vector<Point>& k) {
  return acl(w, k).points == sorted_unique(k) && std::is_sorted(k.begin(), k.end());
}

// Key of the Aut(M)-orbit of `tuple` over the ordered parameter list `params`.
// Two tuples get equal keys iff some automorphism fixing params maps one to the other.
inline std::vector<int> orbit_key(const Window& w, const std::vector<Point>& params, const std::vector<Point>& tuple) {
  std::vector<int> key;
  if (w.binary()) {
    std::vector<Point> fresh;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      Point x = tuple[i];
      auto pit = std::find(params.begin(), params.end(), x);
      if (pit != params.end()) {
        key.push_back(0);
        key.push_back(static_cast<int>(pit - params.begin()));
        continue;
      }
      auto fit = std::find(fresh.begin(), fresh.end(), x);
      if (fit != fresh.end()) {
        key.push_back(1);
        key.push_back(static_cast<int>(fit - fresh.begin()));
        continue;
      }
      key.push_back(2);
      for (Point p : params) key.push_back(w.col(x, p));
      for (Point y : fresh) key.push_back(w.col(x, y));
      fresh.push_back(x);
    }
    return key;
  }
  if (w.linear()) {
    linalg::Echelon e(*w.field, w.dim);
    for (Point p : params) e.add(w.vec(p));
    for (Point x : tuple) {
      auto v = w.vec(x);
      if (auto c = e.express(v)) {
        key.push_back(0);
        key.insert(key.end(), c->begin(), c->end());
        key.push_back(-1);
      } else {
        key.push_back(1);
        e.add(v);
      }
    }
    return key;
  }
  // explicit: least image of the tuple under the pointwise stabilizer of params
  PermGroup st = pointwise_stabilizer(*w.explicit_aut, params);
  auto orb = orbit(st, tuple);
  return {orb.front().begin(), orb.front().end()};
}

// Partial map given as parallel lists.
struct PartialMap {
  std::vector<Point> dom, cod;
};

// Isomorphism acl(dom) -> acl(cod) extending q, if one exists.
inline std::optional<PartialMap> hull_iso_extends(const Window& w, const PartialMap& q) {
  check_points(w, q.dom);
  check_points(w, q.cod);
  if (q.dom.size() != q.cod.size()) throw std::invalid_argument("partial map: length mismatch");
  // functional and injective
  std::map<Point, Point> fwd, bwd;
  for (std::size_t i = 0; i < q.dom.size(); ++i) {
    auto [it, ins] = fwd.emplace(q.dom[i], q.cod[i]);
    if (!ins && it->second != q.cod[i]) return std::nullopt;
    auto [jt, jns] = bwd.emplace(q.cod[i], q.dom[i]);
    if (!jns && jt->second != q.dom[i]) return std::nullopt;
  }
  PartialMap m;
  for (auto [a, b] : fwd) {
    m.dom.push_back(a);
    m.cod.push_back(b);
  }
  if (w.binary()) {
    for (std::size_t i = 0; i < m.dom.size(); ++i)
      for (std::size_t j = 0; j < m.dom.size(); ++j)
        if (i != j && w.col(m.dom[i], m.dom[j]) != w.col(m.cod[i], m.cod[j])) return std::nullopt;
    return m;
  }
  if (w.linear()) {
    if (orbit_key(w, {}, m.dom) != orbit_key(w, {}, m.cod)) return std::nullopt;
    std::vector<Point> basis = greedy_basis(w, m.dom);
    std::vector<Point> bimg;
    for (Point b : basis) bimg.push_back(fwd[b]);
    PartialMap full;
    const int qn = w.field->order();
    std::size_t total = 1;
    for (std::size_t i = 0; i < basis.size(); ++i) total *= qn;
    std::map<Point, Point> out;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t t = code;
      Point x = 0, y = 0;
      for (std::size_t i = 0; i < basis.size(); ++i) {
        int c = static_cast<int>(t % qn);
        t /= qn;
        x = w.vadd(x, w.vscale(c, basis[i]));
        y = w.vadd(y, w.vscale(c, bimg[i]));
      }
      out[x] = y;
    }
    for (auto [a, b] : out) {
      full.dom.push_back(a);
      full.cod.push_back(b);
    }
    return full;
  }
  // explicit structure: an automorphism of the whole domain
  std::vector<std::pair<Point, Point>> pre;
  for (auto [a, b] : fwd) pre.emplace_back(a, b);
  auto s = searchable(*w.spec.finite);
  auto g = find_automorphism(s, pre);
  if (!g) return std::nullopt;
  PartialMap full;
  for (std::size_t x = 0; x < w.n; ++x) {
    full.dom.push_back(static_cast<Point>(x));
    full.cod.push_back((*g)(static_cast<Point>(x)));
  }
  return full;
}

inline bool same_orbit(const Window& w, const std::vector<Point>& a, const std::vector<Point>& b,
                       const std::vector<Point>& params) {
  if (a.size() != b.size()) throw std::invalid_argument("same_orbit: length mismatch");
  PartialMap q;
  for (Point p : params) {
    q.dom.push_back(p);
    q.cod.push_back(p);
  }
  q.dom.insert(q.dom.end(), a.begin(), a.end());
  q.cod.insert(q.cod.end(), b.begin(), b.end());
  return hull_iso_extends(w, q).has_value();
}

// Self-isomorphisms of the induced structure on a closed set, acting on its slots.
inline PermGroup aut_closed(const Window& w, const ClosedSet& k) {
  if (!is_closed(w, k.points)) throw std::invalid_argument("aut_closed: set is not closed");
  const auto& pts = k.points;
  if (w.binary()) {
    Window sub;
    sub.spec = w.spec;
    sub.n = pts.size();
    sub.palette = w.palette;
    sub.transpose = w.transpose;
    sub.color.assign(sub.n * sub.n, kNoColor);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (i != j) sub.color[i * sub.n + j] = static_cast<std::uint8_t>(w.col(pts[i], pts[j]));
    return automorphism_group(searchable(sub));
  }
  if (w.linear()) {
    std::vector<Point> nz(pts.begin(), pts.end());
    return PermGroup(pts.size(), linear_generators(w, pts, greedy_basis(w, nz)));
  }
  return *w.explicit_aut;
}

// Automorphism group of the whole window.
inline PermGroup window_group(const Window& w, Budget* budget = nullptr) {
  if (w.binary()) return automorphism_group(searchable(w), budget);
  if (w.linear()) {
    std::vector<Point> all(w.n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<Point> basis;
    for (int i = 0; i < w.dim; ++i) {
      std::vector<int> e(w.dim, 0);
      e[i] = 1;
      basis.push_back(w.from_coords(e));
    }
    return PermGroup(w.n, linear_generators(w, all, basis));
  }
  return *w.explicit_aut;
}

// Index map from the level-`from` window into the level-`to` window (an embedding of structures).
inline std::vector<Point> window_embedding(const StructureSpec& spec, int from, int to, std::size_t from_size) {
  if (from > to) throw std::invalid_argument("window_embedding: levels out of order");
  std::vector<Point> m(from_size);
  for (std::size_t i = 0; i < from_size; ++i) {
    if (spec.kind == Kind::equivalence)
      m[i] = static_cast<Point>((i / (from + 2)) * (to + 2) + i % (from + 2));
    else
      m[i] = static_cast<Point>(i);
  }
  return m;
}

// Points whose orbit over A (through same_orbit) has the same size in every window level given.
inline ClosedSet empirical_acl(const StructureSpec& spec, std::vector<int> levels, const std::vector<Point>& a,
                               const WindowOptions& opt = {}) {
  if (levels.empty()) throw std::invalid_argument("empirical_acl: no levels");
  std::sort(levels.begin(), levels.end());
  std::vector<Window> ws;
  for (int l : levels) ws.push_back(build_window(spec, l, opt));
  check_points(ws.front(), a);
  ClosedSet c;
  c.generated_by = a;
  for (std::size_t b = 0; b < ws.front().n; ++b) {
    std::optional<std::size_t> first;
    bool stable = true;
    for (const auto& w : ws) {
      auto emb = window_embedding(spec, levels.front(), w.level, ws.front().n);
      std::vector<Point> aa;
      for (Point p : a) aa.push_back(emb[p]);
      std::size_t cnt = 0;
      for (std::size_t x = 0; x < w.n; ++x)
        if (same_orbit(w, {emb[b]}, {static_cast<Point>(x)}, aa)) ++cnt;
      if (!first)
        first = cnt;
      else if (*first != cnt)
        stable = false;
    }
    if (stable) c.points.push_back(static_cast<Point>(b));
  }
  return c;
}

// Catalog metadata recorded as trusted facts about the infinite structures.
struct CatalogEntry {
  StructureSpec spec;
  bool algebraicity = false;
  bool wei = true;
  int k_m = 1;
  std::string outer;  // expected outer automorphism group
};

inline std::vector<CatalogEntry> catalog() {
  return {
      {make_spec(Kind::pure_set), false, true, 1, "1"},
      {make_spec(Kind::dlo), false, true, 1, "C2"},
      {make_spec(Kind::random_graph), false, true, 1, "C2"},
      {make_spec(Kind::henson, 3), false, true, 1, "1"},
      {make_spec(Kind::colored_graph, 2), false, true, 1, "Sym(2)"},
      {make_spec(Kind::colored_graph, 3), false, true, 1, "Sym(3)"},
      {make_spec(Kind::equivalence, 2), false, false, 1, "1"},
      {make_spec(Kind::vector_space, 2), true, true, 1, "n/a"},
      {make_spec(Kind::vector_space, 3), true, true, 1, "n/a"},
      {make_spec(Kind::vector_space, 4), true, true, 1, "n/a"},
  };
}

}  // namespace oligo
