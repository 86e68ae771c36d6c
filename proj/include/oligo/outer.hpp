// Outer automorphisms through age-preserving recolorings of 2-type classes, and the GL(V) kernel analysis.
#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "oligo/canon.hpp"
#include "oligo/group_type.hpp"
#include "oligo/orbital.hpp"
#include "oligo/structures.hpp"

namespace oligo {

struct OuterResult {
  std::vector<std::string> classes;   // 2-type class names (palette)
  std::vector<Permutation> accepted;  // every accepted sigma
  PermGroup group;                    // generated by the accepted sigmas
  GroupType type;
  // per sigma that failed: a smallest age member whose recoloring leaves the age
  std::vector<std::pair<Permutation, std::vector<std::uint8_t>>> rejected;
};

namespace detail {

// Calls f(col, k) for every colored structure on k points (2 <= k <= s) that lies in the age.
template <class F>
bool for_each_age_member(const StructureSpec& spec, int s, F&& f) {
  const int P = palette_size(spec);
  const auto tr = palette_transpose(spec);
  for (int k = 2; k <= s; ++k) {
    const std::size_t n = static_cast<std::size_t>(k);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = 0; i < j; ++i) pairs.emplace_back(i, j);
    std::vector<std::uint8_t> col(n * n, kNoColor);
    // pairs ordered by their larger point; the age test runs once a point's row is complete
    std::function<bool(std::size_t)> rec = [&](std::size_t pi) -> bool {
      if (pi == pairs.size()) return f(col, n);
      auto [a, b] = pairs[pi];
      for (int c = 0; c < P; ++c) {
        col[a * n + b] = static_cast<std::uint8_t>(c);
        col[b * n + a] = static_cast<std::uint8_t>(tr[c]);
        if (a + 1 == b && !age::extension_ok(spec, col, n, static_cast<Point>(b))) continue;
        if (!rec(pi + 1)) return false;
      }
      col[a * n + b] = col[b * n + a] = kNoColor;
      return true;
    };
    if (!rec(0)) return false;
  }
  return true;
}

inline std::vector<std::uint8_t> prefix_matrix(const std::vector<std::uint8_t>& col, std::size_t n, std::size_t m) {
  std::vector<std::uint8_t> out(m * m, kNoColor);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = col[i * n + j];
  return out;
}

}  // namespace detail

inline OuterResult outer_group(const StructureSpec& spec, int age_size) {
  if (spec.has_algebraicity()) throw std::invalid_argument("outer_group: structures with algebraicity are not supported");
  if (age_size < 3) throw std::invalid_argument("outer_group: age size must be >= 3");
  const int P = palette_size(spec);
  const auto tr = palette_transpose(spec);
  OuterResult r;
  r.classes = palette_names(spec);
  std::vector<Point> perm(P);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool commutes = true;
    for (int c = 0; c < P; ++c)
      if (perm[tr[c]] != tr[perm[c]]) commutes = false;
    if (!commutes) continue;
    Permutation sigma(perm);
    std::optional<std::vector<std::uint8_t>> bad;
    detail::for_each_age_member(spec, age_size, [&](const std::vector<std::uint8_t>& col, std::size_t n) {
      std::vector<std::uint8_t> rc(col.size(), kNoColor);
      for (std::size_t i = 0; i < n * n; ++i)
        if (col[i] != kNoColor) rc[i] = static_cast<std::uint8_t>(perm[col[i]]);
      if (age::member(spec, rc, n)) return true;
      bad = col;
      return false;
    });
    if (bad)
      r.rejected.emplace_back(sigma, *bad);
    else
      r.accepted.push_back(sigma);
  } while (std::next_permutation(perm.begin(), perm.end()));
  r.group = PermGroup(static_cast<std::size_t>(P), r.accepted);
  r.type = identify(r.group);
  return r;
}

// A window bijection pi with col(pi a, pi b) = sigma(col(a, b)), if one exists.
inline std::optional<Permutation> realize_outer(const Window& w, const Permutation& sigma, Budget* budget = nullptr) {
  if (!w.binary()) throw std::invalid_argument("realize_outer: binary windows only");
  if (sigma.degree() != static_cast<std::size_t>(w.palette)) throw std::invalid_argument("realize_outer: sigma has the wrong degree");
  SearchableStructure s;
  s.n = w.n;
  s.invariant.assign(w.n, 0);
  s.extend_ok = [&w, &sigma](const std::vector<Point>& m, Point x) {
    for (std::size_t y = 0; y < m.size(); ++y) {
      if (m[y] < 0 || static_cast<Point>(y) == x) continue;
      if (w.col(m[x], m[y]) != sigma(w.col(x, static_cast<Point>(y)))) return false;
      if (w.col(m[y], m[x]) != sigma(w.col(static_cast<Point>(y), x))) return false;
    }
    return true;
  };
  return find_automorphism(s, {}, budget);
}

// Aut of the cyclic group F^x of order q - 1, acting on exponents: e . i = e * i mod (q - 1).
inline PermGroup aut_fx(int q) {
  if (!is_prime_power(q)) throw std::invalid_argument("aut_fx: q is not a prime power");
  const int m = q - 1;
  std::vector<Permutation> gens;
  for (int e = 1; e < m; ++e) {
    if (std::gcd(e, m) != 1) continue;
    std::vector<Point> img(m);
    for (int i = 0; i < m; ++i) img[i] = (e * i) % m;
    gens.emplace_back(img);
  }
  return PermGroup(static_cast<std::size_t>(m), gens);
}

struct GlvElement {
  int f_exponent = 1;      // lambda -> lambda^e on F^x
  std::vector<int> nu;     // per line, as an exponent of the primitive element
};

struct GlvReport {
  int q = 0, d = 0;
  std::size_t lines = 0, atoms = 0;
  std::vector<GlvElement> kernel;
  BigInt kernel_order = 0;
  BigInt aut_fx_order = 0;
  bool kernel_abelian = true;
  bool matches = false;             // kernel isomorphic to aut_fx(q)
  bool elements_verified = false;   // every kernel element checked against the relations
  bool gl_section_ok = false;       // GL generators act by automorphisms of the hat-expanded structure
};

namespace detail {

struct CoplanarConstraint {
  std::uint16_t line[6];  // domain triple, codomain triple
  std::uint64_t mask;     // admissible scalar triples, bit (l1 * m + l2) * m + l3
};

}  // namespace detail

// Node-fixing automorphisms of the hat-expanded E^ex(1) of GF(q)^d. Composition forces the form
// (L, lambda, L') -> (L, nu_L' f(lambda) / nu_L, L') with f in Aut(F^x); the search enumerates (f, nu)
// against the scalar-dependent E_3 instances (three distinct coplanar lines on both sides) and then
// checks every survivor on the remaining relations.
inline GlvReport glv_kernel_check(int q, int d, Budget* budget = nullptr) {
  if (!is_prime_power(q)) throw std::invalid_argument("glv: q is not a prime power");
  if (d < 2) throw std::invalid_argument("glv: dimension must be >= 2");
  const int m = q - 1;
  if (m > 4) throw std::invalid_argument("glv: q too large for the scalar table");
  auto wp = std::make_shared<const Window>(build_vector_window(q, d));
  const Window& w = *wp;
  OrbitalStructure E = build_eex(wp, 1, 2, budget);
  hat_expand(E);
  RelStructure rel = E.relational();
  const std::size_t L = E.nodes.size();
  const GF& F = *w.field;

  GlvReport rep;
  rep.q = q;
  rep.d = d;
  rep.lines = L;
  rep.atoms = E.size();

  // exponent tables
  std::vector<int> log(q, -1), pw(m);
  for (int i = 0, x = 1; i < m; ++i, x = F.mul(x, F.primitive())) {
    pw[i] = x;
    log[x] = i;
  }
  std::vector<Point> rep_pt(L);
  for (std::size_t i = 0; i < L; ++i) rep_pt[i] = E.nodes[i].points[1];  // smallest nonzero point
  // atom -> (dom, cod, scalar exponent) with p(e_L) = lambda e_L'
  std::vector<int> lam(E.size());
  std::map<std::tuple<std::size_t, std::size_t, int>, AtomId> atom_of;
  for (AtomId a = 0; a < E.size(); ++a) {
    const Atom& at = E.atoms[a];
    const auto& pts = E.nodes[at.dom].points;
    Point img = at.img[std::lower_bound(pts.begin(), pts.end(), rep_pt[at.dom]) - pts.begin()];
    int found = -1;
    for (int i = 0; i < m; ++i)
      if (w.vscale(pw[i], rep_pt[at.cod]) == img) found = i;
    if (found < 0) throw std::logic_error("glv: atom scalar not found");
    lam[a] = found;
    atom_of[{at.dom, at.cod, found}] = a;
  }

  // coplanar line triples
  std::vector<std::array<std::size_t, 3>> triples;
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = 0; b < L; ++b)
      for (std::size_t c = 0; c < L; ++c) {
        if (a == b || b == c || a == c) continue;
        if (greedy_basis(w, {rep_pt[a], rep_pt[b], rep_pt[c]}).size() == 2) triples.push_back({a, b, c});
      }
  detail::EChecker check(E);
  std::vector<std::vector<detail::CoplanarConstraint>> by_max(L);
  for (const auto& dt : triples)
    for (const auto& ct : triples) {
      if (budget) budget->tick();
      detail::CoplanarConstraint cc{};
      for (int i = 0; i < 3; ++i) {
        cc.line[i] = static_cast<std::uint16_t>(dt[i]);
        cc.line[3 + i] = static_cast<std::uint16_t>(ct[i]);
      }
      for (int l1 = 0; l1 < m; ++l1)
        for (int l2 = 0; l2 < m; ++l2)
          for (int l3 = 0; l3 < m; ++l3) {
            std::vector<AtomId> t{atom_of.at({dt[0], ct[0], l1}), atom_of.at({dt[1], ct[1], l2}),
                                  atom_of.at({dt[2], ct[2], l3})};
            if (check(t)) cc.mask |= 1ULL << ((l1 * m + l2) * m + l3);
          }
      std::size_t mx = *std::max_element(cc.line, cc.line + 6);
      by_max[mx].push_back(cc);
    }

  auto image_exp = [&](int e, const std::vector<int>& nu, std::size_t dom, std::size_t cod, int l) {
    return ((nu[cod] + e * l - nu[dom]) % m + m) % m;
  };
  auto holds = [&](int e, const std::vector<int>& nu, const detail::CoplanarConstraint& cc) {
    std::uint64_t img = 0;
    for (int l1 = 0; l1 < m; ++l1)
      for (int l2 = 0; l2 < m; ++l2)
        for (int l3 = 0; l3 < m; ++l3) {
          if (!(cc.mask >> ((l1 * m + l2) * m + l3) & 1ULL)) continue;
          int a = image_exp(e, nu, cc.line[0], cc.line[3], l1);
          int b = image_exp(e, nu, cc.line[1], cc.line[4], l2);
          int c = image_exp(e, nu, cc.line[2], cc.line[5], l3);
          img |= 1ULL << ((a * m + b) * m + c);
        }
    return img == cc.mask;
  };

  std::vector<int> exps;
  for (int e = 1; e <= std::max(m, 1); ++e)
    if (m == 1 ? e == 1 : (e < m && std::gcd(e, m) == 1)) exps.push_back(e);
  for (int e : exps) {
    std::vector<int> nu(L, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (budget) budget->tick();
      if (i == L) {
        rep.kernel.push_back({e, nu});
        return;
      }
      for (int v = 0; v < (i == 0 ? 1 : m); ++v) {
        nu[i] = v;
        bool ok = true;
        for (const auto& cc : by_max[i])
          if (!holds(e, nu, cc)) {
            ok = false;
            break;
          }
        if (ok) rec(i + 1);
      }
      nu[i] = 0;
    };
    rec(0);
  }

  // exact checks of every kernel element on the materialized relations
  std::vector<Permutation> gens;
  rep.elements_verified = true;
  for (const auto& el : rep.kernel) {
    std::vector<AtomId> phi(E.size());
    std::vector<Point> img(E.size());
    for (AtomId a = 0; a < E.size(); ++a) {
      const Atom& at = E.atoms[a];
      phi[a] = atom_of.at({at.dom, at.cod, m == 1 ? 0 : image_exp(el.f_exponent, el.nu, at.dom, at.cod, lam[a])});
      img[a] = static_cast<Point>(phi[a]);
    }
    if (!is_isomorphism(rel, rel, phi)) rep.elements_verified = false;
    gens.emplace_back(img);
  }
  PermGroup kernel(E.size(), gens);
  rep.kernel_order = kernel.order();
  PermGroup target = aut_fx(q);
  rep.aut_fx_order = target.order();
  rep.kernel_abelian = identify(kernel).abelian;
  rep.matches = rep.kernel_order == rep.aut_fx_order && isomorphic(kernel, target);

  // GL(V) acts on E^ex by automorphisms (checked on generators)
  rep.gl_section_ok = true;
  PermGroup gl = window_group(w, budget);
  for (const auto& g : gl.generators()) {
    auto f = induced_atom_map(E, g);
    if (!is_isomorphism(rel, rel, f)) rep.gl_section_ok = false;
  }
  return rep;
}

}  // namespace oligo
