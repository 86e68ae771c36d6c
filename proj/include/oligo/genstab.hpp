// Generalized pointwise stabilizers G_(K,L) on window groups.
#pragma once

#include <optional>
#include <vector>

#include "oligo/group_type.hpp"
#include "oligo/lattice.hpp"
#include "oligo/permgroup.hpp"

namespace oligo {

struct GenStab {
  ClosedSet K;
  PermGroup L;      // on K's slots
  PermGroup group;  // realized subgroup of the window group
};

namespace detail {

// Subgroup of the image generated by the elements of L it contains.
inline PermGroup intersect_small(const PermGroup& l, const PermGroup& image) {
  std::vector<Permutation> keep;
  PermGroup cur(l.degree());
  for (const auto& e : l.elements()) {
    if (!image.contains(e) || cur.contains(e)) continue;
    keep.push_back(e);
    cur = PermGroup(l.degree(), keep);
  }
  return cur;
}

}  // namespace detail

// {g in Gw : g(K) = K and g restricted to K lies in L}. When `aut_k` is given, L must be a subgroup of it.
inline GenStab gen_stabilizer(const PermGroup& gw, const ClosedSet& k, const PermGroup& l,
                              const PermGroup* aut_k = nullptr, Budget* budget = nullptr) {
  if (l.degree() != k.points.size() && !(k.points.empty() && l.degree() <= 1))
    throw std::invalid_argument("gen_stabilizer: L does not act on K");
  if (aut_k && !l.is_subgroup_of(*aut_k)) throw std::invalid_argument("gen_stabilizer: L is not a subgroup of Aut(K)");
  GenStab r;
  r.K = k;
  r.L = l;
  if (k.points.empty()) {
    r.group = gw;
    return r;
  }
  RestrictionQuotient rq = restriction_quotient(gw, k.points, budget);
  PermGroup both = detail::intersect_small(l, rq.image);
  PermGroup chain(gw.degree(), rq.setwise.strong_generators(), k.points);
  std::vector<Permutation> gens = rq.kernel.generators();
  for (const auto& s : both.generators()) {
    std::vector<Point> imgs(k.points.size());
    for (std::size_t i = 0; i < k.points.size(); ++i) imgs[i] = k.points[s(static_cast<Point>(i))];
    auto lift = chain.element_with_base_images(imgs);
    if (!lift) throw std::logic_error("gen_stabilizer: restriction has no preimage");
    gens.push_back(*lift);
  }
  r.group = PermGroup(gw.degree(), gens);
  return r;
}

struct Classification {
  ClosedSet K;
  PermGroup L;
  bool verified = false;  // H == gen_stabilizer(K, L)
};

inline bool sandwiched(const PermGroup& gw, const ClosedSet& k, const PermGroup& h) {
  for (const auto& g : h.generators())
    for (Point p : k.points)
      if (!k.contains(g(p))) return false;
  PermGroup pw = pointwise_stabilizer(gw, k.points);
  return pw.is_subgroup_of(h);
}

// Lattice nodes K with G_(K) <= H <= G_{K}, smallest first.
inline std::vector<ClosedSet> sandwich_scan(const PermGroup& gw, const ClosureLattice& lat, const PermGroup& h) {
  if (!h.is_subgroup_of(gw)) throw std::invalid_argument("sandwich_scan: H is not a subgroup of the window group");
  std::vector<ClosedSet> out;
  for (const auto& k : lat.nodes)
    if (sandwiched(gw, k, h)) out.push_back(k);
  return out;
}

// The least qualifying node, if the qualifying nodes have one.
inline std::optional<ClosedSet> least_node(const std::vector<ClosedSet>& qualifying) {
  for (const auto& k : qualifying) {
    bool least = true;
    for (const auto& o : qualifying)
      if (!k.subset_of(o)) {
        least = false;
        break;
      }
    if (least) return k;
  }
  return std::nullopt;
}

inline std::optional<Classification> classify_subgroup(const PermGroup& gw, const PermGroup& h,
                                                       const ClosureLattice& lat, Budget* budget = nullptr) {
  auto q = sandwich_scan(gw, lat, h);
  auto least = least_node(q);
  if (!least) return std::nullopt;
  Classification c;
  c.K = *least;
  std::vector<Permutation> res;
  for (const auto& g : h.generators()) res.push_back(restrict_to(g, c.K.points));
  c.L = PermGroup(c.K.points.size(), res);
  c.verified = gen_stabilizer(gw, c.K, c.L, nullptr, budget).group == h;
  return c;
}

struct NormalityCheck {
  bool holds = false;
  BigInt index = 0;
};

// Forward direction only: L1 normal in L2 implies G_(K,L1) normal of finite index in G_(K,L2).
inline NormalityCheck check_normality_forward(const PermGroup& gw, const ClosedSet& k, const PermGroup& l1,
                                              const PermGroup& l2, const PermGroup* aut_k = nullptr) {
  if (!is_normal_finite_index(l1, l2).normal) throw std::invalid_argument("normality: L1 is not normal in L2");
  GenStab h1 = gen_stabilizer(gw, k, l1, aut_k);
  GenStab h2 = gen_stabilizer(gw, k, l2, aut_k);
  auto ni = is_normal_finite_index(h1.group, h2.group);
  return {ni.normal, ni.index};
}

struct PointwiseVerdict {
  bool pointwise = false;
  std::optional<PermGroup> witness;  // a proper normal realized subgroup with the same K
};

// True iff no realized G_(K,L') is a proper normal subgroup of H. The only candidate needed is
// L' trivial, since every realized subgroup with this K contains G_(K), which is normal in G_{K}.
inline PointwiseVerdict pointwise_among_genstabs(const PermGroup& gw, const GenStab& h) {
  PointwiseVerdict v;
  GenStab triv = gen_stabilizer(gw, h.K, PermGroup(h.K.points.size()));
  bool proper = triv.group.order() < h.group.order();
  bool normal = triv.group.is_subgroup_of(h.group) && is_normal_finite_index(triv.group, h.group).normal;
  v.pointwise = !(proper && normal);
  if (!v.pointwise) v.witness = triv.group;
  return v;
}

struct QuotientType {
  GroupType type;
  bool matches_aut_k = false;
};

inline QuotientType aut_type_of_pointwise(const PermGroup& gw, const GenStab& h, const PermGroup& aut_k) {
  if (!h.L.is_trivial()) throw std::invalid_argument("aut_type_of_pointwise: H is not a pointwise stabilizer");
  RestrictionQuotient rq = restriction_quotient(gw, h.K.points);
  QuotientType q;
  q.type = identify(rq.image);
  q.matches_aut_k = rq.image.order() == aut_k.order() && rq.image.is_subgroup_of(aut_k);
  return q;
}

}  // namespace oligo
