// Fingerprints of windowed E^ex structures, isomorphism comparison and the reconstruction map alpha_f.
#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oligo/canon.hpp"
#include "oligo/digest.hpp"
#include "oligo/lattice.hpp"
#include "oligo/orbital.hpp"
#include "oligo/spec_io.hpp"

namespace oligo {

inline constexpr const char* kToolVersion = "oligo-0.1.0 canon-v1/sha256";
inline constexpr int kSchemaVersion = 1;

struct FingerprintParams {
  int level = 2;
  int n_max = 3;
  int k_range = 0;  // 0: max(k_M, 1)
};

struct PerK {
  int k = 1;
  std::size_t atoms = 0;
  std::map<int, std::size_t> orbit_counts;
  std::string canonical_digest;

  friend bool operator==(const PerK&, const PerK&) = default;
};

struct Fingerprint {
  std::string tool_version;
  std::string spec_hash;
  FingerprintParams params;
  std::vector<PerK> per_k;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["spec_hash"] = spec_hash;
    j["params"] = {{"level", params.level}, {"n_max", params.n_max}, {"k_range", params.k_range}};
    j["per_k"] = nlohmann::json::array();
    for (const auto& p : per_k) {
      nlohmann::json oc = nlohmann::json::object();
      for (auto [a, c] : p.orbit_counts) oc[std::to_string(a)] = c;
      j["per_k"].push_back({{"k", p.k}, {"atoms", p.atoms}, {"orbit_counts", oc}, {"canonical_digest", p.canonical_digest}});
    }
    return j;
  }
  std::string bytes() const { return to_json().dump(); }

  static Fingerprint from_json(const nlohmann::json& j) {
    Fingerprint f;
    f.tool_version = j.at("tool_version").get<std::string>();
    f.spec_hash = j.at("spec_hash").get<std::string>();
    f.params.level = j.at("params").at("level").get<int>();
    f.params.n_max = j.at("params").at("n_max").get<int>();
    f.params.k_range = j.at("params").at("k_range").get<int>();
    for (const auto& e : j.at("per_k")) {
      PerK p;
      p.k = e.at("k").get<int>();
      p.atoms = e.at("atoms").get<std::size_t>();
      for (auto it = e.at("orbit_counts").begin(); it != e.at("orbit_counts").end(); ++it)
        p.orbit_counts[std::stoi(it.key())] = it.value().get<std::size_t>();
      p.canonical_digest = e.at("canonical_digest").get<std::string>();
      f.per_k.push_back(std::move(p));
    }
    return f;
  }
};

inline std::string spec_hash(const StructureSpec& s) { return sha256_hex(spec_to_json(s).dump()); }

// Everything computed for one (spec, level, k, n_max).
struct EexBundle {
  std::shared_ptr<const Window> window;
  OrbitalStructure E;
  RelStructure rel;
  CanonResult canon;
};

inline EexBundle build_bundle(const StructureSpec& spec, int level, int k, int n_max, Budget* budget = nullptr) {
  EexBundle b;
  b.window = std::make_shared<const Window>(build_window(spec, level));
  b.E = build_eex(b.window, k, n_max, budget);
  hat_expand(b.E);
  b.rel = b.E.relational();
  CanonOptions opt;
  opt.budget = budget;
  b.canon = canonical_labeling(b.rel, opt);
  return b;
}

inline int resolve_k_range(const StructureSpec& spec, const FingerprintParams& p) {
  if (p.k_range > 0) return p.k_range;
  return std::max(compute_kM(build_window(spec, p.level)), 1);
}

inline PerK per_k_entry(const EexBundle& b, int k, Budget* budget) {
  PerK e;
  e.k = k;
  e.atoms = b.E.size();
  for (int a = 1; a <= 2; ++a) e.orbit_counts[a] = orbit_counts(b.E, a, budget);
  e.canonical_digest = canonical_digest(b.rel, b.canon.label);
  return e;
}

inline Fingerprint fingerprint(const StructureSpec& spec, FingerprintParams params = {}, unsigned threads = 1,
                               Budget* budget = nullptr) {
  if (params.level < 0 || params.n_max < 2) throw std::invalid_argument("fingerprint: invalid parameters");
  params.k_range = resolve_k_range(spec, params);
  Fingerprint f;
  f.tool_version = kToolVersion;
  f.spec_hash = spec_hash(spec);
  f.params = params;
  f.per_k.resize(params.k_range);
  std::exception_ptr err;
  std::mutex mu;
  auto task = [&](int k) {
    try {
      EexBundle b = build_bundle(spec, params.level, k, params.n_max, budget);
      f.per_k[k - 1] = per_k_entry(b, k, budget);
    } catch (...) {
      std::lock_guard lk(mu);
      if (!err) err = std::current_exception();
    }
  };
  if (threads <= 1 || params.k_range == 1) {
    for (int k = 1; k <= params.k_range; ++k) task(k);
  } else {
    std::vector<std::thread> pool;
    for (int k = 1; k <= params.k_range; ++k) pool.emplace_back(task, k);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return f;
}

struct CompareResult {
  bool iso = false;
  int k = 0;               // first differing k when distinguished
  std::string field;       // first differing field
  std::vector<std::vector<AtomId>> maps;  // per k: atoms of A -> atoms of B
  bool verified = false;
};

inline CompareResult compare(const StructureSpec& a, const StructureSpec& b, FingerprintParams params = {},
                             Budget* budget = nullptr) {
  FingerprintParams pa = params, pb = params;
  pa.k_range = resolve_k_range(a, params);
  pb.k_range = resolve_k_range(b, params);
  CompareResult r;
  const int kmax = std::max(pa.k_range, pb.k_range);
  for (int k = 1; k <= kmax; ++k) {
    if (k > pa.k_range || k > pb.k_range) {
      r.k = k;
      r.field = "k_range";
      return r;
    }
    EexBundle ba = build_bundle(a, params.level, k, params.n_max, budget);
    EexBundle bb = build_bundle(b, params.level, k, params.n_max, budget);
    PerK ea = per_k_entry(ba, k, budget), eb = per_k_entry(bb, k, budget);
    std::string field;
    if (ea.atoms != eb.atoms)
      field = "atoms";
    else if (ea.orbit_counts != eb.orbit_counts)
      field = "orbit_counts";
    else if (ea.canonical_digest != eb.canonical_digest)
      field = "canonical_digest";
    if (!field.empty()) {
      r.k = k;
      r.field = field;
      r.maps.clear();
      return r;
    }
    // f = lab_B^-1 o lab_A
    std::vector<AtomId> inv_b(bb.rel.n), f(ba.rel.n);
    for (std::size_t v = 0; v < bb.rel.n; ++v) inv_b[bb.canon.label[v]] = static_cast<AtomId>(v);
    for (std::size_t v = 0; v < ba.rel.n; ++v) f[v] = inv_b[ba.canon.label[v]];
    if (!is_isomorphism(ba.rel, bb.rel, f)) throw std::logic_error("compare: canonical labelings disagree with digests");
    r.maps.push_back(std::move(f));
  }
  r.iso = true;
  r.verified = true;
  return r;
}

// The presentation (K, g|K, g(K)) of a window automorphism over every node of E.
inline std::vector<AtomId> presentation(const OrbitalStructure& E, const Permutation& g) {
  std::vector<AtomId> out;
  for (std::size_t i = 0; i < E.nodes.size(); ++i) {
    const auto& pts = E.nodes[i].points;
    std::vector<Point> img, cod;
    for (Point p : pts) img.push_back(g(p));
    cod = img;
    std::sort(cod.begin(), cod.end());
    if (!E.find_node(cod)) throw std::invalid_argument("presentation: image of a node is not a node");
    auto a = E.find_atom(i, img);
    if (!a) throw std::invalid_argument("presentation: restriction is not an atom");
    out.push_back(*a);
  }
  return out;
}

// alpha_f: apply f to each triple and glue the second components. Throws on inconsistent values.
inline std::map<Point, Point> reconstruct_alpha(const OrbitalStructure& target, const std::vector<AtomId>& f,
                                                const std::vector<AtomId>& family) {
  std::map<Point, Point> m, inv;
  for (AtomId a : family) {
    if (a >= f.size()) throw std::invalid_argument("reconstruct_alpha: atom outside f's domain");
    for (auto [x, y] : target.pairs(f[a])) {
      auto [it, ins] = m.emplace(x, y);
      if (!ins && it->second != y) throw std::runtime_error("reconstruct_alpha: inconsistent values (f is not an isomorphism)");
      auto [jt, jns] = inv.emplace(y, x);
      if (!jns && jt->second != x) throw std::runtime_error("reconstruct_alpha: assembled map is not injective");
    }
  }
  return m;
}

inline std::optional<Permutation> as_permutation(const std::map<Point, Point>& m, std::size_t n) {
  if (m.size() != n) return std::nullopt;
  std::vector<Point> img(n);
  for (auto [x, y] : m) {
    if (x < 0 || static_cast<std::size_t>(x) >= n) return std::nullopt;
    img[x] = y;
  }
  return Permutation(img);
}

inline std::vector<AtomId> invert_map(const std::vector<AtomId>& f) {
  std::vector<AtomId> r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r[f[i]] = static_cast<AtomId>(i);
  return r;
}

inline std::vector<AtomId> compose_maps(const std::vector<AtomId>& outer, const std::vector<AtomId>& inner) {
  std::vector<AtomId> r(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) r[i] = outer[inner[i]];
  return r;
}

}  // namespace oligo
