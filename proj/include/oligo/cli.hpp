// Command-line front end: subcommands, JSON reports and the fingerprint cache.
#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oligo/cache.hpp"
#include "oligo/genstab.hpp"
#include "oligo/invariant.hpp"
#include "oligo/lattice.hpp"
#include "oligo/outer.hpp"
#include "oligo/wei.hpp"

namespace oligo::cli {

enum Exit : int { kOk = 0, kNegative = 1, kUsage = 2, kBudget = 3 };

namespace detail {

using nlohmann::json;

inline json labels_of(const Window& w, const std::vector<Point>& pts) {
  json a = json::array();
  for (Point p : pts) a.push_back(w.labels[p]);
  return a;
}

inline json closed_json(const Window& w, const ClosedSet& k) {
  return {{"points", k.points}, {"labels", labels_of(w, k.points)}};
}

inline json group_type_json(const GroupType& t) {
  return {{"order", t.order.str()}, {"abelian", t.abelian}, {"cyclic", t.cyclic}, {"name", t.name}};
}

inline std::string named_cycles(const Permutation& p, const std::vector<std::string>& names) {
  std::string s;
  std::vector<char> seen(p.degree(), 0);
  for (std::size_t i = 0; i < p.degree(); ++i) {
    if (seen[i] || p(static_cast<Point>(i)) == static_cast<Point>(i)) continue;
    s += "(";
    std::size_t j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = 1;
      if (!first) s += " ";
      s += names[j];
      first = false;
      j = static_cast<std::size_t>(p(static_cast<Point>(j)));
    }
    s += ")";
  }
  return s.empty() ? "()" : s;
}

struct Common {
  std::string spec, a, b;
  int level = 2, n_max = 3, k = 0, gen_size = 2, tuple_size = 2, age_size = 5, dim = 2;
  std::string cache_dir, dot;
  bool no_cache = false;
  std::uint64_t budget = 0;
  unsigned threads = 1;
};

inline json wrap(const std::string& command, json body) {
  json j = std::move(body);
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  return j;
}

inline int cmd_catalog(std::ostream& out, std::ostream& err) {
  json entries = json::array();
  for (const auto& e : catalog()) {
    entries.push_back({{"name", e.spec.name()},
                       {"spec", spec_to_json(e.spec)},
                       {"algebraicity", e.algebraicity},
                       {"wei", e.wei},
                       {"k_M", e.k_m},
                       {"outer", e.outer}});
    err << e.spec.name() << "\n";
  }
  out << wrap("catalog", {{"entries", entries}}).dump(2) << "\n";
  return kOk;
}

inline int cmd_invariant(const Common& c, Budget* budget, std::ostream& out, std::ostream& err) {
  StructureSpec spec = load_spec(c.spec);
  FingerprintParams p;
  p.level = c.level;
  p.n_max = c.n_max;
  p.k_range = c.k;
  std::string payload;
  std::optional<FingerprintCache> cache;
  std::string key;
  if (!c.no_cache) {
    cache.emplace(c.cache_dir.empty() ? FingerprintCache::default_dir() : std::filesystem::path(c.cache_dir));
    json pj = {{"level", p.level}, {"n_max", p.n_max}, {"k_range", p.k_range}};
    key = FingerprintCache::key_for(spec_to_json(spec).dump(), pj.dump(), kToolVersion);
    if (auto hit = cache->get(key)) {
      payload = *hit;
      err << "cache hit " << key << "\n";
    }
  }
  if (payload.empty()) {
    payload = fingerprint(spec, p, c.threads, budget).bytes();
    if (cache) {
      cache->put(key, payload);
      err << "cache store " << key << "\n";
    }
  }
  Fingerprint f = Fingerprint::from_json(json::parse(payload));
  for (const auto& e : f.per_k)
    err << spec.name() << " k=" << e.k << " atoms=" << e.atoms << " digest=" << e.canonical_digest.substr(0, 16) << "\n";
  out << wrap("invariant", {{"fingerprint", json::parse(payload)}}).dump(2) << "\n";
  return kOk;
}

inline int cmd_compare(const Common& c, Budget* budget, std::ostream& out, std::ostream& err) {
  StructureSpec a = load_spec(c.a), b = load_spec(c.b);
  FingerprintParams p;
  p.level = c.level;
  p.n_max = c.n_max;
  p.k_range = c.k;
  CompareResult r = compare(a, b, p, budget);
  json j = {{"a", spec_to_json(a)}, {"b", spec_to_json(b)}, {"verdict", r.iso ? "ISO" : "DISTINGUISHED"}};
  if (r.iso) {
    json maps = json::array();
    for (std::size_t i = 0; i < r.maps.size(); ++i) maps.push_back({{"k", i + 1}, {"atom_map", r.maps[i]}});
    j["isomorphisms"] = maps;
    j["verified"] = r.verified;
    err << "ISO (verified isomorphism for k = 1.." << r.maps.size() << ")\n";
  } else {
    j["k"] = r.k;
    j["field"] = r.field;
    err << "DISTINGUISHED at k=" << r.k << " by " << r.field << "\n";
  }
  out << wrap("compare", j).dump(2) << "\n";
  return r.iso ? kOk : kNegative;
}

inline int cmd_wei(const Common& c, Budget* budget, std::ostream& out, std::ostream& err) {
  StructureSpec spec = load_spec(c.spec);
  WeiParams prm;
  prm.gen_size = c.gen_size;
  prm.tuple_len = c.tuple_size;
  prm.level = c.level;
  WeiVerdict v = wei_check(spec, prm, c.threads, budget);
  json j = {{"spec", spec_to_json(spec)},
            {"verdict", v.fail ? "FAIL" : "CONSISTENT"},
            {"params", {{"gen_size", prm.gen_size}, {"tuple_size", prm.tuple_len}, {"level", prm.level}}},
            {"pairs_tested", v.pairs_tested}};
  if (v.witness) {
    Window w = build_window(spec, prm.level);
    const auto& x = *v.witness;
    auto tuples = [&](const std::vector<Tuple>& ts) {
      json a = json::array();
      for (const auto& t : ts) a.push_back(labels_of(w, t));
      return a;
    };
    j["witness"] = {{"A", closed_json(w, x.A)},
                    {"B", closed_json(w, x.B)},
                    {"tuple", labels_of(w, x.tuple)},
                    {"alternation_orbit", tuples(x.alternation_orbit)},
                    {"reference_orbit", tuples(x.reference_orbit)}};
    err << "FAIL: alternation orbit " << x.alternation_orbit.size() << " vs reference orbit "
        << x.reference_orbit.size() << "\n";
  } else {
    err << "CONSISTENT at gen_size=" << prm.gen_size << " tuple_size=" << prm.tuple_len << " level=" << prm.level << "\n";
  }
  out << wrap("wei", j).dump(2) << "\n";
  return v.fail ? kNegative : kOk;
}

inline int cmd_outer(const Common& c, Budget* budget, std::ostream& out, std::ostream& err) {
  StructureSpec spec = load_spec(c.spec);
  if (spec.kind == Kind::vector_space) {
    GlvReport r = glv_kernel_check(spec.param, c.dim, budget);
    json kernel = json::array();
    for (const auto& e : r.kernel) kernel.push_back({{"f_exponent", e.f_exponent}, {"nu", e.nu}});
    json j = {{"spec", spec_to_json(spec)},
              {"glv_kernel",
               {{"q", r.q},
                {"d", r.d},
                {"lines", r.lines},
                {"atoms", r.atoms},
                {"kernel_order", r.kernel_order.str()},
                {"aut_fx_order", r.aut_fx_order.str()},
                {"abelian", r.kernel_abelian},
                {"matches_aut_fx", r.matches},
                {"elements_verified", r.elements_verified},
                {"gl_section_ok", r.gl_section_ok},
                {"elements", kernel}}}};
    err << "GL kernel order " << r.kernel_order << ", Aut(F^x) order " << r.aut_fx_order << "\n";
    out << wrap("outer", j).dump(2) << "\n";
    return kOk;
  }
  OuterResult r = outer_group(spec, c.age_size);
  Window w = build_window(spec, c.level);
  json acc = json::array(), rej = json::array();
  for (const auto& s : r.accepted) {
    json e = {{"sigma", named_cycles(s, r.classes)}, {"images", s.images()}};
    auto pi = realize_outer(w, s, budget);
    e["realized_in_window"] = static_cast<bool>(pi);
    if (pi) e["window_map"] = pi->images();
    acc.push_back(e);
  }
  for (const auto& [s, col] : r.rejected) {
    std::size_t n = 0;
    while (n * n < col.size()) ++n;
    json m = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < n; ++k) row.push_back(i == k ? std::string("-") : r.classes[col[i * n + k]]);
      m.push_back(row);
    }
    rej.push_back({{"sigma", named_cycles(s, r.classes)}, {"witness", m}});
  }
  json j = {{"spec", spec_to_json(spec)},
            {"age_size", c.age_size},
            {"classes", r.classes},
            {"group", group_type_json(r.type)},
            {"accepted", acc},
            {"rejected", rej}};
  err << "outer group " << r.type.name << " (order " << r.type.order << ")\n";
  out << wrap("outer", j).dump(2) << "\n";
  return kOk;
}

inline int cmd_lattice(const Common& c, Budget* budget, std::ostream& out, std::ostream& err) {
  StructureSpec spec = load_spec(c.spec);
  Window w = build_window(spec, c.level);
  ClosureLattice lat = build_lattice(w, c.gen_size, budget);
  json nodes = json::array();
  for (std::size_t i = 0; i < lat.nodes.size(); ++i) {
    json n = closed_json(w, lat.nodes[i]);
    n["depth"] = lat.depth[i];
    nodes.push_back(n);
  }
  json edges = json::array();
  for (auto [l, u] : lat.hasse_edges) edges.push_back({l, u});
  int km = compute_kM(w);
  json j = {{"spec", spec_to_json(spec)}, {"level", c.level}, {"window_size", w.n}, {"max_generators", c.gen_size},
            {"nodes", nodes}, {"hasse_edges", edges}, {"bottom", lat.bottom}, {"height", lat.height()}, {"k_M", km}};
  if (!c.dot.empty()) {
    std::ofstream f(c.dot);
    if (!f) throw std::invalid_argument("cannot write " + c.dot);
    f << lattice_dot(lat, w);
  }
  err << lat.nodes.size() << " nodes, height " << lat.height() << ", k_M = " << km << "\n";
  out << wrap("lattice", j).dump(2) << "\n";
  return kOk;
}

inline int cmd_genstab(const Common& c, Budget* budget, std::ostream& out, std::ostream& err) {
  StructureSpec spec = load_spec(c.spec);
  Window w = build_window(spec, c.level);
  ClosureLattice lat = build_lattice(w, c.gen_size, budget);
  PermGroup gw = window_group(w, budget);
  json rows = json::array();
  std::size_t verified = 0;
  for (const auto& k : lat.nodes) {
    if (k.points.empty()) continue;
    PermGroup aut = aut_closed(w, k);
    for (const PermGroup& l : {PermGroup(k.points.size()), aut}) {
      GenStab h = gen_stabilizer(gw, k, l, &aut, budget);
      auto cls = classify_subgroup(gw, h.group, lat, budget);
      std::string verdict = "unclassified";
      if (cls) verdict = cls->verified ? (cls->K == k ? "classified" : "classified_smaller") : "unverified";
      if (cls && cls->verified) ++verified;
      json row = {{"K", closed_json(w, k)},
                  {"order_L", l.order().str()},
                  {"order_realized", h.group.order().str()},
                  {"verdict", verdict}};
      if (cls) row["least_K"] = closed_json(w, cls->K);
      rows.push_back(row);
    }
  }
  json j = {{"spec", spec_to_json(spec)}, {"level", c.level}, {"window_group_order", gw.order().str()}, {"rows", rows}};
  err << rows.size() << " rows, " << verified << " verified classifications\n";
  out << wrap("genstab", j).dump(2) << "\n";
  return kOk;
}

}  // namespace detail

// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oligomorphic group toolkit: WEI checks, expanded orbital structures and fingerprints"};
  app.require_subcommand(1);
  detail::Common c;

  auto add_spec = [&](CLI::App* s) { s->add_option("--spec", c.spec, "structure spec file (JSON)")->required(); };
  auto add_level = [&](CLI::App* s) { s->add_option("--window-level", c.level, "window level")->check(CLI::NonNegativeNumber); };
  auto add_run = [&](CLI::App* s) {
    s->add_option("--budget", c.budget, "search node cap (0: unbounded)");
    s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto add_eex = [&](CLI::App* s) {
    s->add_option("--nmax", c.n_max, "largest E_n arity")->check(CLI::Range(2, 6));
    s->add_option("--k", c.k, "k range (0: max(k_M, 1))")->check(CLI::NonNegativeNumber);
  };

  auto* catalog_cmd = app.add_subcommand("catalog", "list the built-in structures");
  auto* inv = app.add_subcommand("invariant", "fingerprint of the windowed E^ex");
  add_spec(inv);
  add_level(inv);
  add_eex(inv);
  add_run(inv);
  inv->add_option("--cache", c.cache_dir, "cache directory");
  inv->add_flag("--no-cache", c.no_cache, "skip the cache");
  auto* cmp = app.add_subcommand("compare", "compare two structures through their E^ex");
  cmp->add_option("-a,--a", c.a, "first spec file")->required();
  cmp->add_option("-b,--b", c.b, "second spec file")->required();
  add_level(cmp);
  add_eex(cmp);
  add_run(cmp);
  auto* wei = app.add_subcommand("wei", "orbit-alternation WEI check");
  add_spec(wei);
  add_level(wei);
  add_run(wei);
  wei->add_option("--gen-size", c.gen_size, "closure generators per set")->check(CLI::PositiveNumber);
  wei->add_option("--tuple-size", c.tuple_size, "tuple length")->check(CLI::PositiveNumber);
  auto* outer = app.add_subcommand("outer", "outer automorphisms via age-preserving recolorings");
  add_spec(outer);
  add_level(outer);
  add_run(outer);
  outer->add_option("--age-size", c.age_size, "largest age member checked")->check(CLI::Range(3, 7));
  outer->add_option("--dim", c.dim, "dimension for the GL(V) kernel check")->check(CLI::Range(2, 4));
  auto* lat = app.add_subcommand("lattice", "closure lattice of a window");
  add_spec(lat);
  add_level(lat);
  add_run(lat);
  lat->add_option("--gen-size", c.gen_size, "closure generators per node")->check(CLI::PositiveNumber);
  lat->add_option("--dot", c.dot, "write the Hasse diagram as DOT");
  auto* gs = app.add_subcommand("genstab", "generalized pointwise stabilizers over lattice nodes");
  add_spec(gs);
  add_level(gs);
  add_run(gs);
  gs->add_option("--gen-size", c.gen_size, "closure generators per node")->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  Budget budget(c.budget);
  try {
    if (*catalog_cmd) return detail::cmd_catalog(out, err);
    if (*inv) return detail::cmd_invariant(c, &budget, out, err);
    if (*cmp) return detail::cmd_compare(c, &budget, out, err);
    if (*wei) return detail::cmd_wei(c, &budget, out, err);
    if (*outer) return detail::cmd_outer(c, &budget, out, err);
    if (*lat) return detail::cmd_lattice(c, &budget, out, err);
    if (*gs) return detail::cmd_genstab(c, &budget, out, err);
  } catch (const BudgetExceeded& e) {
    err << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace oligo::cli
