// StructureSpec <-> JSON.
#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oligo/structures.hpp"

namespace oligo {

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw std::invalid_argument("spec: unknown key '" + it.key() + "'");
}

inline int int_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) throw std::invalid_argument(std::string("spec: missing integer '") + key + "'");
  return j.at(key).get<int>();
}

}  // namespace detail

inline StructureSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) throw std::invalid_argument("spec: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pure_set" || kind == "dlo" || kind == "random_graph") {
    detail::reject_unknown(j, {"kind"});
    return make_spec(kind == "pure_set" ? Kind::pure_set : kind == "dlo" ? Kind::dlo : Kind::random_graph);
  }
  if (kind == "henson") {
    detail::reject_unknown(j, {"kind", "m"});
    return make_spec(Kind::henson, detail::int_field(j, "m"));
  }
  if (kind == "colored_graph") {
    detail::reject_unknown(j, {"kind", "colors"});
    return make_spec(Kind::colored_graph, detail::int_field(j, "colors"));
  }
  if (kind == "equivalence") {
    detail::reject_unknown(j, {"kind", "classes"});
    return make_spec(Kind::equivalence, detail::int_field(j, "classes"));
  }
  if (kind == "vector_space") {
    detail::reject_unknown(j, {"kind", "q"});
    return make_spec(Kind::vector_space, detail::int_field(j, "q"));
  }
  if (kind == "finite") {
    detail::reject_unknown(j, {"kind", "domain", "relations"});
    FiniteStructure fs;
    int n = detail::int_field(j, "domain");
    if (n < 1) throw std::invalid_argument("spec: domain must be positive");
    fs.domain_size = static_cast<std::size_t>(n);
    if (j.contains("relations")) {
      const auto& rels = j.at("relations");
      if (!rels.is_object()) throw std::invalid_argument("spec: 'relations' must be an object");
      for (auto it = rels.begin(); it != rels.end(); ++it) {
        if (!it.value().is_array()) throw std::invalid_argument("spec: relation " + it.key() + " must be a list of tuples");
        int arity = -1;
        auto& set = fs.relations[it.key()];
        for (const auto& t : it.value()) {
          if (!t.is_array()) throw std::invalid_argument("spec: relation " + it.key() + " has a non-tuple entry");
          std::vector<Point> tup = t.get<std::vector<Point>>();
          if (arity < 0) arity = static_cast<int>(tup.size());
          if (static_cast<int>(tup.size()) != arity) throw std::invalid_argument("spec: relation " + it.key() + " mixes arities");
          set.insert(tup);
        }
        fs.signature.emplace_back(it.key(), std::max(arity, 0));
      }
    }
    return make_finite_spec(std::move(fs));
  }
  throw std::invalid_argument("spec: unknown kind '" + kind + "'");
}

inline nlohmann::json spec_to_json(const StructureSpec& s) {
  nlohmann::json j;
  j["kind"] = kind_name(s.kind);
  switch (s.kind) {
    case Kind::henson: j["m"] = s.param; break;
    case Kind::colored_graph: j["colors"] = s.param; break;
    case Kind::equivalence: j["classes"] = s.param; break;
    case Kind::vector_space: j["q"] = s.param; break;
    case Kind::finite: {
      j["domain"] = s.finite->domain_size;
      j["relations"] = nlohmann::json::object();
      for (const auto& [name, arity] : s.finite->signature) {
        nlohmann::json tuples = nlohmann::json::array();
        auto it = s.finite->relations.find(name);
        if (it != s.finite->relations.end())
          for (const auto& t : it->second) tuples.push_back(t);
        j["relations"][name] = tuples;
      }
      break;
    }
    default: break;
  }
  return j;
}

inline StructureSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed spec file " + path + ": " + e.what());
  }
  return spec_from_json(j);
}

}  // namespace oligo
