#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "cstab/engine.hpp"
#include "cstab/parse.hpp"
#include "cstab/semantics.hpp"

namespace cstab {

using nlohmann::json;

// --------------------------------------------------------------------------
// Prefixed formulas: {"index":i,"formula":s} / {"from":i,"to":j,"formula":s}

inline json to_json(const PrefixedFormula& pf) {
  if (pf.is_at()) return json{{"index", pf.index().value}, {"formula", pf.formula().to_string()}};
  return json{{"from", pf.index().value},
              {"to", pf.target().value},
              {"formula", pf.formula().to_string()}};
}

inline PrefixedFormula prefixed_from_json(const json& j) {
  const Formula f = parse_formula(j.at("formula").get<std::string>());
  if (j.contains("from"))
    return rel(j.at("from").get<int>(), j.at("to").get<int>(), f);
  return at(j.at("index").get<int>(), f);
}

// --------------------------------------------------------------------------
// Models: worlds, valuation, and access as (formula, from, to) triples.

inline json to_json(const PriestModel& m) {
  json worlds = json::array();
  for (WorldId w : m.worlds) worlds.push_back(w);
  json valuation = json::object();
  for (const auto& [name, ws] : m.valuation) {
    json arr = json::array();
    for (WorldId w : ws) arr.push_back(w);
    valuation[name] = arr;
  }
  json access = json::array();
  for (const auto& [f, rel] : m.access)
    for (const auto& [a, b] : rel) access.push_back(json::array({f.to_string(), a, b}));
  return json{{"worlds", worlds}, {"valuation", valuation}, {"access", access}};
}

namespace detail {

// every world the valuation or access mentions must be declared
inline void require_declared_worlds(const PriestModel& m) {
  auto check = [&](WorldId w) {
    if (!m.has_world(w))
      throw std::runtime_error("model references undeclared world " + std::to_string(w));
  };
  for (const auto& [name, ws] : m.valuation)
    for (WorldId w : ws) check(w);
  for (const auto& [f, rel] : m.access)
    for (const auto& [a, b] : rel) {
      check(a);
      check(b);
    }
}

}  // namespace detail

inline PriestModel model_from_json(const json& j) {
  PriestModel m;
  for (const auto& w : j.at("worlds")) m.worlds.insert(w.get<int>());
  if (j.contains("valuation"))
    for (auto it = j.at("valuation").begin(); it != j.at("valuation").end(); ++it)
      for (const auto& w : it.value()) m.valuation[it.key()].insert(w.get<int>());
  if (j.contains("access"))
    for (const auto& entry : j.at("access")) {
      const Formula f = parse_formula(entry.at(0).get<std::string>());
      m.access[f].insert({entry.at(1).get<int>(), entry.at(2).get<int>()});
    }
  detail::require_declared_worlds(m);
  return m;
}

// Text form, one declaration per line:
//   worlds: 1 2 3
//   atom p: 1 3
//   r(1,2): p -> q
inline std::string model_to_text(const PriestModel& m) {
  std::string out = "worlds:";
  for (WorldId w : m.worlds) out += " " + std::to_string(w);
  out += '\n';
  for (const auto& [name, ws] : m.valuation) {
    out += "atom " + name + ":";
    for (WorldId w : ws) out += " " + std::to_string(w);
    out += '\n';
  }
  for (const auto& [f, rel] : m.access)
    for (const auto& [a, b] : rel)
      out += "r(" + std::to_string(a) + "," + std::to_string(b) + "): " + f.to_string() + '\n';
  return out;
}

inline PriestModel model_from_text(const std::string& text) {
  PriestModel m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    throw std::runtime_error("model line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line.compare(first, 7, "worlds:") == 0) {
      std::istringstream ws(line.substr(first + 7));
      int w;
      while (ws >> w) m.worlds.insert(w);
    } else if (line.compare(first, 5, "atom ") == 0) {
      std::size_t colon = line.find(':', first);
      if (colon == std::string::npos) bad("missing ':'");
      std::string name = line.substr(first + 5, colon - first - 5);
      while (!name.empty() && name.back() == ' ') name.pop_back();
      std::istringstream ws(line.substr(colon + 1));
      int w;
      while (ws >> w) m.valuation[name].insert(w);
    } else if (line.compare(first, 2, "r(") == 0) {
      std::size_t close = line.find(')', first);
      std::size_t comma = line.find(',', first);
      std::size_t colon = line.find(':', first);
      if (close == std::string::npos || comma == std::string::npos ||
          colon == std::string::npos || comma > close || close > colon)
        bad("expected r(i,j): formula");
      const int a = std::stoi(line.substr(first + 2, comma - first - 2));
      const int b = std::stoi(line.substr(comma + 1, close - comma - 1));
      const Formula f = parse_formula(line.substr(colon + 1));
      m.access[f].insert({a, b});
    } else {
      bad("unrecognized declaration");
    }
  }
  detail::require_declared_worlds(m);
  return m;
}

// --------------------------------------------------------------------------
// Proofs. Conclusions are recomputed from the schema on load, so a parsed
// proof is structurally identical to the one serialized.

inline json to_json(const RuleInstance& inst) {
  json j{{"rule", rule_name(inst.rule)}};
  json premises = json::array();
  for (const auto& p : inst.premises) premises.push_back(to_json(p));
  j["premises"] = premises;
  if (inst.side_formula) j["formula"] = inst.side_formula->to_string();
  if (inst.at_index) j["at"] = inst.at_index->value;
  if (inst.fresh) j["fresh"] = inst.fresh->value;
  return j;
}

inline RuleInstance instance_from_json(const json& j) {
  const auto rule = rule_from_name(j.at("rule").get<std::string>());
  if (!rule) throw std::runtime_error("unknown rule: " + j.at("rule").get<std::string>());
  std::vector<PrefixedFormula> premises;
  for (const auto& p : j.at("premises")) premises.push_back(prefixed_from_json(p));
  std::optional<Formula> side;
  if (j.contains("formula")) side = parse_formula(j.at("formula").get<std::string>());
  std::optional<Index> at_index;
  if (j.contains("at")) at_index = Index{j.at("at").get<int>()};
  std::optional<Index> fresh;
  if (j.contains("fresh")) fresh = Index{j.at("fresh").get<int>()};
  auto inst = make_instance(*rule, std::move(premises), std::move(side), at_index, fresh);
  if (!inst) throw std::runtime_error("instance does not match schema of rule " +
                                      j.at("rule").get<std::string>());
  return *inst;
}

inline json to_json(const ClosureWitness& w) {
  switch (w.kind) {
    case ClosureWitness::Kind::Pair:
      return json{{"kind", "pair"}, {"index", w.index.value}, {"formula", w.formula.to_string()}};
    case ClosureWitness::Kind::Falsum:
      return json{{"kind", "falsum"}, {"index", w.index.value}};
    case ClosureWitness::Kind::NegTop:
      return json{{"kind", "neg-top"}, {"index", w.index.value}};
  }
  return {};
}

inline ClosureWitness closure_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const Index i{j.at("index").get<int>()};
  if (kind == "pair")
    return {ClosureWitness::Kind::Pair, i, parse_formula(j.at("formula").get<std::string>())};
  if (kind == "falsum") return {ClosureWitness::Kind::Falsum, i, Formula::bottom()};
  if (kind == "neg-top") return {ClosureWitness::Kind::NegTop, i, Formula::top()};
  throw std::runtime_error("unknown closure kind: " + kind);
}

inline json to_json(const ProofNode& n) {
  json j;
  json added = json::array();
  for (const auto& pf : n.added) added.push_back(to_json(pf));
  j["added"] = added;
  j["just"] = n.justification ? to_json(*n.justification) : json(nullptr);
  j["alt"] = n.alt;
  json children = json::array();
  for (const auto& c : n.children) children.push_back(to_json(c));
  j["children"] = children;
  j["closure"] = n.closure ? to_json(*n.closure) : json(nullptr);
  return j;
}

inline ProofNode proof_node_from_json(const json& j) {
  ProofNode n;
  for (const auto& pf : j.at("added")) n.added.push_back(prefixed_from_json(pf));
  if (!j.at("just").is_null()) n.justification = instance_from_json(j.at("just"));
  n.alt = j.at("alt").get<int>();
  for (const auto& c : j.at("children")) n.children.push_back(proof_node_from_json(c));
  if (!j.at("closure").is_null()) n.closure = closure_from_json(j.at("closure"));
  return n;
}

inline json to_json(const Proof& p) {
  json assumptions = json::array();
  for (const auto& pf : p.assumptions) assumptions.push_back(to_json(pf));
  return json{{"logic", p.logic},
              {"ea_prime", p.ea_prime},
              {"assumptions", assumptions},
              {"tree", to_json(p.root)}};
}

inline Proof proof_from_json(const json& j) {
  Proof p;
  p.logic = j.at("logic").get<std::string>();
  p.ea_prime = j.value("ea_prime", false);
  for (const auto& pf : j.at("assumptions")) p.assumptions.push_back(prefixed_from_json(pf));
  p.root = proof_node_from_json(j.at("tree"));
  return p;
}

// --------------------------------------------------------------------------
// Condition reports.

inline json to_json(const ConditionReport& report) {
  json arr = json::array();
  for (const auto& v : report.verdicts) {
    json entry{{"condition", condition_name(v.id)}, {"satisfied", v.satisfied}};
    if (v.counterexample) {
      json cex{{"x", v.counterexample->x}};
      if (v.counterexample->y) cex["y"] = *v.counterexample->y;
      if (v.counterexample->z) cex["z"] = *v.counterexample->z;
      json fs = json::array();
      for (const auto& f : v.counterexample->formulas) fs.push_back(f.to_string());
      cex["formulas"] = fs;
      entry["counterexample"] = cex;
    }
    arr.push_back(entry);
  }
  return json{{"conditions", arr}};
}

}  // namespace cstab
