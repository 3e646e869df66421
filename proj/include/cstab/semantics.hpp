#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cstab/formula.hpp"
#include "cstab/prefixed.hpp"

namespace cstab {

using WorldId = int;
using WorldPair = std::pair<WorldId, WorldId>;

// Finite model whose accessibility relation is indexed by formulas
// themselves: syntactically distinct antecedents get independent
// relations, even when they are logically equivalent.
struct PriestModel {
  std::set<WorldId> worlds;
  std::map<Formula, std::set<WorldPair>> access;
  std::map<std::string, std::set<WorldId>> valuation;

  bool has_world(WorldId w) const { return worlds.count(w) > 0; }

  const std::set<WorldPair>& relation(const Formula& f) const {
    static const std::set<WorldPair> empty;
    auto it = access.find(f);
    return it == access.end() ? empty : it->second;
  }

  std::set<WorldId> successors(const Formula& f, WorldId x) const {
    std::set<WorldId> out;
    for (const auto& [a, b] : relation(f))
      if (a == x) out.insert(b);
    return out;
  }

  bool atom_true(const std::string& name, WorldId x) const {
    auto it = valuation.find(name);
    return it != valuation.end() && it->second.count(x) > 0;
  }
};

inline bool eval(const PriestModel& m, WorldId x, const Formula& f) {
  if (!m.has_world(x))
    throw std::out_of_range("eval: unknown world id " + std::to_string(x));
  switch (f.kind()) {
    case Conn::Bottom: return false;
    case Conn::Top: return true;
    case Conn::Atom: return m.atom_true(f.atom_name(), x);
    case Conn::Not: return !eval(m, x, f.operand());
    case Conn::And: return eval(m, x, f.left()) && eval(m, x, f.right());
    case Conn::Or: return eval(m, x, f.left()) || eval(m, x, f.right());
    case Conn::Imp: return !eval(m, x, f.left()) || eval(m, x, f.right());
    case Conn::Nec: {
      for (WorldId y : m.successors(f.antecedent(), x))
        if (!eval(m, y, f.consequent())) return false;
      return true;
    }
    case Conn::Poss: {
      for (WorldId y : m.successors(f.antecedent(), x))
        if (eval(m, y, f.consequent())) return true;
      return false;
    }
  }
  return false;
}

// Truth set of f, written [f] elsewhere.
inline std::set<WorldId> truth_set(const PriestModel& m, const Formula& f) {
  std::set<WorldId> out;
  for (WorldId w : m.worlds)
    if (eval(m, w, f)) out.insert(w);
  return out;
}

// Maps branch indices to worlds; must be total on the set under evaluation.
struct Assignment {
  std::map<int, WorldId> map;

  static Assignment identity(const std::set<int>& indices) {
    Assignment f;
    for (int i : indices) f.map[i] = i;
    return f;
  }

  WorldId operator()(Index i) const {
    auto it = map.find(i.value);
    if (it == map.end())
      throw std::invalid_argument("assignment is partial: no world for index " +
                                  std::to_string(i.value));
    return it->second;
  }
};

inline bool satisfies_prefixed(const PriestModel& m, const Assignment& f,
                               std::span<const PrefixedFormula> items) {
  for (const auto& pf : items) {
    if (pf.is_at()) {
      if (!eval(m, f(pf.index()), pf.formula())) return false;
    } else {
      const WorldPair edge{f(pf.index()), f(pf.target())};
      if (!m.relation(pf.formula()).count(edge)) return false;
    }
  }
  return true;
}

inline bool satisfies_prefixed(const PriestModel& m, const Assignment& f, const Branch& b) {
  return satisfies_prefixed(m, f, b.items());
}

// Reads a model straight off an open branch: worlds are the indices,
// r-facts become the accessibility entries, positive atoms the valuation.
// Meaningful when the branch is open and saturated under the ck rules.
inline std::pair<PriestModel, Assignment> extract_model(const Branch& b) {
  PriestModel m;
  for (int i : b.indices()) m.worlds.insert(i);
  for (const auto& pf : b.items()) {
    if (pf.is_rel()) {
      m.access[pf.formula()].insert({pf.index().value, pf.target().value});
    } else if (pf.formula().is(Conn::Atom)) {
      m.valuation[pf.formula().atom_name()].insert(pf.index().value);
    }
  }
  return {std::move(m), Assignment::identity(b.indices())};
}

// The six conditions a model must satisfy to be adequate for the V-rules,
// plus the successor-uniqueness condition behind cem.
enum class ConditionId { C1, C2, C3, C4, C5, C6, Cem };

inline const char* condition_name(ConditionId c) {
  switch (c) {
    case ConditionId::C1: return "1";
    case ConditionId::C2: return "2";
    case ConditionId::C3: return "3";
    case ConditionId::C4: return "4";
    case ConditionId::C5: return "5";
    case ConditionId::C6: return "6";
    case ConditionId::Cem: return "cem";
  }
  return "?";
}

inline std::optional<ConditionId> condition_from_name(std::string_view s) {
  for (ConditionId c : {ConditionId::C1, ConditionId::C2, ConditionId::C3, ConditionId::C4,
                        ConditionId::C5, ConditionId::C6, ConditionId::Cem})
    if (s == condition_name(c)) return c;
  return std::nullopt;
}

inline std::vector<ConditionId> vc_conditions() {
  return {ConditionId::C1, ConditionId::C2, ConditionId::C3,
          ConditionId::C4, ConditionId::C5, ConditionId::C6};
}

// Conditions a countermodel must pass to certify a non-provability verdict
// for the given logic. ck and CK certify at the bare model level: CK's ea
// rule has no formula-indexed counterpart to check.
inline std::vector<ConditionId> conditions_for_logic(std::string_view name) {
  if (name == "vc" || name == "VC") return vc_conditions();
  if (name == "VCS") {
    auto cs = vc_conditions();
    cs.push_back(ConditionId::Cem);
    return cs;
  }
  return {};
}

// First violation found for a condition: the worlds plus the vocabulary
// formulas of the failing quantifier instance.
struct ConditionCounterexample {
  WorldId x = 0;
  std::optional<WorldId> y;
  std::optional<WorldId> z;
  std::vector<Formula> formulas;

  std::string to_string() const {
    std::string out = "x=" + std::to_string(x);
    if (y) out += ", y=" + std::to_string(*y);
    if (z) out += ", z=" + std::to_string(*z);
    for (const auto& f : formulas) out += ", " + f.to_string();
    return out;
  }
};

struct ConditionVerdict {
  ConditionId id;
  bool satisfied = true;
  std::optional<ConditionCounterexample> counterexample;
};

struct ConditionReport {
  std::vector<ConditionVerdict> verdicts;

  bool all_satisfied() const {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const ConditionVerdict& v) { return v.satisfied; });
  }
  const ConditionVerdict* find(ConditionId id) const {
    for (const auto& v : verdicts)
      if (v.id == id) return &v;
    return nullptr;
  }
};

namespace detail {

inline ConditionVerdict check_one_condition(const PriestModel& m, ConditionId id,
                                            const std::vector<Formula>& vocab) {
  ConditionVerdict v{id, true, {}};
  auto violate = [&](ConditionCounterexample cex) {
    v.satisfied = false;
    v.counterexample = std::move(cex);
  };
  switch (id) {
    case ConditionId::C1:  // successors under phi satisfy phi
      for (const auto& phi : vocab) {
        for (WorldId x : m.worlds)
          for (WorldId y : m.successors(phi, x))
            if (!eval(m, y, phi)) return violate({x, y, {}, {phi}}), v;
      }
      break;
    case ConditionId::C2:  // a phi-successor satisfying psi forces some psi-successor
      for (const auto& phi : vocab) {
        for (const auto& psi : vocab) {
          for (WorldId x : m.worlds) {
            bool lhs = false;
            WorldId witness = 0;
            for (WorldId y : m.successors(phi, x))
              if (eval(m, y, psi)) {
                lhs = true;
                witness = y;
                break;
              }
            if (lhs && m.successors(psi, x).empty())
              return violate({x, witness, {}, {phi, psi}}), v;
          }
        }
      }
      break;
    case ConditionId::C3:  // true-successors collapse to the world itself
      for (const auto& [a, b] : m.relation(Formula::top()))
        if (a != b) return violate({a, b, {}, {Formula::top()}}), v;
      break;
    case ConditionId::C4:  // every world is a phi-successor of itself
      for (const auto& phi : vocab) {
        for (WorldId x : m.worlds)
          if (!m.relation(phi).count({x, x})) return violate({x, {}, {}, {phi}}), v;
      }
      break;
    case ConditionId::C5:  // phi-successors in [psi] are phi&psi-successors
      for (const auto& phi : vocab) {
        for (const auto& psi : vocab) {
          const Formula conj = phi && psi;
          for (WorldId x : m.worlds)
            for (WorldId y : m.successors(phi, x))
              if (eval(m, y, psi) && !m.relation(conj).count({x, y}))
                return violate({x, y, {}, {phi, psi}}), v;
        }
      }
      break;
    case ConditionId::C6:  // then phi&psi-successors sit inside that intersection
      for (const auto& phi : vocab) {
        for (const auto& psi : vocab) {
          const Formula conj = phi && psi;
          for (WorldId x : m.worlds) {
            bool lhs = false;
            for (WorldId y : m.successors(phi, x))
              if (eval(m, y, psi)) {
                lhs = true;
                break;
              }
            if (!lhs) continue;
            for (WorldId y : m.successors(conj, x))
              if (!m.relation(phi).count({x, y}) || !eval(m, y, psi))
                return violate({x, y, {}, {phi, psi}}), v;
          }
        }
      }
      break;
    case ConditionId::Cem:  // at most one phi-successor per world
      for (const auto& phi : vocab) {
        for (WorldId x : m.worlds) {
          const auto succ = m.successors(phi, x);
          if (succ.size() > 1) {
            auto it = succ.begin();
            const WorldId y = *it++;
            const WorldId z = *it;
            return violate({x, y, z, {phi}}), v;
          }
        }
      }
      break;
  }
  return v;
}

}  // namespace detail

// Checks the requested conditions with the quantified formula variables
// ranging over `vocab`. The conditions quantify over all formulas, which is
// not checkable; vocabulary-relative checking covers what a tableau and its
// extracted model can mention.
inline ConditionReport check_conditions(const PriestModel& m, const std::set<Formula>& vocab,
                                        const std::vector<ConditionId>& which = vc_conditions()) {
  const std::vector<Formula> vs(vocab.begin(), vocab.end());
  ConditionReport report;
  for (ConditionId id : which) report.verdicts.push_back(detail::check_one_condition(m, id, vs));
  return report;
}

struct BruteForceOptions {
  int max_worlds = 3;
  std::vector<ConditionId> conditions;  // empty: no model-class filter
  long budget = 4'000'000;              // models examined before giving up
};

struct BruteForceOutcome {
  bool exhausted = false;  // full space up to the bound was searched
  std::optional<PriestModel> countermodel;
  std::optional<WorldId> world;  // where the goal fails
  long examined = 0;

  bool valid_up_to_bound() const { return exhausted && !countermodel; }
};

namespace detail {

// Odometer over k slots with `bits` binary digits each.
struct BitOdometer {
  std::vector<unsigned long> slots;
  unsigned long limit;

  BitOdometer(std::size_t k, int bits) : slots(k, 0), limit(1ul << bits) {}

  bool next() {
    for (auto& s : slots) {
      if (++s < limit) return true;
      s = 0;
    }
    return false;
  }
};

}  // namespace detail

// Exhaustive search over models whose accessibility is keyed by the goal's
// modal antecedents and whose valuation covers its atoms, up to the world
// bound. With a condition filter, conjunction relations for (5)/(6) are
// completed pointwise before checking, so the filter is testable with the
// antecedent vocabulary.
inline BruteForceOutcome brute_force_valid(const Formula& goal,
                                           const BruteForceOptions& opts = {}) {
  const std::set<Formula> ant_set = antecedents(goal);
  const std::set<std::string> atom_set = atom_names(goal);
  const std::vector<Formula> keys(ant_set.begin(), ant_set.end());
  const std::vector<std::string> atoms(atom_set.begin(), atom_set.end());

  BruteForceOutcome out;
  for (int n = 1; n <= opts.max_worlds; ++n) {
    const int npairs = n * n;
    // quick budget estimate for this world count
    const double space = static_cast<double>(atoms.size()) * n +
                         static_cast<double>(keys.size()) * npairs;
    if (space > 62) {
      return out;  // would overflow the odometer; budget exceeded
    }
    std::vector<WorldPair> pairs;
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b) pairs.push_back({a, b});

    detail::BitOdometer vals(atoms.size(), n);
    do {
      detail::BitOdometer rels(keys.size(), npairs);
      do {
        if (out.examined++ >= opts.budget) return out;
        PriestModel m;
        for (int w = 1; w <= n; ++w) m.worlds.insert(w);
        for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
          auto& ws = m.valuation[atoms[ai]];
          for (int w = 0; w < n; ++w)
            if (vals.slots[ai] >> w & 1ul) ws.insert(w + 1);
        }
        for (std::size_t ki = 0; ki < keys.size(); ++ki) {
          auto& rel = m.access[keys[ki]];
          for (int pi = 0; pi < npairs; ++pi)
            if (rels.slots[ki] >> pi & 1ul) rel.insert(pairs[pi]);
        }
        if (!opts.conditions.empty()) {
          // complete the derived conjunction relations unless enumerated
          for (const auto& phi : keys) {
            for (const auto& psi : keys) {
              const Formula conj = phi && psi;
              if (ant_set.count(conj)) continue;
              auto& rel = m.access[conj];
              for (WorldId x : m.worlds)
                for (WorldId y : m.successors(phi, x))
                  if (eval(m, y, psi)) rel.insert({x, y});
            }
          }
          if (!check_conditions(m, ant_set, opts.conditions).all_satisfied()) continue;
        }
        for (WorldId w : m.worlds) {
          if (!eval(m, w, goal)) {
            out.countermodel = std::move(m);
            out.world = w;
            return out;
          }
        }
      } while (rels.next());
    } while (vals.next());
  }
  out.exhausted = true;
  return out;
}

}  // namespace cstab
