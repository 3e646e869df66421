#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cstab/formula.hpp"
#include "cstab/prefixed.hpp"

namespace cstab {

// Branch extension rules. The first eleven decompose connectives, cut and
// ea (with its analytic variant ea') splice in non-subformula content, and
// R1-R6 plus cem realize the accessibility conditions of the V-family.
enum class RuleId {
  Conj,
  NConj,
  Disj,
  NDisj,
  Imp,
  NImp,
  DNeg,
  Box,
  NBox,
  Diamond,
  NDiamond,
  Cut,
  Ea,
  EaPrime,
  R1,
  R2,
  R3,
  R4,
  R5,
  R6,
  Cem,
};

inline const std::vector<RuleId>& all_rule_ids() {
  static const std::vector<RuleId> ids = {
      RuleId::Conj, RuleId::NConj, RuleId::Disj,  RuleId::NDisj,    RuleId::Imp,
      RuleId::NImp, RuleId::DNeg,  RuleId::Box,   RuleId::NBox,     RuleId::Diamond,
      RuleId::NDiamond, RuleId::Cut, RuleId::Ea,  RuleId::EaPrime,  RuleId::R1,
      RuleId::R2,   RuleId::R3,    RuleId::R4,    RuleId::R5,       RuleId::R6,
      RuleId::Cem};
  return ids;
}

inline const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::Conj: return "conj";
    case RuleId::NConj: return "nconj";
    case RuleId::Disj: return "disj";
    case RuleId::NDisj: return "ndisj";
    case RuleId::Imp: return "imp";
    case RuleId::NImp: return "nimp";
    case RuleId::DNeg: return "dneg";
    case RuleId::Box: return "box";
    case RuleId::NBox: return "nbox";
    case RuleId::Diamond: return "diamond";
    case RuleId::NDiamond: return "ndiamond";
    case RuleId::Cut: return "cut";
    case RuleId::Ea: return "ea";
    case RuleId::EaPrime: return "ea'";
    case RuleId::R1: return "R1";
    case RuleId::R2: return "R2";
    case RuleId::R3: return "R3";
    case RuleId::R4: return "R4";
    case RuleId::R5: return "R5";
    case RuleId::R6: return "R6";
    case RuleId::Cem: return "cem";
  }
  return "?";
}

inline std::optional<RuleId> rule_from_name(std::string_view s) {
  for (RuleId r : all_rule_ids())
    if (s == rule_name(r)) return r;
  return std::nullopt;
}

// Search order. Lower ranks are applied first; ranks group into classes:
//   0-9   non-branching, no new indices, conclusions from premise material
//   10-12 branching decompositions
//   13-15 rules introducing a fresh index
//   16-20 synthesis rules: R5 builds a new conjunction index formula, R4
//         seeds true-loops that feed R2, and ea/ea'/cut are non-analytic.
// Keeping R5 and R4 behind the fresh-index class is what lets the S2/S5
// saturations reach their closing R2/R5 step instead of spinning.
inline int priority_rank(RuleId r) {
  switch (r) {
    case RuleId::Conj: return 0;
    case RuleId::NDisj: return 1;
    case RuleId::NImp: return 2;
    case RuleId::DNeg: return 3;
    case RuleId::Box: return 4;
    case RuleId::NDiamond: return 5;
    case RuleId::R1: return 6;
    case RuleId::R3: return 7;
    case RuleId::R6: return 8;
    case RuleId::Cem: return 9;
    case RuleId::NConj: return 10;
    case RuleId::Disj: return 11;
    case RuleId::Imp: return 12;
    case RuleId::NBox: return 13;
    case RuleId::Diamond: return 14;
    case RuleId::R2: return 15;
    case RuleId::R5: return 16;
    case RuleId::R4: return 17;
    case RuleId::Ea: return 18;
    case RuleId::EaPrime: return 19;
    case RuleId::Cut: return 20;
  }
  return 99;
}

inline int priority_class(RuleId r) {
  const int rank = priority_rank(r);
  if (rank <= 9) return 0;
  if (rank <= 12) return 1;
  if (rank <= 15) return 2;
  return 3;
}

inline bool introduces_fresh_index(RuleId r) {
  return r == RuleId::NBox || r == RuleId::Diamond || r == RuleId::R2 || r == RuleId::Ea ||
         r == RuleId::EaPrime;
}

// One concrete rule application: the matched premises, the instantiation
// of any free metavariables, and the conclusion set of every child branch.
struct RuleInstance {
  RuleId rule;
  std::vector<PrefixedFormula> premises;         // in schema display order
  std::optional<Formula> side_formula;           // cut formula / ea's psi
  std::optional<Index> at_index;                 // cut's i / R4's i
  std::optional<Index> fresh;                    // new index, when the rule has one
  std::vector<std::vector<PrefixedFormula>> alternatives;

  // Identity of the instance modulo the fresh-index choice; a branch never
  // applies two instances with the same fingerprint.
  std::string fingerprint() const {
    std::string fp = rule_name(rule);
    for (const auto& p : premises) {
      fp += '|';
      fp += p.to_string();
    }
    if (side_formula) {
      fp += "|f=";
      fp += side_formula->to_string();
    }
    if (at_index) {
      fp += "|i=";
      fp += std::to_string(at_index->value);
    }
    return fp;
  }
};

namespace detail {

inline bool is_not_of(const Formula& f, Conn inner) {
  return f.is(Conn::Not) && f.operand().is(inner);
}

}  // namespace detail

// Recomputes the conclusion alternatives of an instance from its rule,
// premises and instantiation. Returns nullopt when the premises do not
// match the rule schema. Branch-context side conditions (freshness, index
// occurrence) are checked separately against a concrete branch or path.
inline std::optional<std::vector<std::vector<PrefixedFormula>>> schema_conclusions(
    const RuleInstance& inst) {
  using Alts = std::vector<std::vector<PrefixedFormula>>;
  const auto& ps = inst.premises;
  auto one = [](std::vector<PrefixedFormula> c) { return Alts{std::move(c)}; };

  switch (inst.rule) {
    case RuleId::Conj: {
      if (ps.size() != 1 || !ps[0].is_at() || !ps[0].formula().is(Conn::And)) return std::nullopt;
      const Formula f = ps[0].formula();
      const Index i = ps[0].index();
      return one({PrefixedFormula::at(i, f.left()), PrefixedFormula::at(i, f.right())});
    }
    case RuleId::NConj: {
      if (ps.size() != 1 || !ps[0].is_at() || !detail::is_not_of(ps[0].formula(), Conn::And))
        return std::nullopt;
      const Formula f = ps[0].formula().operand();
      const Index i = ps[0].index();
      return Alts{{PrefixedFormula::at(i, !f.left())}, {PrefixedFormula::at(i, !f.right())}};
    }
    case RuleId::Disj: {
      if (ps.size() != 1 || !ps[0].is_at() || !ps[0].formula().is(Conn::Or)) return std::nullopt;
      const Formula f = ps[0].formula();
      const Index i = ps[0].index();
      return Alts{{PrefixedFormula::at(i, f.left())}, {PrefixedFormula::at(i, f.right())}};
    }
    case RuleId::NDisj: {
      if (ps.size() != 1 || !ps[0].is_at() || !detail::is_not_of(ps[0].formula(), Conn::Or))
        return std::nullopt;
      const Formula f = ps[0].formula().operand();
      const Index i = ps[0].index();
      return one({PrefixedFormula::at(i, !f.left()), PrefixedFormula::at(i, !f.right())});
    }
    case RuleId::Imp: {
      if (ps.size() != 1 || !ps[0].is_at() || !ps[0].formula().is(Conn::Imp)) return std::nullopt;
      const Formula f = ps[0].formula();
      const Index i = ps[0].index();
      return Alts{{PrefixedFormula::at(i, !f.left())}, {PrefixedFormula::at(i, f.right())}};
    }
    case RuleId::NImp: {
      if (ps.size() != 1 || !ps[0].is_at() || !detail::is_not_of(ps[0].formula(), Conn::Imp))
        return std::nullopt;
      const Formula f = ps[0].formula().operand();
      const Index i = ps[0].index();
      return one({PrefixedFormula::at(i, f.left()), PrefixedFormula::at(i, !f.right())});
    }
    case RuleId::DNeg: {
      if (ps.size() != 1 || !ps[0].is_at() || !detail::is_not_of(ps[0].formula(), Conn::Not))
        return std::nullopt;
      return one({PrefixedFormula::at(ps[0].index(), ps[0].formula().operand().operand())});
    }
    case RuleId::Box: {
      if (ps.size() != 2 || !ps[0].is_at() || !ps[0].formula().is(Conn::Nec) || !ps[1].is_rel())
        return std::nullopt;
      if (ps[1].index() != ps[0].index() || ps[1].formula() != ps[0].formula().antecedent())
        return std::nullopt;
      return one({PrefixedFormula::at(ps[1].target(), ps[0].formula().consequent())});
    }
    case RuleId::NBox: {
      if (ps.size() != 1 || !ps[0].is_at() || !detail::is_not_of(ps[0].formula(), Conn::Nec) ||
          !inst.fresh)
        return std::nullopt;
      const Formula f = ps[0].formula().operand();
      return one({PrefixedFormula::at(*inst.fresh, !f.consequent()),
                  PrefixedFormula::rel(ps[0].index(), *inst.fresh, f.antecedent())});
    }
    case RuleId::Diamond: {
      if (ps.size() != 1 || !ps[0].is_at() || !ps[0].formula().is(Conn::Poss) || !inst.fresh)
        return std::nullopt;
      const Formula f = ps[0].formula();
      return one({PrefixedFormula::at(*inst.fresh, f.consequent()),
                  PrefixedFormula::rel(ps[0].index(), *inst.fresh, f.antecedent())});
    }
    case RuleId::NDiamond: {
      if (ps.size() != 2 || !ps[0].is_at() || !detail::is_not_of(ps[0].formula(), Conn::Poss) ||
          !ps[1].is_rel())
        return std::nullopt;
      const Formula f = ps[0].formula().operand();
      if (ps[1].index() != ps[0].index() || ps[1].formula() != f.antecedent())
        return std::nullopt;
      return one({PrefixedFormula::at(ps[1].target(), !f.consequent())});
    }
    case RuleId::Cut: {
      if (!ps.empty() || !inst.side_formula || !inst.at_index) return std::nullopt;
      return Alts{{PrefixedFormula::at(*inst.at_index, *inst.side_formula)},
                  {PrefixedFormula::at(*inst.at_index, !*inst.side_formula)}};
    }
    case RuleId::Ea: {
      if (ps.size() != 1 || !ps[0].is_rel() || !inst.side_formula || !inst.fresh)
        return std::nullopt;
      const Formula phi = ps[0].formula();
      const Formula psi = *inst.side_formula;
      const Index k = *inst.fresh;
      return Alts{{PrefixedFormula::at(k, !phi), PrefixedFormula::at(k, psi)},
                  {PrefixedFormula::at(k, phi), PrefixedFormula::at(k, !psi)},
                  {PrefixedFormula::rel(ps[0].index(), ps[0].target(), psi)}};
    }
    case RuleId::EaPrime: {
      if (ps.size() != 2 || !ps[0].is_at() || !ps[0].formula().is(Conn::Nec) || !ps[1].is_rel() ||
          ps[1].index() != ps[0].index() || !inst.fresh)
        return std::nullopt;
      const Formula psi = ps[0].formula().antecedent();
      const Formula theta = ps[0].formula().consequent();
      const Formula phi = ps[1].formula();
      const Index k = *inst.fresh;
      return Alts{{PrefixedFormula::at(k, !phi), PrefixedFormula::at(k, psi)},
                  {PrefixedFormula::at(k, phi), PrefixedFormula::at(k, !psi)},
                  {PrefixedFormula::at(ps[1].target(), theta)}};
    }
    case RuleId::R1: {
      if (ps.size() != 1 || !ps[0].is_rel()) return std::nullopt;
      return one({PrefixedFormula::at(ps[0].target(), ps[0].formula())});
    }
    case RuleId::R2: {
      if (ps.size() != 2 || !ps[0].is_at() || !ps[1].is_rel() ||
          ps[0].index() != ps[1].target() || !inst.fresh)
        return std::nullopt;
      return one({PrefixedFormula::rel(ps[1].index(), *inst.fresh, ps[0].formula())});
    }
    case RuleId::R3: {
      if (ps.size() != 3 || !ps[0].is_at() || !ps[1].is_at() || !ps[2].is_rel())
        return std::nullopt;
      if (!ps[2].formula().is(Conn::Top)) return std::nullopt;
      if (ps[1].formula() != !ps[0].formula()) return std::nullopt;
      if (ps[2].index() != ps[0].index() || ps[2].target() != ps[1].index()) return std::nullopt;
      return one({PrefixedFormula::at(ps[1].index(), ps[0].formula())});
    }
    case RuleId::R4: {
      if (!ps.empty() || !inst.at_index) return std::nullopt;
      return one({PrefixedFormula::rel(*inst.at_index, *inst.at_index, Formula::top())});
    }
    case RuleId::R5: {
      if (ps.size() != 2 || !ps[0].is_at() || !ps[1].is_rel() || ps[0].index() != ps[1].target())
        return std::nullopt;
      return one({PrefixedFormula::rel(ps[1].index(), ps[1].target(),
                                       ps[1].formula() && ps[0].formula())});
    }
    case RuleId::R6: {
      if (ps.size() != 3 || !ps[0].is_at() || !ps[1].is_rel() || !ps[2].is_rel())
        return std::nullopt;
      const Formula psi = ps[0].formula();
      const Formula phi = ps[1].formula();
      if (ps[0].index() != ps[1].target() || ps[2].index() != ps[1].index()) return std::nullopt;
      if (ps[2].formula() != (phi && psi)) return std::nullopt;
      const Index k = ps[2].target();
      return one({PrefixedFormula::at(k, psi), PrefixedFormula::rel(ps[1].index(), k, phi)});
    }
    case RuleId::Cem: {
      if (ps.size() != 3 || !ps[0].is_rel() || !ps[1].is_rel() || !ps[2].is_at())
        return std::nullopt;
      if (ps[0].index() != ps[1].index() || ps[0].formula() != ps[1].formula())
        return std::nullopt;
      if (ps[0].target() == ps[1].target()) return std::nullopt;  // j = k is vacuous
      if (ps[2].index() != ps[0].target()) return std::nullopt;
      return one({PrefixedFormula::at(ps[1].target(), ps[2].formula())});
    }
  }
  return std::nullopt;
}

inline std::optional<RuleInstance> make_instance(RuleId rule,
                                                 std::vector<PrefixedFormula> premises,
                                                 std::optional<Formula> side_formula = {},
                                                 std::optional<Index> at_index = {},
                                                 std::optional<Index> fresh = {}) {
  RuleInstance inst{rule, std::move(premises), std::move(side_formula), at_index, fresh, {}};
  auto alts = schema_conclusions(inst);
  if (!alts) return std::nullopt;
  inst.alternatives = std::move(*alts);
  return inst;
}

// Instance validity against a concrete path: schema match plus the side
// conditions that mention the branch (premise membership, fresh indices
// new to the branch, cut/R4 index already on the branch).
struct ValidationResult {
  bool ok = true;
  std::string error;
};

inline ValidationResult validate_instance(const RuleInstance& inst,
                                          std::span<const PrefixedFormula> path) {
  auto fail = [](std::string msg) { return ValidationResult{false, std::move(msg)}; };
  auto alts = schema_conclusions(inst);
  if (!alts) return fail(std::string("premises do not match schema of ") + rule_name(inst.rule));
  if (*alts != inst.alternatives) return fail("stored conclusions differ from schema");
  std::set<int> indices{1};
  for (const auto& pf : path) {
    indices.insert(pf.index().value);
    if (pf.is_rel()) indices.insert(pf.target().value);
  }
  for (const auto& p : inst.premises) {
    if (std::find(path.begin(), path.end(), p) == path.end())
      return fail("premise not on branch: " + p.to_string());
  }
  if (inst.fresh && indices.count(inst.fresh->value))
    return fail("index " + std::to_string(inst.fresh->value) + " is not new to the branch");
  if ((inst.rule == RuleId::Cut || inst.rule == RuleId::R4) &&
      (!inst.at_index || !indices.count(inst.at_index->value)))
    return fail(std::string(rule_name(inst.rule)) + " index does not occur on the branch");
  return {};
}

enum class CutMode { Off, Analytic, Hinted };

struct CutPolicy {
  CutMode mode = CutMode::Analytic;
  std::vector<Formula> hints;  // Hinted mode only
};

// A named logic: its rule set plus the instantiation policies for the
// non-analytic rules.
struct LogicPreset {
  std::string name;
  std::set<RuleId> rules;
  CutPolicy cut_policy;
  bool ea_prime = false;

  bool has(RuleId r) const { return rules.count(r) > 0; }

  static LogicPreset ck() { return {"ck", table1(), {}, false}; }
  static LogicPreset ck_cut() {
    auto rs = table1();
    rs.insert(RuleId::Cut);
    return {"ck+cut", rs, {}, false};
  }
  static LogicPreset CK() {
    auto rs = table1();
    rs.insert(RuleId::Cut);
    rs.insert(RuleId::Ea);
    return {"CK", rs, {}, false};
  }
  static LogicPreset vc() {
    auto rs = table1();
    for (RuleId r : {RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5, RuleId::R6})
      rs.insert(r);
    return {"vc", rs, {}, false};
  }
  static LogicPreset VC() {
    auto p = vc();
    p.name = "VC";
    p.rules.insert(RuleId::Cut);
    p.rules.insert(RuleId::Ea);
    return p;
  }
  static LogicPreset VCS() {
    auto p = VC();
    p.name = "VCS";
    p.rules.insert(RuleId::Cem);
    return p;
  }

  // ck and CK (and vc/VC) are distinct systems, so the two-letter names are
  // case-sensitive; unambiguous spellings are accepted in any case.
  static std::optional<LogicPreset> by_name(std::string_view s) {
    if (s == "ck" || s == "Ck") return ck();
    if (s == "ck+cut" || s == "Ck+cut" || s == "ck-cut") return ck_cut();
    if (s == "CK") return CK();
    if (s == "vc" || s == "Vc") return vc();
    if (s == "VC") return VC();
    if (s == "vcs" || s == "VCS" || s == "Vcs") return VCS();
    return std::nullopt;
  }

  // Swaps box+ea for the analytic ea' variant.
  LogicPreset with_ea_prime() const {
    if (!has(RuleId::Ea))
      throw std::invalid_argument("ea' replaces box+ea; preset " + name + " has no ea rule");
    LogicPreset p = *this;
    p.rules.erase(RuleId::Box);
    p.rules.erase(RuleId::Ea);
    p.rules.insert(RuleId::EaPrime);
    p.ea_prime = true;
    return p;
  }

  LogicPreset with_cut(CutPolicy policy) const {
    LogicPreset p = *this;
    p.cut_policy = std::move(policy);
    return p;
  }

 private:
  static std::set<RuleId> table1() {
    return {RuleId::Conj, RuleId::NConj,   RuleId::Disj,    RuleId::NDisj,
            RuleId::Imp,  RuleId::NImp,    RuleId::DNeg,    RuleId::Box,
            RuleId::NBox, RuleId::Diamond, RuleId::NDiamond};
  }
};

namespace detail {

// Index structures applicable() and next_instance() consult repeatedly.
// Built once per query branch.
struct BranchView {
  const Branch& b;
  std::vector<int> at_positions, rel_positions;
  std::unordered_map<int, std::vector<int>> at_by_index;
  std::unordered_map<int, std::vector<int>> rel_by_source;
  std::unordered_map<int, std::vector<int>> rel_by_target;
  std::unordered_map<Formula, std::vector<int>> at_positions_by_formula;
  std::unordered_map<int, std::unordered_map<Formula, std::vector<int>>> rel_by_source_formula;
  std::set<int> r4_triggers;

  explicit BranchView(const Branch& branch) : b(branch) {
    const auto& items = b.items();
    for (int p = 0; p < static_cast<int>(items.size()); ++p) {
      const auto& pf = items[p];
      if (pf.is_at()) {
        at_positions.push_back(p);
        at_by_index[pf.index().value].push_back(p);
        at_positions_by_formula[pf.formula()].push_back(p);
        const Formula& f = pf.formula();
        if (f.is_modal() || (f.is(Conn::Not) && f.operand().is_modal()))
          r4_triggers.insert(pf.index().value);
      } else {
        rel_positions.push_back(p);
        rel_by_source[pf.index().value].push_back(p);
        rel_by_target[pf.target().value].push_back(p);
        rel_by_source_formula[pf.index().value][pf.formula()].push_back(p);
        r4_triggers.insert(pf.index().value);
        r4_triggers.insert(pf.target().value);
      }
    }
  }

  const PrefixedFormula& item(int p) const { return b.items()[p]; }

  bool rel_exists(int source, const Formula& f) const {
    auto it = rel_by_source_formula.find(source);
    return it != rel_by_source_formula.end() && it->second.count(f) > 0;
  }

  const std::vector<int>& rels_from(int source) const {
    static const std::vector<int> none;
    auto it = rel_by_source.find(source);
    return it == rel_by_source.end() ? none : it->second;
  }

  const std::vector<int>& rels_into(int target) const {
    static const std::vector<int> none;
    auto it = rel_by_target.find(target);
    return it == rel_by_target.end() ? none : it->second;
  }

  const std::vector<int>& ats_at(int index) const {
    static const std::vector<int> none;
    auto it = at_by_index.find(index);
    return it == at_by_index.end() ? none : it->second;
  }

  const std::vector<int>& ats_with(const Formula& f) const {
    static const std::vector<int> none;
    auto it = at_positions_by_formula.find(f);
    return it == at_positions_by_formula.end() ? none : it->second;
  }

  const std::vector<int>& rels_with(int source, const Formula& f) const {
    static const std::vector<int> none;
    auto it = rel_by_source_formula.find(source);
    if (it == rel_by_source_formula.end()) return none;
    auto jt = it->second.find(f);
    return jt == it->second.end() ? none : jt->second;
  }

  // Antecedents of modal subformulas of anything on the branch; r-fact
  // index formulas count as antecedents too.
  std::set<Formula> branch_antecedents() const {
    std::set<Formula> out;
    for (const auto& pf : b.items()) {
      auto a = antecedents(pf.formula());
      out.insert(a.begin(), a.end());
      if (pf.is_rel()) out.insert(pf.formula());
    }
    return out;
  }

  // Subformulas of everything on the branch; with negations these are the
  // analytic cut candidates.
  std::set<Formula> branch_subformulas(bool with_negations) const {
    std::set<Formula> out;
    for (const auto& pf : b.items()) {
      auto s = subformulas(pf.formula(), with_negations);
      out.insert(s.begin(), s.end());
    }
    return out;
  }
};

// How ea' instances are sliced across the enumeration order: with the
// antecedents equal the rule is box with two immediately-closing side
// branches, so those instances take box's slot; the genuine
// antecedent-exchange instances stay in the last class.
enum class EaPrimeSlice { All, BoxLike, Exchange };

struct EnumSlot {
  RuleId rule;
  EaPrimeSlice slice = EaPrimeSlice::All;
};

// The order the engine tries rules in.
inline const std::vector<EnumSlot>& enumeration_order() {
  static const std::vector<EnumSlot> order = [] {
    std::vector<EnumSlot> slots;
    std::vector<RuleId> ids = all_rule_ids();
    std::sort(ids.begin(), ids.end(),
              [](RuleId a, RuleId b) { return priority_rank(a) < priority_rank(b); });
    for (RuleId r : ids) {
      if (r == RuleId::EaPrime) {
        slots.push_back({r, EaPrimeSlice::Exchange});
      } else {
        slots.push_back({r});
        if (r == RuleId::Box) slots.push_back({RuleId::EaPrime, EaPrimeSlice::BoxLike});
      }
    }
    return slots;
  }();
  return order;
}

// Enumerates the instances of one rule in their deterministic order,
// skipping instances that are already applied or whose conclusions the
// branch subsumes (for a branching rule: some alternative fully present).
// The callback returns false to stop early. With `search_policy`, R5 is
// additionally limited to products the branch's subformula universe
// mentions: box and R6, the only consumers keyed by the conjunction, can
// never match anything outside it, while unrestricted products regrow the
// universe forever.
template <class CB>
void enumerate_rule(RuleId rule, const BranchView& v, const LogicPreset& preset,
                    bool search_policy, CB&& cb,
                    EaPrimeSlice slice = EaPrimeSlice::All) {
  const Branch& b = v.b;
  auto emit = [&](std::optional<RuleInstance> inst) {
    return !inst || cb(std::move(*inst));
  };

  switch (rule) {
    case RuleId::Conj:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        const Formula& f = pf.formula();
        if (!f.is(Conn::And)) continue;
        if (b.contains(PrefixedFormula::at(pf.index(), f.left())) &&
            b.contains(PrefixedFormula::at(pf.index(), f.right())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::NDisj:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!is_not_of(pf.formula(), Conn::Or)) continue;
        const Formula f = pf.formula().operand();
        if (b.contains(PrefixedFormula::at(pf.index(), !f.left())) &&
            b.contains(PrefixedFormula::at(pf.index(), !f.right())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::NImp:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!is_not_of(pf.formula(), Conn::Imp)) continue;
        const Formula f = pf.formula().operand();
        if (b.contains(PrefixedFormula::at(pf.index(), f.left())) &&
            b.contains(PrefixedFormula::at(pf.index(), !f.right())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::DNeg:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!is_not_of(pf.formula(), Conn::Not)) continue;
        if (b.contains(PrefixedFormula::at(pf.index(), pf.formula().operand().operand())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::Box:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!pf.formula().is(Conn::Nec)) continue;
        for (int q : v.rels_with(pf.index().value, pf.formula().antecedent())) {
          const auto& r = v.item(q);
          if (b.contains(PrefixedFormula::at(r.target(), pf.formula().consequent())))
            continue;
          if (!emit(make_instance(rule, {pf, r}))) return;
        }
      }
      return;
    case RuleId::NDiamond:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!is_not_of(pf.formula(), Conn::Poss)) continue;
        const Formula f = pf.formula().operand();
        for (int q : v.rels_with(pf.index().value, f.antecedent())) {
          const auto& r = v.item(q);
          if (b.contains(PrefixedFormula::at(r.target(), !f.consequent()))) continue;
          if (!emit(make_instance(rule, {pf, r}))) return;
        }
      }
      return;
    case RuleId::R1:
      for (int q : v.rel_positions) {
        const auto& r = v.item(q);
        if (b.contains(PrefixedFormula::at(r.target(), r.formula()))) continue;
        if (!emit(make_instance(rule, {r}))) return;
      }
      return;
    case RuleId::R3:
      for (int p1 : v.at_positions) {
        const auto& fa = v.item(p1);
        for (int p2 : v.ats_with(!fa.formula())) {
          const auto& fn = v.item(p2);
          for (int q : v.rels_with(fa.index().value, Formula::top())) {
            const auto& r = v.item(q);
            if (r.target() != fn.index()) continue;
            if (b.contains(PrefixedFormula::at(fn.index(), fa.formula()))) continue;
            if (!emit(make_instance(rule, {fa, fn, r}))) return;
          }
        }
      }
      return;
    case RuleId::R6:
      for (int pj : v.at_positions) {
        const auto& fa = v.item(pj);  // j: psi
        for (int qj : v.rels_into(fa.index().value)) {
          const auto& rj = v.item(qj);  // r(i,j,phi)
          const Formula conj = rj.formula() && fa.formula();
          for (int qk : v.rels_with(rj.index().value, conj)) {
            const auto& rk = v.item(qk);  // r(i,k,phi&psi)
            if (b.contains(PrefixedFormula::at(rk.target(), fa.formula())) &&
                b.contains(PrefixedFormula::rel(rj.index(), rk.target(), rj.formula())))
              continue;
            if (!emit(make_instance(rule, {fa, rj, rk}))) return;
          }
        }
      }
      return;
    case RuleId::Cem:
      for (int qj : v.rel_positions) {
        const auto& rj = v.item(qj);
        for (int qk : v.rels_with(rj.index().value, rj.formula())) {
          const auto& rk = v.item(qk);
          if (rk.target() == rj.target()) continue;
          for (int pj : v.ats_at(rj.target().value)) {
            const auto& fa = v.item(pj);
            if (b.contains(PrefixedFormula::at(rk.target(), fa.formula()))) continue;
            if (!emit(make_instance(rule, {rj, rk, fa}))) return;
          }
        }
      }
      return;
    case RuleId::NConj:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!is_not_of(pf.formula(), Conn::And)) continue;
        const Formula f = pf.formula().operand();
        if (b.contains(PrefixedFormula::at(pf.index(), !f.left())) ||
            b.contains(PrefixedFormula::at(pf.index(), !f.right())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::Disj:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        const Formula& f = pf.formula();
        if (!f.is(Conn::Or)) continue;
        if (b.contains(PrefixedFormula::at(pf.index(), f.left())) ||
            b.contains(PrefixedFormula::at(pf.index(), f.right())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::Imp:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        const Formula& f = pf.formula();
        if (!f.is(Conn::Imp)) continue;
        if (b.contains(PrefixedFormula::at(pf.index(), !f.left())) ||
            b.contains(PrefixedFormula::at(pf.index(), f.right())))
          continue;
        if (!emit(make_instance(rule, {pf}))) return;
      }
      return;
    case RuleId::NBox:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!is_not_of(pf.formula(), Conn::Nec)) continue;
        auto inst = make_instance(rule, {pf}, {}, {}, b.peek_fresh());
        if (inst && b.fingerprint_applied(inst->fingerprint())) continue;
        if (!emit(std::move(inst))) return;
      }
      return;
    case RuleId::Diamond:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!pf.formula().is(Conn::Poss)) continue;
        auto inst = make_instance(rule, {pf}, {}, {}, b.peek_fresh());
        if (inst && b.fingerprint_applied(inst->fingerprint())) continue;
        if (!emit(std::move(inst))) return;
      }
      return;
    case RuleId::R2:
      for (int p : v.at_positions) {
        const auto& fa = v.item(p);
        for (int q : v.rels_into(fa.index().value)) {
          const auto& r = v.item(q);
          // blocked once any psi-successor of the source exists: the
          // rule's content is existential, refiring loops through R1
          if (v.rel_exists(r.index().value, fa.formula())) continue;
          if (!emit(make_instance(rule, {fa, r}, {}, {}, b.peek_fresh()))) return;
        }
      }
      return;
    case RuleId::R5: {
      std::optional<std::set<Formula>> universe;
      if (search_policy) universe = v.branch_subformulas(false);
      // rel-major order: pairs on old r-facts come before pairs on the
      // conjunctions R5 itself creates, so the closing instance is reached
      for (int q : v.rel_positions) {
        const auto& r = v.item(q);
        for (int p : v.ats_at(r.target().value)) {
          const auto& fa = v.item(p);
          const Formula product = r.formula() && fa.formula();
          if (universe && !universe->count(product)) continue;
          if (b.contains(PrefixedFormula::rel(r.index(), r.target(), product))) continue;
          if (!emit(make_instance(rule, {fa, r}))) return;
        }
      }
      return;
    }
    case RuleId::R4:
      for (int i : v.r4_triggers) {
        if (b.contains(PrefixedFormula::rel(Index{i}, Index{i}, Formula::top()))) continue;
        if (!emit(make_instance(rule, {}, {}, Index{i}))) return;
      }
      return;
    case RuleId::Ea: {
      const std::set<Formula> ants = v.branch_antecedents();
      for (int q : v.rel_positions) {
        const auto& r = v.item(q);
        for (const auto& psi : ants) {
          if (psi == r.formula()) continue;
          if (b.contains(PrefixedFormula::rel(r.index(), r.target(), psi))) continue;
          auto inst = make_instance(rule, {r}, psi, {}, b.peek_fresh());
          if (inst && b.fingerprint_applied(inst->fingerprint())) continue;
          if (!emit(std::move(inst))) return;
        }
      }
      return;
    }
    case RuleId::EaPrime:
      for (int p : v.at_positions) {
        const auto& pf = v.item(p);
        if (!pf.formula().is(Conn::Nec)) continue;
        for (int q : v.rels_from(pf.index().value)) {
          const auto& r = v.item(q);
          const bool box_like = r.formula() == pf.formula().antecedent();
          if (slice == EaPrimeSlice::BoxLike && !box_like) continue;
          if (slice == EaPrimeSlice::Exchange && box_like) continue;
          if (b.contains(PrefixedFormula::at(r.target(), pf.formula().consequent())))
            continue;
          auto inst = make_instance(rule, {pf, r}, {}, {}, b.peek_fresh());
          if (inst && b.fingerprint_applied(inst->fingerprint())) continue;
          if (!emit(std::move(inst))) return;
        }
      }
      return;
    case RuleId::Cut: {
      if (preset.cut_policy.mode == CutMode::Off) return;
      if (preset.cut_policy.mode == CutMode::Hinted) {
        for (const auto& f : preset.cut_policy.hints) {
          for (int i : b.indices()) {
            if (b.contains(PrefixedFormula::at(Index{i}, f)) ||
                b.contains(PrefixedFormula::at(Index{i}, !f)))
              continue;
            if (!emit(make_instance(rule, {}, f, Index{i}))) return;
          }
        }
        return;
      }
      // analytic: candidates are the branch's subformulas-with-negations,
      // tried index-major in printed order
      std::vector<std::pair<std::string, Formula>> candidates;
      for (const auto& f : v.branch_subformulas(true)) {
        if (f.is(Conn::Top) || f.is(Conn::Bottom)) continue;
        candidates.emplace_back(f.to_string(), f);
      }
      std::sort(candidates.begin(), candidates.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (int i : b.indices()) {
        for (const auto& [text, f] : candidates) {
          if (b.contains(PrefixedFormula::at(Index{i}, f)) ||
              b.contains(PrefixedFormula::at(Index{i}, !f)))
            continue;
          if (!emit(make_instance(rule, {}, f, Index{i}))) return;
        }
      }
      return;
    }
  }
}

}  // namespace detail

// Every rule instance applicable on the branch under the preset, in the
// deterministic order the engine consumes them: rules by priority rank,
// instances of one rule by premise position.
inline std::vector<RuleInstance> applicable(const Branch& b, const LogicPreset& preset) {
  detail::BranchView v(b);
  std::vector<RuleInstance> out;
  for (const auto& slot : detail::enumeration_order()) {
    if (!preset.has(slot.rule)) continue;
    detail::enumerate_rule(
        slot.rule, v, preset, false,
        [&](RuleInstance&& inst) {
          out.push_back(std::move(inst));
          return true;
        },
        slot.slice);
  }
  return out;
}

// The cem instances applicable on the branch: for r(i,j,phi), r(i,k,phi)
// with j distinct from k and j:psi, conclude k:psi.
inline std::vector<RuleInstance> cem_instances(const Branch& b) {
  detail::BranchView v(b);
  std::vector<RuleInstance> out;
  detail::enumerate_rule(RuleId::Cem, v, LogicPreset::VCS(), false, [&](RuleInstance&& inst) {
    out.push_back(std::move(inst));
    return true;
  });
  return out;
}

// First applicable instance only; rules later in the rank order are not
// even enumerated once an earlier rule has an instance.
inline std::optional<RuleInstance> next_instance(const Branch& b, const LogicPreset& preset) {
  detail::BranchView v(b);
  std::optional<RuleInstance> found;
  for (const auto& slot : detail::enumeration_order()) {
    if (!preset.has(slot.rule)) continue;
    detail::enumerate_rule(
        slot.rule, v, preset, true,
        [&](RuleInstance&& inst) {
          found = std::move(inst);
          return false;
        },
        slot.slice);
    if (found) return found;
  }
  return std::nullopt;
}

// One child branch per conclusion alternative, each carrying the
// instance's fingerprint.
inline std::vector<Branch> apply_instance(const RuleInstance& inst, const Branch& b) {
  for (const auto& p : inst.premises)
    if (!b.contains(p))
      throw std::logic_error("stale rule instance: premise no longer on branch: " +
                             p.to_string());
  if (inst.fresh && b.index_occurs(*inst.fresh))
    throw std::logic_error("stale rule instance: fresh index already on branch");
  std::vector<Branch> children;
  children.reserve(inst.alternatives.size());
  const std::string fp = inst.fingerprint();
  for (const auto& alt : inst.alternatives) children.push_back(b.extend(alt, fp));
  return children;
}

}  // namespace cstab
