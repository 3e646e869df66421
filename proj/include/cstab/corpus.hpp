#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstab/engine.hpp"
#include "cstab/formula.hpp"
#include "cstab/parse.hpp"
#include "cstab/rules.hpp"

namespace cstab {

// Named closed tableaux for the characteristic axioms, hand-encoded
// rule-application by rule-application, with the sequent each one shows.
// They serve as a regression corpus: the trees must replay, and the prover
// must close the same sequents.
struct CorpusItem {
  std::string name;
  std::string logic;  // weakest preset whose rules the tableau uses
  std::vector<Formula> premises;
  Formula goal;
  Proof hand_proof;
};

namespace detail {

inline RuleInstance mk(RuleId rule, std::vector<PrefixedFormula> prem,
                       std::optional<Formula> side = {}, std::optional<Index> at_i = {},
                       std::optional<Index> fresh = {}) {
  auto inst = make_instance(rule, std::move(prem), std::move(side), at_i, fresh);
  if (!inst) throw std::logic_error("corpus: instance does not match rule schema");
  return *inst;
}

inline ProofNode step(const RuleInstance& inst, int alt, std::vector<ProofNode> children) {
  ProofNode n;
  n.added = inst.alternatives[alt];
  n.justification = inst;
  n.alt = alt;
  n.children = std::move(children);
  return n;
}

inline ProofNode closed(const RuleInstance& inst, int alt, ClosureWitness w) {
  ProofNode n;
  n.added = inst.alternatives[alt];
  n.justification = inst;
  n.alt = alt;
  n.closure = w;
  return n;
}

inline ClosureWitness on_pair(int i, const Formula& f) {
  return {ClosureWitness::Kind::Pair, Index{i}, f};
}

inline ClosureWitness on_negtop(int i) {
  return {ClosureWitness::Kind::NegTop, Index{i}, Formula::top()};
}

inline Proof assemble(const std::string& logic, std::vector<PrefixedFormula> assumptions,
                      std::vector<ProofNode> children) {
  Proof proof;
  proof.logic = logic;
  proof.assumptions = assumptions;
  proof.root.added = std::move(assumptions);
  proof.root.children = std::move(children);
  return proof;
}

inline CorpusItem make_cm() {
  const Formula p = Formula::atom("p"), q = Formula::atom("q"), r = Formula::atom("r");
  const Formula premise = Formula::nec(p, q && r);
  const Formula goal = Formula::nec(p, q) && Formula::nec(p, r);
  const auto a0 = at(1, premise);
  const auto a1 = at(1, !goal);

  const auto nconj = mk(RuleId::NConj, {a1});
  auto side = [&](const Formula& missing, int alt) {
    const auto nbox = mk(RuleId::NBox, {at(1, !Formula::nec(p, missing))}, {}, {}, Index{2});
    const auto box = mk(RuleId::Box, {a0, rel(1, 2, p)});
    const auto conj = mk(RuleId::Conj, {at(2, q && r)});
    return step(nconj, alt,
                {step(nbox, 0, {step(box, 0, {closed(conj, 0, on_pair(2, missing))})})});
  };
  return {"CM", "ck", {premise}, goal,
          assemble("ck", {a0, a1}, {side(q, 0), side(r, 1)})};
}

inline CorpusItem make_cc() {
  const Formula p = Formula::atom("p"), q = Formula::atom("q"), r = Formula::atom("r");
  const Formula premise = Formula::nec(p, q) && Formula::nec(p, r);
  const Formula goal = Formula::nec(p, q && r);
  const auto a0 = at(1, premise);
  const auto a1 = at(1, !goal);

  const auto conj = mk(RuleId::Conj, {a0});
  const auto nbox = mk(RuleId::NBox, {a1}, {}, {}, Index{2});
  const auto nconj = mk(RuleId::NConj, {at(2, !(q && r))});
  const auto box_q = mk(RuleId::Box, {at(1, Formula::nec(p, q)), rel(1, 2, p)});
  const auto box_r = mk(RuleId::Box, {at(1, Formula::nec(p, r)), rel(1, 2, p)});
  return {"CC", "ck", {premise}, goal,
          assemble("ck", {a0, a1},
                   {step(conj, 0,
                         {step(nbox, 0,
                               {step(nconj, 0, {closed(box_q, 0, on_pair(2, q))}),
                                step(nconj, 1, {closed(box_r, 0, on_pair(2, r))})})})})};
}

inline CorpusItem make_cn() {
  const Formula p = Formula::atom("p");
  const Formula goal = Formula::nec(p, Formula::top());
  const auto a0 = at(1, !goal);
  const auto nbox = mk(RuleId::NBox, {a0}, {}, {}, Index{2});
  return {"CN", "ck", {}, goal, assemble("ck", {a0}, {closed(nbox, 0, on_negtop(2))})};
}

inline CorpusItem make_s1() {
  const Formula p = Formula::atom("p");
  const Formula goal = Formula::nec(p, p);
  const auto a0 = at(1, !goal);
  const auto nbox = mk(RuleId::NBox, {a0}, {}, {}, Index{2});
  const auto r1 = mk(RuleId::R1, {rel(1, 2, p)});
  return {"S1", "vc", {}, goal,
          assemble("vc", {a0}, {step(nbox, 0, {closed(r1, 0, on_pair(2, p))})})};
}

inline CorpusItem make_s2() {
  const Formula p = Formula::atom("p"), q = Formula::atom("q");
  const Formula premise = Formula::poss(p, q);
  const Formula goal = Formula::poss(q, Formula::top());
  const auto a0 = at(1, premise);
  const auto a1 = at(1, !goal);
  const auto dia = mk(RuleId::Diamond, {a0}, {}, {}, Index{2});
  // R2's new index must really be new; the closing ~<> step lands at it.
  const auto r2 = mk(RuleId::R2, {at(2, q), rel(1, 2, p)}, {}, {}, Index{3});
  const auto ndia = mk(RuleId::NDiamond, {a1, rel(1, 3, q)});
  return {"S2", "vc", {premise}, goal,
          assemble("vc", {a0, a1},
                   {step(dia, 0, {step(r2, 0, {closed(ndia, 0, on_negtop(3))})})})};
}

inline CorpusItem make_s3() {
  const Formula p = Formula::atom("p");
  const Formula premise = p;
  const Formula goal = Formula::nec(Formula::top(), p);
  const auto a0 = at(1, premise);
  const auto a1 = at(1, !goal);
  const auto nbox = mk(RuleId::NBox, {a1}, {}, {}, Index{2});
  const auto r3 = mk(RuleId::R3, {a0, at(2, !p), rel(1, 2, Formula::top())});
  return {"S3", "vc", {premise}, goal,
          assemble("vc", {a0, a1}, {step(nbox, 0, {closed(r3, 0, on_pair(2, p))})})};
}

inline CorpusItem make_s4() {
  const Formula p = Formula::atom("p");
  const Formula premise = p;
  const Formula goal = Formula::poss(Formula::top(), p);
  const auto a0 = at(1, premise);
  const auto a1 = at(1, !goal);
  const auto r4 = mk(RuleId::R4, {}, {}, Index{1});
  const auto ndia = mk(RuleId::NDiamond, {a1, rel(1, 1, Formula::top())});
  return {"S4", "vc", {premise}, goal,
          assemble("vc", {a0, a1}, {step(r4, 0, {closed(ndia, 0, on_pair(1, p))})})};
}

inline CorpusItem make_s5() {
  const Formula p = Formula::atom("p"), q = Formula::atom("q"), r = Formula::atom("r");
  const Formula premise = Formula::nec(p && q, r);
  const Formula goal = Formula::nec(p, Formula::impl(q, r));
  const auto a0 = at(1, premise);
  const auto a1 = at(1, !goal);
  const auto nbox = mk(RuleId::NBox, {a1}, {}, {}, Index{2});
  const auto nimp = mk(RuleId::NImp, {at(2, !Formula::impl(q, r))});
  const auto r5 = mk(RuleId::R5, {at(2, q), rel(1, 2, p)});
  const auto box = mk(RuleId::Box, {a0, rel(1, 2, p && q)});
  return {"S5", "vc", {premise}, goal,
          assemble("vc", {a0, a1},
                   {step(nbox, 0,
                         {step(nimp, 0, {step(r5, 0, {closed(box, 0, on_pair(2, r))})})})})};
}

inline CorpusItem make_s6() {
  const Formula p = Formula::atom("p"), q = Formula::atom("q"), r = Formula::atom("r");
  const Formula prem1 = Formula::poss(p, q);
  const Formula prem2 = Formula::nec(p, Formula::impl(q, r));
  const Formula goal = Formula::nec(p && q, r);
  const auto a0 = at(1, prem1);
  const auto a1 = at(1, prem2);
  const auto a2 = at(1, !goal);
  const auto dia = mk(RuleId::Diamond, {a0}, {}, {}, Index{2});
  const auto nbox = mk(RuleId::NBox, {a2}, {}, {}, Index{3});
  const auto r6 = mk(RuleId::R6, {at(2, q), rel(1, 2, p), rel(1, 3, p && q)});
  const auto box = mk(RuleId::Box, {a1, rel(1, 3, p)});
  const auto imp = mk(RuleId::Imp, {at(3, Formula::impl(q, r))});
  return {"S6", "vc", {prem1, prem2}, goal,
          assemble("vc", {a0, a1, a2},
                   {step(dia, 0,
                         {step(nbox, 0,
                               {step(r6, 0,
                                     {step(box, 0,
                                           {closed(imp, 0, on_pair(3, q)),
                                            closed(imp, 1, on_pair(3, r))})})})})})};
}

inline CorpusItem make_cem() {
  const Formula p = Formula::atom("p"), q = Formula::atom("q");
  const Formula goal = Formula::nec(p, q) || Formula::nec(p, !q);
  const auto a0 = at(1, !goal);
  const auto ndisj = mk(RuleId::NDisj, {a0});
  const auto nbox_q = mk(RuleId::NBox, {at(1, !Formula::nec(p, q))}, {}, {}, Index{2});
  const auto nbox_nq = mk(RuleId::NBox, {at(1, !Formula::nec(p, !q))}, {}, {}, Index{3});
  const auto dneg = mk(RuleId::DNeg, {at(3, !!q)});
  const auto cem = mk(RuleId::Cem, {rel(1, 3, p), rel(1, 2, p), at(3, q)});
  return {"CEM", "VCS", {}, goal,
          assemble("VCS", {a0},
                   {step(ndisj, 0,
                         {step(nbox_q, 0,
                               {step(nbox_nq, 0,
                                     {step(dneg, 0, {closed(cem, 0, on_pair(2, q))})})})})})};
}

}  // namespace detail

inline const std::vector<CorpusItem>& axiom_corpus() {
  static const std::vector<CorpusItem> items = [] {
    std::vector<CorpusItem> v;
    v.push_back(detail::make_cm());
    v.push_back(detail::make_cc());
    v.push_back(detail::make_cn());
    v.push_back(detail::make_s1());
    v.push_back(detail::make_s2());
    v.push_back(detail::make_s3());
    v.push_back(detail::make_s4());
    v.push_back(detail::make_s5());
    v.push_back(detail::make_s6());
    v.push_back(detail::make_cem());
    return v;
  }();
  return items;
}

inline bool preset_covers(const LogicPreset& outer, const LogicPreset& inner) {
  return std::includes(outer.rules.begin(), outer.rules.end(), inner.rules.begin(),
                       inner.rules.end());
}

struct CorpusRunEntry {
  std::string name;
  std::string logic;  // logic the sequent was proved under
  bool hand_replay_ok = false;
  bool proved = false;
  bool proof_replay_ok = false;
  long nodes = 0;

  bool ok() const { return hand_replay_ok && proved && proof_replay_ok; }
};

// Replays each hand-encoded tableau the requested logic subsumes, then has
// the prover close the same sequent and replays the prover's proof too.
// Coverage goes by the base logic, so an ea'-modified preset still runs
// the items whose hand proofs use box.
inline std::vector<CorpusRunEntry> run_corpus(const LogicPreset& preset,
                                              const Limits& limits = {}) {
  std::vector<CorpusRunEntry> out;
  const auto base = LogicPreset::by_name(preset.name);
  for (const auto& item : axiom_corpus()) {
    const auto native = LogicPreset::by_name(item.logic);
    if (!native || !base || !preset_covers(*base, *native)) continue;
    CorpusRunEntry entry;
    entry.name = item.name;
    entry.logic = preset.name;
    entry.hand_replay_ok = replay(item.hand_proof).ok;
    const Verdict v = prove(item.premises, item.goal, preset, limits);
    entry.proved = v.closed();
    entry.nodes = v.stats.nodes;
    if (v.proof) entry.proof_replay_ok = replay(*v.proof).ok;
    out.push_back(entry);
  }
  return out;
}

}  // namespace cstab
