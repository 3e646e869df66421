#pragma once

#include <algorithm>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cstab/formula.hpp"
#include "cstab/prefixed.hpp"
#include "cstab/rules.hpp"
#include "cstab/semantics.hpp"

namespace cstab {

struct Limits {
  long max_nodes = 10000;  // prefixed-formula lines placed across the search
  int max_indices = 64;    // highest world index the search may introduce
  int max_depth = 2000;    // rule applications along a single path
};

struct SearchStats {
  long nodes = 0;
  long applications = 0;
  int max_index = 1;
  int max_depth = 0;
  long branches_closed = 0;
  std::string limit_hit;  // which limit tripped, when one did
};

// One tableau node: the prefixed formulas an application added on this
// path, the instance that justifies them (none for the assumptions), and
// which conclusion alternative this child realizes. Leaves of a closed
// tableau carry their contradiction.
struct ProofNode {
  std::vector<PrefixedFormula> added;
  std::optional<RuleInstance> justification;
  int alt = 0;
  std::vector<ProofNode> children;
  std::optional<ClosureWitness> closure;
};

struct Proof {
  std::string logic;  // preset name the proof was built for
  bool ea_prime = false;
  std::vector<PrefixedFormula> assumptions;
  ProofNode root;
};

struct Verdict {
  enum class Kind { Closed, Open, ResourceOut };

  Kind kind = Kind::ResourceOut;
  std::optional<Proof> proof;  // Closed
  // Open: the first fully saturated open branch found
  std::optional<Branch> open_branch;
  bool saturated = false;
  std::optional<PriestModel> countermodel;
  bool certified = false;
  std::optional<ConditionId> violated_condition;  // why certification failed, if conditions did
  SearchStats stats;

  bool closed() const { return kind == Kind::Closed; }
};

namespace detail {

struct Search {
  const LogicPreset& preset;
  const Limits& limits;
  SearchStats stats;

  enum class Status { AllClosed, Open, Out };

  struct Result {
    Status status = Status::Out;
    // AllClosed: either the closure for the caller's node, or its subtrees
    std::optional<ClosureWitness> closure;
    std::vector<ProofNode> children;
    std::optional<Branch> open;  // Open: the saturated branch
  };

  bool charge_nodes(std::size_t n) {
    stats.nodes += static_cast<long>(n);
    if (stats.nodes > limits.max_nodes) {
      stats.limit_hit = "max-nodes";
      return false;
    }
    return true;
  }

  // Expands the branch below a node whose formulas are already on `b`.
  Result below(const Branch& b, int depth) {
    if (depth > stats.max_depth) stats.max_depth = depth;
    if (auto w = b.closure_witness()) {
      ++stats.branches_closed;
      Result r;
      r.status = Status::AllClosed;
      r.closure = *w;
      return r;
    }
    auto inst = next_instance(b, preset);
    if (!inst) {
      Result r;
      r.status = Status::Open;
      r.open = b;
      return r;
    }
    if (depth + 1 > limits.max_depth) {
      stats.limit_hit = "max-depth";
      return {};
    }
    if (inst->fresh && inst->fresh->value > limits.max_indices) {
      stats.limit_hit = "max-indices";
      return {};
    }
    ++stats.applications;
    if (inst->fresh && inst->fresh->value > stats.max_index)
      stats.max_index = inst->fresh->value;
    std::vector<Branch> kids = apply_instance(*inst, b);
    Result r;
    r.status = Status::AllClosed;
    for (std::size_t t = 0; t < kids.size(); ++t) {
      ProofNode node;
      node.added = inst->alternatives[t];
      node.justification = *inst;
      node.alt = static_cast<int>(t);
      if (!charge_nodes(node.added.size())) return {};
      Result sub = below(kids[t], depth + 1);
      if (sub.status == Status::Out) return {};
      if (sub.status == Status::Open) return sub;  // one open branch sinks the tableau
      node.closure = sub.closure;
      node.children = std::move(sub.children);
      r.children.push_back(std::move(node));
    }
    return r;
  }
};

}  // namespace detail

struct SaturationResult {
  enum class Status { Saturated, Closed, LimitHit };
  Status status = Status::LimitHit;
  std::optional<Branch> branch;  // Saturated: the complete open branch
  SearchStats stats;
};

// Depth-first saturation: repeatedly applies the highest-priority unapplied
// instance. Stops at the first fully saturated open branch; reports Closed
// when every branch closes.
inline SaturationResult saturate(const Branch& b, const LogicPreset& preset,
                                 const Limits& limits = {}) {
  detail::Search search{preset, limits, {}};
  if (!search.charge_nodes(b.items().size())) return {SaturationResult::Status::LimitHit, {}, search.stats};
  for (const auto& pf : b.items()) {
    search.stats.max_index = std::max(search.stats.max_index, pf.index().value);
    if (pf.is_rel()) search.stats.max_index = std::max(search.stats.max_index, pf.target().value);
  }
  auto r = search.below(b, 0);
  switch (r.status) {
    case detail::Search::Status::AllClosed:
      return {SaturationResult::Status::Closed, {}, search.stats};
    case detail::Search::Status::Open:
      return {SaturationResult::Status::Saturated, std::move(r.open), search.stats};
    case detail::Search::Status::Out:
      return {SaturationResult::Status::LimitHit, {}, search.stats};
  }
  return {SaturationResult::Status::LimitHit, {}, search.stats};
}

// Decides premises |- goal: assumptions are 1:premise for each premise plus
// 1:~goal; Closed means a closed tableau was found within the limits. A
// saturated open branch yields a countermodel, certified when it satisfies
// the branch under the identity assignment and meets the logic's
// model-class conditions over the branch vocabulary.
inline Verdict prove(std::span<const Formula> premises, const Formula& goal,
                     const LogicPreset& preset, const Limits& limits = {}) {
  std::vector<PrefixedFormula> assumptions;
  for (const auto& f : premises) assumptions.push_back(at(1, f));
  assumptions.push_back(at(1, !goal));
  const Branch root_branch = Branch::from_assumptions(assumptions);

  detail::Search search{preset, limits, {}};
  Verdict verdict;
  if (!search.charge_nodes(assumptions.size())) {
    verdict.stats = search.stats;
    return verdict;
  }
  auto r = search.below(root_branch, 0);
  verdict.stats = search.stats;

  switch (r.status) {
    case detail::Search::Status::AllClosed: {
      verdict.kind = Verdict::Kind::Closed;
      Proof proof;
      proof.logic = preset.name;
      proof.ea_prime = preset.ea_prime;
      proof.assumptions = assumptions;
      proof.root.added = assumptions;
      proof.root.closure = r.closure;
      proof.root.children = std::move(r.children);
      verdict.proof = std::move(proof);
      return verdict;
    }
    case detail::Search::Status::Open: {
      verdict.kind = Verdict::Kind::Open;
      verdict.saturated = true;
      verdict.open_branch = std::move(r.open);
      auto [model, assignment] = extract_model(*verdict.open_branch);
      bool ok = satisfies_prefixed(model, assignment, *verdict.open_branch);
      const auto conditions = conditions_for_logic(preset.name);
      if (ok && !conditions.empty()) {
        std::set<Formula> vocab;
        for (const auto& pf : verdict.open_branch->items()) {
          auto s = subformulas(pf.formula(), true);
          vocab.insert(s.begin(), s.end());
        }
        const auto report = check_conditions(model, vocab, conditions);
        if (!report.all_satisfied()) {
          ok = false;
          for (const auto& cv : report.verdicts)
            if (!cv.satisfied) {
              verdict.violated_condition = cv.id;
              break;
            }
        }
      }
      verdict.countermodel = std::move(model);
      verdict.certified = ok;
      return verdict;
    }
    case detail::Search::Status::Out:
      verdict.kind = Verdict::Kind::ResourceOut;
      return verdict;
  }
  return verdict;
}

inline Verdict prove(std::initializer_list<Formula> premises, const Formula& goal,
                     const LogicPreset& preset, const Limits& limits = {}) {
  return prove(std::span<const Formula>(premises.begin(), premises.size()), goal, preset,
               limits);
}

// ---------------------------------------------------------------------------
// Replay: an independent check that a proof tree is a closed tableau. Walks
// the tree keeping the path's label set, revalidates every rule instance
// against the schema and its side conditions, and requires every leaf to
// close. Search policies play no role here, so hand-written proofs in any
// rule order replay fine.

struct ReplayResult {
  bool ok = true;
  std::string error;

  explicit operator bool() const { return ok; }
};

namespace detail {

inline ReplayResult replay_fail(std::string msg) { return {false, std::move(msg)}; }

inline ReplayResult replay_node(const LogicPreset& preset, const ProofNode& node,
                                std::vector<PrefixedFormula>& path, std::string where) {
  const std::size_t mark = path.size();
  path.insert(path.end(), node.added.begin(), node.added.end());
  auto leave = [&] {
    path.erase(path.begin() + static_cast<std::ptrdiff_t>(mark), path.end());
  };

  if (node.children.empty()) {
    if (!node.closure) {
      leave();
      return replay_fail(where + ": open leaf");
    }
    for (const auto& pf : node.closure->items()) {
      if (std::find(path.begin(), path.end(), pf) == path.end()) {
        leave();
        return replay_fail(where + ": closure item not on branch: " + pf.to_string());
      }
    }
    leave();
    return {};
  }

  // all children must realize the alternatives of one shared instance
  const auto& first = node.children.front();
  if (!first.justification) {
    leave();
    return replay_fail(where + ": child without justification");
  }
  const RuleInstance& inst = *first.justification;
  if (!preset.has(inst.rule)) {
    leave();
    return replay_fail(where + ": rule " + rule_name(inst.rule) + " is not in preset " +
                       preset.name);
  }
  auto vr = validate_instance(inst, path);
  if (!vr.ok) {
    leave();
    return replay_fail(where + ": " + vr.error);
  }
  if (node.children.size() != inst.alternatives.size()) {
    leave();
    return replay_fail(where + ": rule " + rule_name(inst.rule) + " needs " +
                       std::to_string(inst.alternatives.size()) + " children, found " +
                       std::to_string(node.children.size()));
  }
  for (std::size_t t = 0; t < node.children.size(); ++t) {
    const ProofNode& child = node.children[t];
    if (!child.justification || child.justification->fingerprint() != inst.fingerprint() ||
        child.justification->fresh != inst.fresh) {
      leave();
      return replay_fail(where + ": siblings justified by different instances");
    }
    if (child.alt != static_cast<int>(t)) {
      leave();
      return replay_fail(where + ": child " + std::to_string(t) + " realizes alternative " +
                         std::to_string(child.alt));
    }
    auto expected = inst.alternatives[t];
    auto actual = child.added;
    std::sort(expected.begin(), expected.end());
    std::sort(actual.begin(), actual.end());
    if (expected != actual) {
      leave();
      return replay_fail(where + ": child " + std::to_string(t) +
                         " does not add the rule's conclusions");
    }
    auto r = replay_node(preset, child, path, where + "." + std::to_string(t));
    if (!r.ok) {
      leave();
      return r;
    }
  }
  leave();
  return {};
}

}  // namespace detail

inline ReplayResult replay(const Proof& proof) {
  auto preset = LogicPreset::by_name(proof.logic);
  if (!preset) return detail::replay_fail("unknown logic: " + proof.logic);
  if (proof.ea_prime) *preset = preset->with_ea_prime();
  if (proof.root.justification)
    return detail::replay_fail("root must be the assumption node");
  {
    auto a = proof.assumptions;
    auto b = proof.root.added;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return detail::replay_fail("root node does not carry the assumptions");
  }
  std::vector<PrefixedFormula> path;
  return detail::replay_node(*preset, proof.root, path, "root");
}

// ---------------------------------------------------------------------------
// Text rendering, one numbered line per added formula, children indented.

namespace detail {

struct ProofPrinter {
  std::string out;
  int next_line = 1;

  void line(int depth, const std::string& body, const std::string& just) {
    char num[16];
    std::snprintf(num, sizeof num, "%3d. ", next_line++);
    out += num;
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += body;
    out += "   [";
    out += just;
    out += "]\n";
  }

  static int find_line(const std::vector<std::pair<PrefixedFormula, int>>& path,
                       const PrefixedFormula& pf) {
    for (const auto& [item, n] : path)
      if (item == pf) return n;
    return 0;
  }

  void node(const ProofNode& n, int depth,
            std::vector<std::pair<PrefixedFormula, int>>& path) {
    const std::size_t mark = path.size();
    std::string just = "Ass";
    if (n.justification) {
      just = rule_name(n.justification->rule);
      std::string refs;
      for (const auto& p : n.justification->premises) {
        if (!refs.empty()) refs += ",";
        refs += std::to_string(find_line(path, p));
      }
      if (n.justification->side_formula)
        just += " " + n.justification->side_formula->to_string();
      if (n.justification->at_index && n.justification->premises.empty())
        just += " @" + std::to_string(n.justification->at_index->value);
      if (!refs.empty()) just += ": " + refs;
    }
    for (const auto& pf : n.added) {
      line(depth, pf.to_string(), just);
      path.emplace_back(pf, next_line - 1);
    }
    if (n.closure) {
      std::string refs;
      for (const auto& pf : n.closure->items()) {
        if (!refs.empty()) refs += ", ";
        refs += std::to_string(find_line(path, pf));
      }
      out.append(5 + static_cast<std::size_t>(depth) * 2, ' ');
      out += "* closed (" + refs + ")\n";
    }
    for (const auto& child : n.children) node(child, depth + 1, path);
    path.erase(path.begin() + static_cast<std::ptrdiff_t>(mark), path.end());
  }
};

}  // namespace detail

inline std::string proof_to_text(const Proof& proof) {
  detail::ProofPrinter printer;
  printer.out = "tableau [" + proof.logic + "]\n";
  std::vector<std::pair<PrefixedFormula, int>> path;
  printer.node(proof.root, 0, path);
  return printer.out;
}

// Collects the rules used anywhere in a proof (handy for tests and reports).
inline void collect_rules(const ProofNode& n, std::set<RuleId>& out) {
  if (n.justification) out.insert(n.justification->rule);
  for (const auto& c : n.children) collect_rules(c, out);
}

inline std::set<RuleId> rules_used(const Proof& proof) {
  std::set<RuleId> out;
  collect_rules(proof.root, out);
  return out;
}

}  // namespace cstab
