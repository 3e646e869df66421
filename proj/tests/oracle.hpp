// Test-only oracles and generators. The truth-table evaluator and the
// reference subterm collector are deliberately written from scratch so they
// stay independent of the library code paths they check.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstab/formula.hpp"
#include "cstab/prefixed.hpp"
#include "cstab/semantics.hpp"

namespace oracle {

using cstab::Conn;
using cstab::Formula;

// xorshift64*, fixed seeds keep every fuzz run reproducible.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545f4914f6cdd1dull;
  }

  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  bool coin() { return (next() & 1) != 0; }
};

// Plain recursive truth-table evaluation; modal operators are out of scope.
inline bool tt_eval(const Formula& f, const std::map<std::string, bool>& env) {
  switch (f.kind()) {
    case Conn::Atom: {
      auto it = env.find(f.atom_name());
      if (it == env.end()) throw std::logic_error("tt_eval: unbound atom");
      return it->second;
    }
    case Conn::Bottom: return false;
    case Conn::Top: return true;
    case Conn::Not: return !tt_eval(f.operand(), env);
    case Conn::And: return tt_eval(f.left(), env) && tt_eval(f.right(), env);
    case Conn::Or: return tt_eval(f.left(), env) || tt_eval(f.right(), env);
    case Conn::Imp: return !tt_eval(f.left(), env) || tt_eval(f.right(), env);
    default: throw std::logic_error("tt_eval: modal operator");
  }
}

inline bool is_tautology(const Formula& f) {
  const auto names = cstab::atom_names(f);
  const std::vector<std::string> atoms(names.begin(), names.end());
  if (atoms.size() > 16) throw std::logic_error("is_tautology: too many atoms");
  for (std::uint32_t bits = 0; bits < (1u << atoms.size()); ++bits) {
    std::map<std::string, bool> env;
    for (std::size_t i = 0; i < atoms.size(); ++i) env[atoms[i]] = (bits >> i & 1u) != 0;
    if (!tt_eval(f, env)) return false;
  }
  return true;
}

// Every formula over {p,q} with at most `max_connectives` occurrences of
// ~, &, | and ->.
inline std::vector<Formula> propositional_formulas(int max_connectives) {
  std::vector<std::vector<Formula>> by_count(static_cast<std::size_t>(max_connectives) + 1);
  by_count[0] = {Formula::atom("p"), Formula::atom("q")};
  for (int k = 1; k <= max_connectives; ++k) {
    auto& out = by_count[static_cast<std::size_t>(k)];
    for (const auto& f : by_count[static_cast<std::size_t>(k - 1)]) out.push_back(!f);
    for (int a = 0; a <= k - 1; ++a) {
      const int b = k - 1 - a;
      for (const auto& l : by_count[static_cast<std::size_t>(a)]) {
        for (const auto& r : by_count[static_cast<std::size_t>(b)]) {
          out.push_back(l && r);
          out.push_back(l || r);
          out.push_back(Formula::impl(l, r));
        }
      }
    }
  }
  std::vector<Formula> all;
  for (const auto& level : by_count) all.insert(all.end(), level.begin(), level.end());
  return all;
}

inline Formula random_atom(Rng& rng, int atoms) {
  static const char* names[] = {"p", "q", "r", "s"};
  return Formula::atom(names[rng.below(atoms)]);
}

inline Formula random_propositional(Rng& rng, int depth, int atoms = 2) {
  if (depth == 0 || rng.below(4) == 0) return random_atom(rng, atoms);
  switch (rng.below(4)) {
    case 0: return !random_propositional(rng, depth - 1, atoms);
    case 1:
      return random_propositional(rng, depth - 1, atoms) &&
             random_propositional(rng, depth - 1, atoms);
    case 2:
      return random_propositional(rng, depth - 1, atoms) ||
             random_propositional(rng, depth - 1, atoms);
    default:
      return Formula::impl(random_propositional(rng, depth - 1, atoms),
                           random_propositional(rng, depth - 1, atoms));
  }
}

// Random formula over the full language, constants included.
inline Formula random_modal(Rng& rng, int depth, int atoms = 2) {
  if (depth == 0) {
    const int pick = rng.below(8);
    if (pick == 6) return Formula::top();
    if (pick == 7) return Formula::bottom();
    return random_atom(rng, atoms);
  }
  switch (rng.below(8)) {
    case 0: return random_atom(rng, atoms);
    case 1: return !random_modal(rng, depth - 1, atoms);
    case 2: return random_modal(rng, depth - 1, atoms) && random_modal(rng, depth - 1, atoms);
    case 3: return random_modal(rng, depth - 1, atoms) || random_modal(rng, depth - 1, atoms);
    case 4:
      return Formula::impl(random_modal(rng, depth - 1, atoms),
                           random_modal(rng, depth - 1, atoms));
    case 5:
      return Formula::nec(random_modal(rng, depth - 1, atoms),
                          random_modal(rng, depth - 1, atoms));
    default:
      return Formula::poss(random_modal(rng, depth - 1, atoms),
                           random_modal(rng, depth - 1, atoms));
  }
}

// Reference subterm collector, including modal antecedents, written as a
// separate walk from the library's.
inline void reference_subterms(const Formula& f, std::set<Formula>& out) {
  out.insert(f);
  if (f.is(Conn::Not)) {
    reference_subterms(f.operand(), out);
  } else if (f.is(Conn::And) || f.is(Conn::Or) || f.is(Conn::Imp) || f.is(Conn::Nec) ||
             f.is(Conn::Poss)) {
    reference_subterms(f.left(), out);
    reference_subterms(f.right(), out);
  }
}

// Random finite model over the given atoms and accessibility keys.
inline cstab::PriestModel random_model(Rng& rng, int worlds,
                                       const std::vector<std::string>& atoms,
                                       const std::vector<Formula>& keys) {
  cstab::PriestModel m;
  for (int w = 1; w <= worlds; ++w) m.worlds.insert(w);
  for (const auto& name : atoms) {
    auto& ws = m.valuation[name];
    for (int w = 1; w <= worlds; ++w)
      if (rng.coin()) ws.insert(w);
  }
  for (const auto& key : keys) {
    auto& rel = m.access[key];
    for (int a = 1; a <= worlds; ++a)
      for (int b = 1; b <= worlds; ++b)
        if (rng.below(3) == 0) rel.insert({a, b});
  }
  return m;
}

// Whether any model up to the world bound satisfies the prefixed set under
// any assignment; exhaustive over the set's own vocabulary.
inline bool some_model_satisfies(const std::vector<cstab::PrefixedFormula>& items,
                                 int max_worlds) {
  std::set<std::string> atom_set;
  std::set<Formula> key_set;
  std::set<int> index_set{1};
  for (const auto& pf : items) {
    auto a = cstab::atom_names(pf.formula());
    atom_set.insert(a.begin(), a.end());
    auto k = cstab::antecedents(pf.formula());
    key_set.insert(k.begin(), k.end());
    if (pf.is_rel()) {
      key_set.insert(pf.formula());
      index_set.insert(pf.target().value);
    }
    index_set.insert(pf.index().value);
  }
  const std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  const std::vector<Formula> keys(key_set.begin(), key_set.end());
  const std::vector<int> indices(index_set.begin(), index_set.end());

  for (int n = 1; n <= max_worlds; ++n) {
    const std::size_t val_bits = atoms.size() * static_cast<std::size_t>(n);
    const std::size_t rel_bits = keys.size() * static_cast<std::size_t>(n * n);
    if (val_bits + rel_bits > 24) throw std::logic_error("some_model_satisfies: too large");
    for (std::uint64_t vbits = 0; vbits < (1ull << val_bits); ++vbits) {
      for (std::uint64_t rbits = 0; rbits < (1ull << rel_bits); ++rbits) {
        cstab::PriestModel m;
        for (int w = 1; w <= n; ++w) m.worlds.insert(w);
        std::size_t vi = 0;
        for (const auto& name : atoms)
          for (int w = 1; w <= n; ++w, ++vi)
            if (vbits >> vi & 1ull) m.valuation[name].insert(w);
        std::size_t ri = 0;
        for (const auto& key : keys)
          for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b, ++ri)
              if (rbits >> ri & 1ull) m.access[key].insert({a, b});
        // all assignments of indices to worlds
        std::vector<int> pick(indices.size(), 1);
        while (true) {
          cstab::Assignment f;
          for (std::size_t i = 0; i < indices.size(); ++i) f.map[indices[i]] = pick[i];
          if (cstab::satisfies_prefixed(m, f, items)) return true;
          std::size_t d = 0;
          while (d < pick.size() && ++pick[d] > n) pick[d++] = 1;
          if (d == pick.size()) break;
        }
      }
    }
  }
  return false;
}

}  // namespace oracle
