#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "cstab/formula.hpp"

namespace cstab {

// World index on a tableau branch. Index 1 carries the assumptions.
struct Index {
  int value = 1;
  bool operator==(const Index& o) const { return value == o.value; }
  bool operator!=(const Index& o) const { return value != o.value; }
  bool operator<(const Index& o) const { return value < o.value; }
};

// Either i:phi ("phi holds at i") or r(i,j,phi) ("j is phi-accessible
// from i"); the accessibility index formula of Rel compares syntactically.
class PrefixedFormula {
 public:
  enum class Kind { At, Rel };

  static PrefixedFormula at(Index i, Formula f) {
    return PrefixedFormula(Kind::At, i, i, std::move(f));
  }
  static PrefixedFormula rel(Index i, Index j, Formula f) {
    return PrefixedFormula(Kind::Rel, i, j, std::move(f));
  }

  Kind kind() const { return kind_; }
  bool is_at() const { return kind_ == Kind::At; }
  bool is_rel() const { return kind_ == Kind::Rel; }
  Index index() const { return i_; }        // At: the prefix; Rel: the source
  Index target() const { return j_; }       // Rel only
  const Formula& formula() const { return f_; }

  bool operator==(const PrefixedFormula& o) const {
    return kind_ == o.kind_ && i_ == o.i_ && j_ == o.j_ && f_ == o.f_;
  }
  bool operator!=(const PrefixedFormula& o) const { return !(*this == o); }
  bool operator<(const PrefixedFormula& o) const {
    if (kind_ != o.kind_) return kind_ < o.kind_;
    if (i_.value != o.i_.value) return i_.value < o.i_.value;
    if (j_.value != o.j_.value) return j_.value < o.j_.value;
    return f_ < o.f_;
  }

  std::size_t hash() const {
    std::size_t h = f_.hash();
    h ^= static_cast<std::size_t>(i_.value) * 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(j_.value) * 0xc2b2ae3d27d4eb4full + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(kind_) + (h << 6);
    return h;
  }

  std::string to_string() const {
    if (is_at()) return std::to_string(i_.value) + ": " + f_.to_string();
    return "r(" + std::to_string(i_.value) + "," + std::to_string(j_.value) +
           "): " + f_.to_string();
  }

 private:
  PrefixedFormula(Kind k, Index i, Index j, Formula f)
      : kind_(k), i_(i), j_(j), f_(std::move(f)) {}

  Kind kind_;
  Index i_, j_;
  Formula f_;
};

struct PrefixedFormulaHash {
  std::size_t operator()(const PrefixedFormula& p) const noexcept { return p.hash(); }
};

inline PrefixedFormula at(int i, const Formula& f) {
  return PrefixedFormula::at(Index{i}, f);
}
inline PrefixedFormula rel(int i, int j, const Formula& f) {
  return PrefixedFormula::rel(Index{i}, Index{j}, f);
}

// Explicit contradiction closing a branch: {i:phi, i:~phi}, {i:_|_}, or
// {i:~true} (true is primitive, so ~true closes directly).
struct ClosureWitness {
  enum class Kind { Pair, Falsum, NegTop };
  Kind kind;
  Index index;
  Formula formula;  // Pair: the positive member phi; otherwise unused

  std::vector<PrefixedFormula> items() const {
    switch (kind) {
      case Kind::Pair:
        return {PrefixedFormula::at(index, formula), PrefixedFormula::at(index, !formula)};
      case Kind::Falsum:
        return {PrefixedFormula::at(index, Formula::bottom())};
      case Kind::NegTop:
        return {PrefixedFormula::at(index, !Formula::top())};
    }
    return {};
  }

  std::string to_string() const {
    const auto pfs = items();
    std::string out = "closed on " + pfs.front().to_string();
    if (pfs.size() > 1) out += " / " + pfs.back().to_string();
    return out;
  }
};

// One root-to-leaf label set of a tableau, with rule-application
// bookkeeping. Branches are persistent values: extension copies, so
// sibling branches never alias each other's state.
class Branch {
 public:
  // Index 1 is always present, per the root prefix convention.
  Branch() { indices_.insert(1); }

  static Branch from_assumptions(std::span<const PrefixedFormula> assumptions) {
    Branch b;
    for (const auto& pf : assumptions) b.insert(pf);
    return b;
  }

  const std::vector<PrefixedFormula>& items() const { return items_; }
  bool contains(const PrefixedFormula& pf) const { return present_.count(pf) > 0; }
  bool index_occurs(Index i) const { return indices_.count(i.value) > 0; }
  const std::set<int>& indices() const { return indices_; }

  bool fingerprint_applied(const std::string& fp) const { return applied_.count(fp) > 0; }

  // Smallest index new to the branch; stable until something is added.
  Index peek_fresh() const { return Index{fresh_}; }

  // Draws and consumes a fresh index: successive draws are distinct even
  // before the index appears in any item.
  Index fresh_index() { return Index{fresh_++}; }

  // Persistent extension: new branch with the conclusions added and the
  // rule-instance fingerprint recorded. Insertion is idempotent and keeps
  // the original item order.
  Branch extend(std::span<const PrefixedFormula> added, const std::string& fingerprint) const {
    Branch b = *this;
    for (const auto& pf : added) b.insert(pf);
    if (!fingerprint.empty()) b.applied_.insert(fingerprint);
    return b;
  }

  Branch add(const PrefixedFormula& pf) const {
    return extend(std::span<const PrefixedFormula>(&pf, 1), {});
  }

  std::optional<ClosureWitness> closure_witness() const {
    for (const auto& pf : items_) {
      if (!pf.is_at()) continue;
      const Formula& f = pf.formula();
      if (f.is(Conn::Bottom))
        return ClosureWitness{ClosureWitness::Kind::Falsum, pf.index(), f};
      if (f.is(Conn::Not)) {
        if (f.operand().is(Conn::Top))
          return ClosureWitness{ClosureWitness::Kind::NegTop, pf.index(), f.operand()};
        if (contains(PrefixedFormula::at(pf.index(), f.operand())))
          return ClosureWitness{ClosureWitness::Kind::Pair, pf.index(), f.operand()};
      } else if (contains(PrefixedFormula::at(pf.index(), !f))) {
        return ClosureWitness{ClosureWitness::Kind::Pair, pf.index(), f};
      }
    }
    return std::nullopt;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& pf : items_) {
      out += pf.to_string();
      out += '\n';
    }
    return out;
  }

 private:
  void insert(const PrefixedFormula& pf) {
    if (!present_.insert(pf).second) return;
    items_.push_back(pf);
    indices_.insert(pf.index().value);
    fresh_ = std::max(fresh_, pf.index().value + 1);
    if (pf.is_rel()) {
      indices_.insert(pf.target().value);
      fresh_ = std::max(fresh_, pf.target().value + 1);
    }
  }

  std::vector<PrefixedFormula> items_;
  std::unordered_set<PrefixedFormula, PrefixedFormulaHash> present_;
  std::unordered_set<std::string> applied_;
  std::set<int> indices_;
  int fresh_ = 2;
};

}  // namespace cstab
