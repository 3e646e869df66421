#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>

namespace cstab {

// Connectives of the conditional language. Nec/Poss are the indexed
// modalities [A]B and <A>B whose accessibility relation is keyed by the
// antecedent formula A itself, not by the proposition A expresses.
enum class Conn : std::uint8_t {
  Atom,
  Bottom,
  Top,
  Not,
  And,
  Or,
  Imp,
  Nec,   // [A]B
  Poss,  // <A>B
};

// Immutable formula value with structural identity. Two formulas compare
// equal iff they are the same syntax tree; logically equivalent but
// syntactically distinct antecedents stay distinct (Ck is syntax-sensitive).
class Formula {
 public:
  // Default-constructed formula is Bottom.
  Formula() : n_(bottom_node()) {}

  static Formula atom(std::string name) {
    return Formula(make(Conn::Atom, std::move(name), nullptr, nullptr));
  }
  static Formula bottom() { return Formula(bottom_node()); }
  static Formula top() { return Formula(top_node()); }
  static Formula negation(const Formula& f) {
    return Formula(make(Conn::Not, {}, f.n_, nullptr));
  }
  static Formula conj(const Formula& a, const Formula& b) {
    return Formula(make(Conn::And, {}, a.n_, b.n_));
  }
  static Formula disj(const Formula& a, const Formula& b) {
    return Formula(make(Conn::Or, {}, a.n_, b.n_));
  }
  static Formula impl(const Formula& a, const Formula& b) {
    return Formula(make(Conn::Imp, {}, a.n_, b.n_));
  }
  static Formula nec(const Formula& ant, const Formula& cons) {
    return Formula(make(Conn::Nec, {}, ant.n_, cons.n_));
  }
  static Formula poss(const Formula& ant, const Formula& cons) {
    return Formula(make(Conn::Poss, {}, ant.n_, cons.n_));
  }

  Conn kind() const { return n_->kind; }
  bool is(Conn k) const { return n_->kind == k; }

  const std::string& atom_name() const { return n_->name; }

  // First child: operand of Not, left of And/Or/Imp, antecedent of a modal.
  Formula left() const { return Formula(n_->a); }
  // Second child: right of And/Or/Imp, consequent of a modal.
  Formula right() const { return Formula(n_->b); }
  Formula operand() const { return left(); }
  Formula antecedent() const { return left(); }
  Formula consequent() const { return right(); }

  bool has_children() const { return n_->a != nullptr; }
  bool is_binary() const { return n_->b != nullptr; }
  bool is_modal() const { return is(Conn::Nec) || is(Conn::Poss); }

  int node_count() const { return n_->count; }
  std::size_t hash() const { return n_->hash; }

  bool operator==(const Formula& o) const {
    return n_ == o.n_ || (n_->hash == o.n_->hash && cmp(n_.get(), o.n_.get()) == 0);
  }
  bool operator!=(const Formula& o) const { return !(*this == o); }
  bool operator<(const Formula& o) const { return cmp(n_.get(), o.n_.get()) < 0; }

  std::string to_string() const {
    std::string out;
    render(out, 0);
    return out;
  }

 private:
  struct Node {
    Conn kind;
    std::string name;  // atoms only
    std::shared_ptr<const Node> a, b;
    std::size_t hash;
    int count;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit Formula(NodePtr n) : n_(std::move(n)) {}

  static NodePtr make(Conn k, std::string name, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    n->a = std::move(a);
    n->b = std::move(b);
    std::size_t h = std::hash<int>{}(static_cast<int>(k));
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    if (k == Conn::Atom) mix(std::hash<std::string>{}(n->name));
    int count = 1;
    if (n->a) {
      mix(n->a->hash);
      count += n->a->count;
    }
    if (n->b) {
      mix(n->b->hash);
      count += n->b->count;
    }
    n->hash = h;
    n->count = count;
    return n;
  }

  static const NodePtr& bottom_node() {
    static const NodePtr n = make(Conn::Bottom, {}, nullptr, nullptr);
    return n;
  }
  static const NodePtr& top_node() {
    static const NodePtr n = make(Conn::Top, {}, nullptr, nullptr);
    return n;
  }

  static int cmp(const Node* x, const Node* y) {
    if (x == y) return 0;
    if (x->kind != y->kind) return x->kind < y->kind ? -1 : 1;
    if (x->kind == Conn::Atom) return x->name.compare(y->name);
    if (x->a) {
      if (int c = cmp(x->a.get(), y->a.get())) return c;
    }
    if (x->b) {
      if (int c = cmp(x->b.get(), y->b.get())) return c;
    }
    return 0;
  }

  // Precedence: 3 = prefix (~, [A]B, <A>B), 2 = &, 1 = |, 0 = ->.
  // Binary connectives group to the right; parentheses are minimal.
  int prec() const {
    switch (n_->kind) {
      case Conn::And: return 2;
      case Conn::Or: return 1;
      case Conn::Imp: return 0;
      case Conn::Not:
      case Conn::Nec:
      case Conn::Poss: return 3;
      default: return 4;
    }
  }

  void render(std::string& out, int min_prec) const {
    const bool paren = prec() < min_prec;
    if (paren) out += '(';
    switch (n_->kind) {
      case Conn::Atom: out += n_->name; break;
      case Conn::Bottom: out += "_|_"; break;
      case Conn::Top: out += "true"; break;
      case Conn::Not:
        out += '~';
        operand().render(out, 3);
        break;
      case Conn::Nec:
        out += '[';
        antecedent().render(out, 0);
        out += ']';
        consequent().render(out, 3);
        break;
      case Conn::Poss:
        out += '<';
        antecedent().render(out, 0);
        out += '>';
        consequent().render(out, 3);
        break;
      case Conn::And:
        left().render(out, 3);
        out += " & ";
        right().render(out, 2);
        break;
      case Conn::Or:
        left().render(out, 2);
        out += " | ";
        right().render(out, 1);
        break;
      case Conn::Imp:
        left().render(out, 1);
        out += " -> ";
        right().render(out, 0);
        break;
    }
    if (paren) out += ')';
  }

  NodePtr n_;
};

inline Formula operator!(const Formula& f) { return Formula::negation(f); }
inline Formula operator&&(const Formula& a, const Formula& b) { return Formula::conj(a, b); }
inline Formula operator||(const Formula& a, const Formula& b) { return Formula::disj(a, b); }

// Reflexive-transitive closure of immediate subterms, antecedents included.
// With `with_negations`, the negation of every member is added as well; this
// feeds the analytic cut candidates and condition-check vocabularies.
inline void collect_subformulas(const Formula& f, std::set<Formula>& out) {
  if (!out.insert(f).second) return;
  switch (f.kind()) {
    case Conn::Not:
      collect_subformulas(f.operand(), out);
      break;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
    case Conn::Nec:
    case Conn::Poss:
      collect_subformulas(f.left(), out);
      collect_subformulas(f.right(), out);
      break;
    default:
      break;
  }
}

inline std::set<Formula> subformulas(const Formula& f, bool with_negations = false) {
  std::set<Formula> out;
  collect_subformulas(f, out);
  if (with_negations) {
    std::set<Formula> neg;
    for (const auto& g : out) neg.insert(!g);
    out.insert(neg.begin(), neg.end());
  }
  return out;
}

// Antecedents of every Nec/Poss subformula.
inline std::set<Formula> antecedents(const Formula& f) {
  std::set<Formula> out;
  for (const auto& g : subformulas(f))
    if (g.is_modal()) out.insert(g.antecedent());
  return out;
}

inline std::set<std::string> atom_names(const Formula& f) {
  std::set<std::string> out;
  for (const auto& g : subformulas(f))
    if (g.is(Conn::Atom)) out.insert(g.atom_name());
  return out;
}

}  // namespace cstab

template <>
struct std::hash<cstab::Formula> {
  std::size_t operator()(const cstab::Formula& f) const noexcept { return f.hash(); }
};
