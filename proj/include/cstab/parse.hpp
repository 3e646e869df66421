#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cstab/formula.hpp"

namespace cstab {

// Syntax error with byte position and the tokens that would have been
// accepted at that point.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t pos, std::string found, std::vector<std::string> expected)
      : std::runtime_error(format(pos, found, expected)),
        position(pos),
        found(std::move(found)),
        expected(std::move(expected)) {}

  std::size_t position;
  std::string found;
  std::vector<std::string> expected;

 private:
  static std::string format(std::size_t pos, const std::string& found,
                            const std::vector<std::string>& expected) {
    std::string msg = "syntax error at position " + std::to_string(pos) + ": found " + found;
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
        msg += expected[i];
      }
    }
    return msg;
  }
};

namespace detail {

enum class Tok {
  Atom,
  True,
  False,
  Not,
  And,
  Or,
  Imp,     // ->
  Iff,     // <->
  CifArrow,   // =>  (would-conditional, same node as [A]B)
  MifArrow,   // ~>  (might-conditional, same node as <A>B)
  BoxWord,    // box / unicode box
  DiaWord,    // dia / unicode diamond
  LBrack,
  RBrack,
  Lt,
  Gt,
  LParen,
  RParen,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline bool starts_with(std::string_view s, std::size_t i, std::string_view pat) {
  return s.compare(i, pat.size(), pat) == 0;
}

inline std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, std::size_t pos) {
    out.push_back({k, std::move(text), pos});
  };
  while (i < s.size()) {
    const char c = s[i];
    const std::size_t pos = i;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    // Unicode aliases, matched on their UTF-8 byte sequences.
    struct Uni { std::string_view pat; Tok kind; };
    static constexpr Uni unis[] = {
        {"¬", Tok::Not},  {"∧", Tok::And},  {"∨", Tok::Or},
        {"⊃", Tok::Imp},  {"≡", Tok::Iff},  {"□", Tok::BoxWord},
        {"◇", Tok::DiaWord}, {"⊤", Tok::True}, {"⊥", Tok::False},
    };
    bool matched = false;
    for (const auto& u : unis) {
      if (starts_with(s, i, u.pat)) {
        push(u.kind, std::string(u.pat), pos);
        i += u.pat.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    switch (c) {
      case '~':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          push(Tok::MifArrow, "~>", pos);
          i += 2;
        } else {
          push(Tok::Not, "~", pos);
          ++i;
        }
        continue;
      case '&': push(Tok::And, "&", pos); ++i; continue;
      case '|': push(Tok::Or, "|", pos); ++i; continue;
      case '(': push(Tok::LParen, "(", pos); ++i; continue;
      case ')': push(Tok::RParen, ")", pos); ++i; continue;
      case '[': push(Tok::LBrack, "[", pos); ++i; continue;
      case ']': push(Tok::RBrack, "]", pos); ++i; continue;
      case '>': push(Tok::Gt, ">", pos); ++i; continue;
      case '<':
        if (starts_with(s, i, "<->")) {
          push(Tok::Iff, "<->", pos);
          i += 3;
        } else {
          push(Tok::Lt, "<", pos);
          ++i;
        }
        continue;
      case '-':
        if (starts_with(s, i, "->")) {
          push(Tok::Imp, "->", pos);
          i += 2;
          continue;
        }
        throw ParseError(pos, "'-'", {"'->'"});
      case '=':
        if (starts_with(s, i, "=>")) {
          push(Tok::CifArrow, "=>", pos);
          i += 2;
          continue;
        }
        throw ParseError(pos, "'='", {"'=>'"});
      case '_':
        if (starts_with(s, i, "_|_")) {
          push(Tok::False, "_|_", pos);
          i += 3;
          continue;
        }
        throw ParseError(pos, "'_'", {"'_|_'"});
      default: break;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string word(s.substr(i, j - i));
      i = j;
      if (word == "true") push(Tok::True, word, pos);
      else if (word == "false") push(Tok::False, word, pos);
      else if (word == "box") push(Tok::BoxWord, word, pos);
      else if (word == "dia") push(Tok::DiaWord, word, pos);
      else push(Tok::Atom, word, pos);
      continue;
    }
    throw ParseError(pos, "'" + std::string(1, c) + "'", {"a formula token"});
  }
  push(Tok::End, "end of input", s.size());
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Formula parse() {
    Formula f = iff();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = peek();
    throw ParseError(t.pos, t.kind == Tok::End ? t.text : "'" + t.text + "'",
                     std::move(expected));
  }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail({what});
    ++i_;
  }

  Formula iff() {
    Formula a = cond();
    if (peek().kind == Tok::Iff) {
      ++i_;
      Formula b = iff();
      // a <-> b is sugar for (a -> b) & (b -> a)
      return Formula::impl(a, b) && Formula::impl(b, a);
    }
    return a;
  }

  Formula cond() {
    Formula a = disjunct();
    switch (peek().kind) {
      case Tok::Imp: ++i_; return Formula::impl(a, cond());
      case Tok::CifArrow: ++i_; return Formula::nec(a, cond());
      case Tok::MifArrow: ++i_; return Formula::poss(a, cond());
      default: return a;
    }
  }

  Formula disjunct() {
    Formula a = conjunct();
    if (peek().kind == Tok::Or) {
      ++i_;
      return a || disjunct();
    }
    return a;
  }

  Formula conjunct() {
    Formula a = unary();
    if (peek().kind == Tok::And) {
      ++i_;
      return a && conjunct();
    }
    return a;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Not:
        ++i_;
        return !unary();
      case Tok::LBrack: {
        ++i_;
        Formula ant = iff();
        expect(Tok::RBrack, "']'");
        return Formula::nec(ant, unary());
      }
      case Tok::Lt: {
        ++i_;
        Formula ant = iff();
        expect(Tok::Gt, "'>'");
        return Formula::poss(ant, unary());
      }
      case Tok::BoxWord:
        // box A is sugar for [~A]_|_
        ++i_;
        return Formula::nec(!unary(), Formula::bottom());
      case Tok::DiaWord:
        // dia A is sugar for <A>true
        ++i_;
        return Formula::poss(unary(), Formula::top());
      default:
        return primary();
    }
  }

  Formula primary() {
    switch (peek().kind) {
      case Tok::Atom: return Formula::atom(take().text);
      case Tok::True: ++i_; return Formula::top();
      case Tok::False: ++i_; return Formula::bottom();
      case Tok::LParen: {
        ++i_;
        Formula f = iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        fail({"an atom", "'true'", "'false'", "'~'", "'['", "'<'", "'('"});
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::Parser(text).parse(); }

// Semicolon-separated formula lists, as used by --cut hints=... and --vocab.
inline std::vector<Formula> parse_formula_list(std::string_view text) {
  std::vector<Formula> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view piece = text.substr(start, end - start);
    std::size_t a = 0, b = piece.size();
    while (a < b && std::isspace(static_cast<unsigned char>(piece[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(piece[b - 1]))) --b;
    if (b > a) out.push_back(parse_formula(piece.substr(a, b - a)));
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace cstab
