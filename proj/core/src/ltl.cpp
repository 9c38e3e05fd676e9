#include "ltlnav/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

namespace ltlnav::ltl {

namespace {

FormulaPtr node(Kind k, std::string name, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->name = std::move(name);
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

}  // namespace

FormulaPtr make_true() { return node(Kind::True, {}, nullptr, nullptr); }
FormulaPtr make_false() { return node(Kind::False, {}, nullptr, nullptr); }
FormulaPtr make_atom(std::string name) {
  return node(Kind::Atom, std::move(name), nullptr, nullptr);
}
FormulaPtr make_not(FormulaPtr f) {
  return node(Kind::Not, {}, std::move(f), nullptr);
}
FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  return node(Kind::And, {}, std::move(a), std::move(b));
}
FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  return node(Kind::Or, {}, std::move(a), std::move(b));
}
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b) {
  return node(Kind::Implies, {}, std::move(a), std::move(b));
}
FormulaPtr make_next(FormulaPtr f) {
  return node(Kind::Next, {}, std::move(f), nullptr);
}
FormulaPtr make_until(FormulaPtr a, FormulaPtr b) {
  return node(Kind::Until, {}, std::move(a), std::move(b));
}
FormulaPtr make_release(FormulaPtr a, FormulaPtr b) {
  return node(Kind::Release, {}, std::move(a), std::move(b));
}
FormulaPtr make_always(FormulaPtr f) {
  return node(Kind::Always, {}, std::move(f), nullptr);
}
FormulaPtr make_eventually(FormulaPtr f) {
  return node(Kind::Eventually, {}, std::move(f), nullptr);
}

bool is_unary(Kind k) {
  return k == Kind::Not || k == Kind::Next || k == Kind::Always ||
         k == Kind::Eventually;
}
bool is_binary(Kind k) {
  return k == Kind::And || k == Kind::Or || k == Kind::Implies ||
         k == Kind::Until || k == Kind::Release;
}

ParseError::ParseError(const std::string& what, std::size_t col)
    : std::runtime_error(what + " at column " + std::to_string(col)),
      column(col) {}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class TokType {
  End,
  True,
  False,
  Ident,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Release,
  Always,
  Eventually,
  LParen,
  RParen,
};

struct Token {
  TokType type;
  std::string text;
  std::size_t col;  // 1-based
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
    std::size_t col = i_ + 1;
    if (i_ >= s_.size()) {
      tok_ = {TokType::End, "", col};
      return;
    }
    char c = s_[i_];
    auto two = [&](char second, TokType t, const char* what) {
      if (i_ + 1 >= s_.size() || s_[i_ + 1] != second)
        throw ParseError(std::string("'") + c + "' must be '" + what + "'",
                         col);
      i_ += 2;
      tok_ = {t, what, col};
    };
    switch (c) {
      case '!':
        ++i_;
        tok_ = {TokType::Not, "!", col};
        return;
      case '(':
        ++i_;
        tok_ = {TokType::LParen, "(", col};
        return;
      case ')':
        ++i_;
        tok_ = {TokType::RParen, ")", col};
        return;
      case '&':
        two('&', TokType::And, "&&");
        return;
      case '|':
        two('|', TokType::Or, "||");
        return;
      case '-':
        two('>', TokType::Implies, "->");
        return;
      case '[':
        two(']', TokType::Always, "[]");
        return;
      case '<':
        two('>', TokType::Eventually, "<>");
        return;
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
              s_[i_] == '_'))
        ++i_;
      std::string word(s_.substr(start, i_ - start));
      TokType t = TokType::Ident;
      if (word == "true")
        t = TokType::True;
      else if (word == "false")
        t = TokType::False;
      else if (word == "U")
        t = TokType::Until;
      else if (word == "R")
        t = TokType::Release;
      else if (word == "X")
        t = TokType::Next;
      tok_ = {t, std::move(word), col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", col);
  }

  std::string_view s_;
  std::size_t i_ = 0;
  Token tok_{TokType::End, "", 1};
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) {}

  FormulaPtr run() {
    FormulaPtr f = implies();
    if (lex_.peek().type != TokType::End)
      throw ParseError("unexpected trailing input", lex_.peek().col);
    return f;
  }

 private:
  FormulaPtr implies() {
    FormulaPtr l = disj();
    if (lex_.peek().type == TokType::Implies) {
      lex_.take();
      return make_implies(std::move(l), implies());  // right-associative
    }
    return l;
  }

  FormulaPtr disj() {
    FormulaPtr l = conj();
    while (lex_.peek().type == TokType::Or) {
      lex_.take();
      l = make_or(std::move(l), conj());
    }
    return l;
  }

  FormulaPtr conj() {
    FormulaPtr l = untilRelease();
    while (lex_.peek().type == TokType::And) {
      lex_.take();
      l = make_and(std::move(l), untilRelease());
    }
    return l;
  }

  FormulaPtr untilRelease() {
    FormulaPtr l = unary();
    TokType t = lex_.peek().type;
    if (t == TokType::Until || t == TokType::Release) {
      lex_.take();
      FormulaPtr r = untilRelease();  // right-associative
      return t == TokType::Until ? make_until(std::move(l), std::move(r))
                                 : make_release(std::move(l), std::move(r));
    }
    return l;
  }

  FormulaPtr unary() {
    switch (lex_.peek().type) {
      case TokType::Not:
        lex_.take();
        return make_not(unary());
      case TokType::Next:
        lex_.take();
        return make_next(unary());
      case TokType::Always:
        lex_.take();
        return make_always(unary());
      case TokType::Eventually:
        lex_.take();
        return make_eventually(unary());
      default:
        return primary();
    }
  }

  FormulaPtr primary() {
    Token t = lex_.peek();
    switch (t.type) {
      case TokType::True:
        lex_.take();
        return make_true();
      case TokType::False:
        lex_.take();
        return make_false();
      case TokType::Ident:
        lex_.take();
        return make_atom(std::move(t.text));
      case TokType::LParen: {
        lex_.take();
        FormulaPtr f = implies();
        if (lex_.peek().type != TokType::RParen)
          throw ParseError("expected ')'", lex_.peek().col);
        lex_.take();
        return f;
      }
      default:
        throw ParseError("expected a formula", t.col);
    }
  }

  Lexer lex_;
};

}  // namespace

FormulaPtr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength; parentheses are emitted when a child's level is below
// what its context requires.
int prec(Kind k) {
  switch (k) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return 6;
    case Kind::Not:
    case Kind::Next:
    case Kind::Always:
    case Kind::Eventually:
      return 4;
    case Kind::Until:
    case Kind::Release:
      return 3;
    case Kind::And:
      return 2;
    case Kind::Or:
      return 1;
    case Kind::Implies:
      return 0;
  }
  return 6;
}

void print(const Formula& f, int min_prec, std::string& out) {
  int p = prec(f.kind);
  bool paren = p < min_prec;
  if (paren) out += '(';
  switch (f.kind) {
    case Kind::True:
      out += "true";
      break;
    case Kind::False:
      out += "false";
      break;
    case Kind::Atom:
      out += f.name;
      break;
    case Kind::Not:
      out += '!';
      print(*f.lhs, 4, out);
      break;
    case Kind::Next:
      out += "X ";
      print(*f.lhs, 4, out);
      break;
    case Kind::Always:
      out += "[] ";
      print(*f.lhs, 4, out);
      break;
    case Kind::Eventually:
      out += "<> ";
      print(*f.lhs, 4, out);
      break;
    case Kind::Until:
    case Kind::Release:
      print(*f.lhs, 4, out);
      out += f.kind == Kind::Until ? " U " : " R ";
      print(*f.rhs, 3, out);
      break;
    case Kind::And:
      print(*f.lhs, 2, out);
      out += " && ";
      print(*f.rhs, 3, out);
      break;
    case Kind::Or:
      print(*f.lhs, 1, out);
      out += " || ";
      print(*f.rhs, 2, out);
      break;
    case Kind::Implies:
      print(*f.lhs, 1, out);
      out += " -> ";
      print(*f.rhs, 0, out);
      break;
  }
  if (paren) out += ')';
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, 0, out);
  return out;
}
std::string to_string(const FormulaPtr& f) { return to_string(*f); }

// ---------------------------------------------------------------------------
// Structural helpers

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Kind::Atom) return a.name == b.name;
  if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

std::size_t node_count(const Formula& f) {
  std::size_t n = 1;
  if (f.lhs) n += node_count(*f.lhs);
  if (f.rhs) n += node_count(*f.rhs);
  return n;
}

bool is_nnf(const Formula& f) {
  switch (f.kind) {
    case Kind::Implies:
    case Kind::Always:
    case Kind::Eventually:
      return false;
    case Kind::Not:
      return f.lhs->kind == Kind::Atom;
    default:
      if (f.lhs && !is_nnf(*f.lhs)) return false;
      if (f.rhs && !is_nnf(*f.rhs)) return false;
      return true;
  }
}

namespace {

FormulaPtr norm(const Formula& f, bool positive) {
  switch (f.kind) {
    case Kind::True:
      return positive ? make_true() : make_false();
    case Kind::False:
      return positive ? make_false() : make_true();
    case Kind::Atom:
      return positive ? make_atom(f.name) : make_not(make_atom(f.name));
    case Kind::Not:
      return norm(*f.lhs, !positive);
    case Kind::And:
      return positive ? make_and(norm(*f.lhs, true), norm(*f.rhs, true))
                      : make_or(norm(*f.lhs, false), norm(*f.rhs, false));
    case Kind::Or:
      return positive ? make_or(norm(*f.lhs, true), norm(*f.rhs, true))
                      : make_and(norm(*f.lhs, false), norm(*f.rhs, false));
    case Kind::Implies:  // a -> b  ==  !a || b
      return positive ? make_or(norm(*f.lhs, false), norm(*f.rhs, true))
                      : make_and(norm(*f.lhs, true), norm(*f.rhs, false));
    case Kind::Next:
      return make_next(norm(*f.lhs, positive));
    case Kind::Until:
      return positive ? make_until(norm(*f.lhs, true), norm(*f.rhs, true))
                      : make_release(norm(*f.lhs, false), norm(*f.rhs, false));
    case Kind::Release:
      return positive ? make_release(norm(*f.lhs, true), norm(*f.rhs, true))
                      : make_until(norm(*f.lhs, false), norm(*f.rhs, false));
    case Kind::Always:  // [] g  ==  false R g
      return positive ? make_release(make_false(), norm(*f.lhs, true))
                      : make_until(make_true(), norm(*f.lhs, false));
    case Kind::Eventually:  // <> g  ==  true U g
      return positive ? make_until(make_true(), norm(*f.lhs, true))
                      : make_release(make_false(), norm(*f.lhs, false));
  }
  return nullptr;  // unreachable
}

}  // namespace

FormulaPtr normalize(const FormulaPtr& f) { return norm(*f, true); }

std::vector<std::string> collect_atoms(const Formula& f) {
  std::set<std::string> seen;
  auto walk = [&seen](const Formula& g, auto&& self) -> void {
    if (g.kind == Kind::Atom) seen.insert(g.name);
    if (g.lhs) self(*g.lhs, self);
    if (g.rhs) self(*g.rhs, self);
  };
  walk(f, walk);
  return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Word evaluation

EncodedWord::EncodedWord(const Word& w)
    : pre_(static_cast<int>(w.prefix.size())),
      cyc_(static_cast<int>(w.cycle.size())) {
  if (w.cycle.empty())
    throw std::invalid_argument("word cycle must be nonempty");
  int len = pre_ + cyc_;
  std::size_t words = (static_cast<std::size_t>(len) + 63) / 64;
  zero_.assign(words, 0);
  std::set<std::string> names;
  for (const Letter& l : w.prefix) names.insert(l.begin(), l.end());
  for (const Letter& l : w.cycle) names.insert(l.begin(), l.end());
  masks_.reserve(names.size());
  for (const std::string& n : names)
    masks_.emplace_back(n, std::vector<std::uint64_t>(words, 0));
  auto mark = [this](const Letter& l, int pos) {
    for (const std::string& a : l) {
      auto it = std::lower_bound(
          masks_.begin(), masks_.end(), a,
          [](const auto& m, const std::string& k) { return m.first < k; });
      it->second[static_cast<std::size_t>(pos) / 64] |=
          std::uint64_t{1} << (pos % 64);
    }
  };
  for (int i = 0; i < pre_; ++i) mark(w.prefix[static_cast<std::size_t>(i)], i);
  for (int i = 0; i < cyc_; ++i)
    mark(w.cycle[static_cast<std::size_t>(i)], pre_ + i);
}

const std::vector<std::uint64_t>& EncodedWord::atom_mask(
    std::string_view name) const {
  // Typical words mention a handful of atoms; a scan beats hashing.
  for (const auto& [n, m] : masks_)
    if (n == name) return m;
  return zero_;
}

namespace {

// Fixpoint evaluation over the lasso quotient with positions packed into one
// 64-bit mask. next() maps bit i to bit i+1 except the last position, which
// wraps to the start of the cycle.
struct SmallEval {
  const EncodedWord& w;
  int len;
  int pre;
  std::uint64_t full;

  std::uint64_t next(std::uint64_t m) const {
    std::uint64_t wrap = (m >> pre) & 1u;
    return (m >> 1) | (wrap << (len - 1));
  }

  std::uint64_t ev(const Formula& f) const {
    switch (f.kind) {
      case Kind::True:
        return full;
      case Kind::False:
        return 0;
      case Kind::Atom:
        return w.atom_mask(f.name)[0];
      case Kind::Not:
        return ~ev(*f.lhs) & full;
      case Kind::And:
        return ev(*f.lhs) & ev(*f.rhs);
      case Kind::Or:
        return ev(*f.lhs) | ev(*f.rhs);
      case Kind::Implies:
        return (~ev(*f.lhs) | ev(*f.rhs)) & full;
      case Kind::Next:
        return next(ev(*f.lhs));
      case Kind::Until: {
        std::uint64_t a = ev(*f.lhs), b = ev(*f.rhs), x = 0;
        for (;;) {
          std::uint64_t nx = b | (a & next(x));
          if (nx == x) return x;
          x = nx;
        }
      }
      case Kind::Release: {
        std::uint64_t a = ev(*f.lhs), b = ev(*f.rhs), x = full;
        for (;;) {
          std::uint64_t nx = b & (a | next(x));
          if (nx == x) return x;
          x = nx;
        }
      }
      case Kind::Always: {
        std::uint64_t g = ev(*f.lhs), x = full;
        for (;;) {
          std::uint64_t nx = g & next(x);
          if (nx == x) return x;
          x = nx;
        }
      }
      case Kind::Eventually: {
        std::uint64_t g = ev(*f.lhs), x = 0;
        for (;;) {
          std::uint64_t nx = g | next(x);
          if (nx == x) return x;
          x = nx;
        }
      }
    }
    return 0;  // unreachable
  }
};

// Same algorithm over multi-word masks, for words longer than 64 positions.
struct BigEval {
  using Mask = std::vector<std::uint64_t>;
  const EncodedWord& w;
  int len;
  int pre;
  std::size_t words;

  Mask full() const {
    Mask m(words, ~std::uint64_t{0});
    trim(m);
    return m;
  }
  void trim(Mask& m) const {
    int tail = len % 64;
    if (tail) m.back() &= (std::uint64_t{1} << tail) - 1;
  }
  static bool get(const Mask& m, int i) {
    return (m[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1u;
  }
  Mask next(const Mask& m) const {
    Mask r(words, 0);
    for (std::size_t i = 0; i < words; ++i) {
      r[i] = m[i] >> 1;
      if (i + 1 < words) r[i] |= m[i + 1] << 63;
    }
    if (get(m, pre))
      r[static_cast<std::size_t>(len - 1) / 64] |= std::uint64_t{1}
                                                   << ((len - 1) % 64);
    return r;
  }

  Mask ev(const Formula& f) const {
    auto binary = [this, &f](auto&& op) {
      Mask a = ev(*f.lhs), b = ev(*f.rhs);
      for (std::size_t i = 0; i < words; ++i) a[i] = op(a[i], b[i]);
      trim(a);
      return a;
    };
    switch (f.kind) {
      case Kind::True:
        return full();
      case Kind::False:
        return Mask(words, 0);
      case Kind::Atom:
        return w.atom_mask(f.name);
      case Kind::Not: {
        Mask a = ev(*f.lhs);
        for (auto& x : a) x = ~x;
        trim(a);
        return a;
      }
      case Kind::And:
        return binary([](std::uint64_t a, std::uint64_t b) { return a & b; });
      case Kind::Or:
        return binary([](std::uint64_t a, std::uint64_t b) { return a | b; });
      case Kind::Implies:
        return binary([](std::uint64_t a, std::uint64_t b) { return ~a | b; });
      case Kind::Next:
        return next(ev(*f.lhs));
      case Kind::Until: {
        Mask a = ev(*f.lhs), b = ev(*f.rhs), x(words, 0);
        for (;;) {
          Mask nx = next(x);
          for (std::size_t i = 0; i < words; ++i) nx[i] = b[i] | (a[i] & nx[i]);
          if (nx == x) return x;
          x = std::move(nx);
        }
      }
      case Kind::Release: {
        Mask a = ev(*f.lhs), b = ev(*f.rhs), x = full();
        for (;;) {
          Mask nx = next(x);
          for (std::size_t i = 0; i < words; ++i) nx[i] = b[i] & (a[i] | nx[i]);
          if (nx == x) return x;
          x = std::move(nx);
        }
      }
      case Kind::Always: {
        Mask g = ev(*f.lhs), x = full();
        for (;;) {
          Mask nx = next(x);
          for (std::size_t i = 0; i < words; ++i) nx[i] &= g[i];
          if (nx == x) return x;
          x = std::move(nx);
        }
      }
      case Kind::Eventually: {
        Mask g = ev(*f.lhs), x(words, 0);
        for (;;) {
          Mask nx = next(x);
          for (std::size_t i = 0; i < words; ++i) nx[i] |= g[i];
          if (nx == x) return x;
          x = std::move(nx);
        }
      }
    }
    return Mask(words, 0);  // unreachable
  }
};

}  // namespace

bool eval_word(const Formula& f, const EncodedWord& w) {
  int len = w.length();
  if (len <= 64) {
    std::uint64_t full =
        len == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1;
    SmallEval e{w, len, w.prefix_len(), full};
    return e.ev(f) & 1u;
  }
  BigEval e{w, len, w.prefix_len(), (static_cast<std::size_t>(len) + 63) / 64};
  return e.ev(f)[0] & 1u;
}

bool eval_word(const Formula& f, const Word& w) {
  return eval_word(f, EncodedWord(w));
}

bool eval_word(const FormulaPtr& f, const Word& w) {
  return eval_word(*f, w);
}

}  // namespace ltlnav::ltl
