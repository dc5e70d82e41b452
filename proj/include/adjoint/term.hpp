#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adjoint/error.hpp"

namespace adjoint {

/// An action name, possibly seen through a chain of agents' action appearances:
/// viewers {A, B} on base a denotes f'_A(f'_B(a)).
struct ActionRef {
  std::string base;
  std::vector<std::string> viewers;

  ActionRef() = default;
  ActionRef(std::string name) : base(std::move(name)) {}  // NOLINT: plain names convert
  ActionRef(const char* name) : base(name) {}              // NOLINT
  ActionRef(std::string name, std::vector<std::string> seen_by) : base(std::move(name)), viewers(std::move(seen_by)) {}

  bool plain() const { return viewers.empty(); }

  friend bool operator==(const ActionRef&, const ActionRef&) = default;
};

enum class TermKind {
  atom,
  bottom,
  top,
  join,
  meet,
  negation,
  appearance,   // f_A(t)
  information,  // f*_A(t)
  knowledge,    // K_A(t)
  belief,       // B_A(t)
  common_knowledge,
  update,  // h_a(t)
  after,   // h*_a(t)
};

/// Immutable symbolic proposition. Cheap to copy; nodes are shared.
class Term {
 public:
  /// bot.
  Term() : node_(make(TermKind::bottom)) {}

  static Term atom(std::string name) { return Term(make(TermKind::atom, std::move(name))); }
  static Term bottom() { return Term(make(TermKind::bottom)); }
  static Term top() { return Term(make(TermKind::top)); }
  static Term join(Term a, Term b) { return Term(make(TermKind::join, {}, {std::move(a), std::move(b)})); }
  static Term meet(Term a, Term b) { return Term(make(TermKind::meet, {}, {std::move(a), std::move(b)})); }
  static Term negation(Term a) { return Term(make(TermKind::negation, {}, {std::move(a)})); }
  static Term app(std::string agent, Term a) { return Term(make(TermKind::appearance, std::move(agent), {std::move(a)})); }
  static Term info(std::string agent, Term a) {
    return Term(make(TermKind::information, std::move(agent), {std::move(a)}));
  }
  static Term know(std::string agent, Term a) { return Term(make(TermKind::knowledge, std::move(agent), {std::move(a)})); }
  static Term believe(std::string agent, Term a) { return Term(make(TermKind::belief, std::move(agent), {std::move(a)})); }
  /// Common knowledge among `group`; depth 0 means the exact fixpoint, otherwise the
  /// unfolding t /\ E(t) /\ ... /\ E^depth(t).
  static Term ck(std::vector<std::string> group, Term a, unsigned depth = 0) {
    auto n = make(TermKind::common_knowledge, {}, {std::move(a)});
    n->group = std::move(group);
    n->depth = depth;
    return Term(std::move(n));
  }
  static Term upd(ActionRef action, Term a) {
    auto n = make(TermKind::update, {}, {std::move(a)});
    n->action = std::move(action);
    return Term(std::move(n));
  }
  static Term after(ActionRef action, Term a) {
    auto n = make(TermKind::after, {}, {std::move(a)});
    n->action = std::move(action);
    return Term(std::move(n));
  }

  TermKind kind() const noexcept { return node_->kind; }
  bool is(TermKind k) const noexcept { return node_->kind == k; }
  /// Atom name, or the agent of a unary modality.
  const std::string& name() const noexcept { return node_->name; }
  const std::string& agent() const noexcept { return node_->name; }
  const std::vector<std::string>& group() const noexcept { return node_->group; }
  unsigned depth() const noexcept { return node_->depth; }
  const ActionRef& action() const noexcept { return node_->action; }
  std::size_t arity() const noexcept { return node_->args.size(); }
  const Term& arg(std::size_t i = 0) const { return node_->args.at(i); }
  const Term& left() const { return arg(0); }
  const Term& right() const { return arg(1); }

  /// Same head, new arguments.
  Term with_args(std::vector<Term> args) const {
    auto n = std::make_shared<Node>(*node_);
    n->args = std::move(args);
    return Term(std::move(n));
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    return x.kind == y.kind && x.name == y.name && x.group == y.group && x.depth == y.depth && x.action == y.action &&
           x.args == y.args;
  }

 private:
  struct Node {
    TermKind kind = TermKind::atom;
    std::string name;
    std::vector<std::string> group;
    unsigned depth = 0;
    ActionRef action;
    std::vector<Term> args;
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<Node> make(TermKind k, std::string name = {}, std::vector<Term> args = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    n->args = std::move(args);
    return n;
  }

  std::shared_ptr<const Node> node_;
};

/// lhs <= rhs.
struct Sequent {
  Term lhs;
  Term rhs;

  friend bool operator==(const Sequent&, const Sequent&) = default;
};

// ---------------------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(const Term& t) {
  switch (t.kind()) {
    case TermKind::join: return 1;
    case TermKind::meet: return 2;
    case TermKind::negation: return 3;
    default: return 4;
  }
}

struct Notation {
  bool math = false;
};

inline std::string format_action(const ActionRef& a, Notation n) {
  std::string s = a.base;
  for (auto it = a.viewers.rbegin(); it != a.viewers.rend(); ++it)
    s = n.math ? "f'_" + *it + "(" + s + ")" : "f'[" + *it + "](" + s + ")";
  return s;
}

inline std::string join_names(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

inline std::string format(const Term& t, Notation n);

inline std::string wrapped(const Term& t, Notation n, bool parens) {
  return parens ? "(" + format(t, n) + ")" : format(t, n);
}

inline std::string format(const Term& t, Notation n) {
  switch (t.kind()) {
    case TermKind::atom: return t.name();
    case TermKind::bottom: return n.math ? "⊥" : "bot";
    case TermKind::top: return n.math ? "⊤" : "top";
    case TermKind::join:
    case TermKind::meet: {
      const int p = precedence(t);
      const char* op = t.is(TermKind::join) ? (n.math ? " ∨ " : " \\/ ") : (n.math ? " ∧ " : " /\\ ");
      return wrapped(t.left(), n, precedence(t.left()) < p) + op + wrapped(t.right(), n, precedence(t.right()) <= p);
    }
    case TermKind::negation: return (n.math ? "¬" : "~") + wrapped(t.arg(), n, precedence(t.arg()) < 3);
    case TermKind::appearance: return (n.math ? "f_" + t.agent() : "f[" + t.agent() + "]") + "(" + format(t.arg(), n) + ")";
    case TermKind::information:
      return (n.math ? "f*_" + t.agent() : "fi[" + t.agent() + "]") + "(" + format(t.arg(), n) + ")";
    case TermKind::knowledge: return (n.math ? "K_" + t.agent() : "K[" + t.agent() + "]") + "(" + format(t.arg(), n) + ")";
    case TermKind::belief: return (n.math ? "B_" + t.agent() : "B[" + t.agent() + "]") + "(" + format(t.arg(), n) + ")";
    case TermKind::common_knowledge: {
      std::string head;
      if (n.math) {
        head = "CK_{" + join_names(t.group(), ",") + "}";
        if (t.depth()) head += "^" + std::to_string(t.depth());
      } else {
        head = "CK[" + join_names(t.group(), ",") + (t.depth() ? ";" + std::to_string(t.depth()) : "") + "]";
      }
      return head + "(" + format(t.arg(), n) + ")";
    }
    case TermKind::update:
      return (n.math ? "h_" + format_action(t.action(), n) : "upd[" + format_action(t.action(), n) + "]") + "(" +
             format(t.arg(), n) + ")";
    case TermKind::after:
      return (n.math ? "h*_" + format_action(t.action(), n) : "after[" + format_action(t.action(), n) + "]") + "(" +
             format(t.arg(), n) + ")";
  }
  return {};
}

}  // namespace detail

/// Scenario syntax; re-parses to an equal term.
inline std::string to_string(const Term& t) { return detail::format(t, {false}); }
inline std::string to_string(const ActionRef& a) { return detail::format_action(a, {false}); }
inline std::string to_string(const Sequent& s) { return to_string(s.lhs) + " |= " + to_string(s.rhs); }

/// Mathematical notation, for rendered proofs.
inline std::string to_math(const Term& t) { return detail::format(t, {true}); }
inline std::string to_math(const ActionRef& a) { return detail::format_action(a, {true}); }
inline std::string to_math(const Sequent& s) { return to_math(s.lhs) + " ≤ " + to_math(s.rhs); }

// ---------------------------------------------------------------------------------------
// Lexing and parsing

enum class TokenKind { ident, number, string, symbol, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  SourceLoc loc;
};

/// Splits one source line into tokens. Identifiers may carry '-' (unless it starts "->") and
/// trailing primes; '#' starts a comment.
inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no = 1) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto loc = [&](std::size_t col) { return SourceLoc{line_no, col + 1}; };
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      ++i;
      while (i < line.size()) {
        const char d = line[i];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' ||
            (d == '-' && !(i + 1 < line.size() && line[i + 1] == '>'))) {
          ++i;
        } else {
          break;
        }
      }
      while (i < line.size() && line[i] == '\'') ++i;
      out.push_back({TokenKind::ident, std::string(line.substr(start, i - start)), loc(start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      out.push_back({TokenKind::number, std::string(line.substr(start, i - start)), loc(start)});
      continue;
    }
    if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          text += line[i + 1];
          i += 2;
          continue;
        }
        if (line[i] == '"') {
          closed = true;
          ++i;
          break;
        }
        text += line[i++];
      }
      if (!closed) throw ParseError(loc(start), "unterminated string", "'\"'");
      out.push_back({TokenKind::string, std::move(text), loc(start)});
      continue;
    }
    static constexpr std::string_view two[] = {"\\/", "/\\", "|=", "->"};
    bool matched = false;
    for (auto sym : two) {
      if (line.substr(i, 2) == sym) {
        out.push_back({TokenKind::symbol, std::string(sym), loc(start)});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one = "~()[],;<=";
    if (one.find(c) != std::string_view::npos) {
      out.push_back({TokenKind::symbol, std::string(1, c), loc(start)});
      ++i;
      continue;
    }
    throw ParseError(loc(start), std::string("unexpected character '") + c + "'");
  }
  out.push_back({TokenKind::end, "", loc(line.size())});
  return out;
}

/// Cursor over one line's tokens.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::end; }
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::symbol && peek(ahead).text == s;
  }
  bool is_ident(std::string_view s) const { return peek().kind == TokenKind::ident && peek().text == s; }

  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    next();
    return true;
  }

  const Token& expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail("'" + std::string(s) + "'");
    return next();
  }

  const Token& expect_ident(const std::string& what = "a name") {
    if (peek().kind != TokenKind::ident) fail(what);
    return next();
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string found = t.kind == TokenKind::end ? "end of line" : "'" + t.text + "'";
    throw ParseError(t.loc, "unexpected " + found, expected);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

/// Recursive-descent parser for the term syntax:
///   term  := meet ('\/' meet)*        meet := unary ('/\' unary)*
///   unary := '~' unary | primary
///   primary := 'bot' | 'top' | name | '(' term ')' | op '[' ... ']' '(' term ')'
/// with op one of f, fi, K, B, CK, upd, after.
class TermParser {
 public:
  explicit TermParser(TokenStream& ts) : ts_(ts) {}

  Term parse() {
    Term t = parse_meet();
    while (ts_.accept_symbol("\\/")) t = Term::join(t, parse_meet());
    return t;
  }

  ActionRef parse_action() {
    if (ts_.is_ident("f'") && ts_.is_symbol("[", 1)) {
      ts_.next();
      ts_.expect_symbol("[");
      std::string agent = ts_.expect_ident("an agent name").text;
      ts_.expect_symbol("]");
      ts_.expect_symbol("(");
      ActionRef inner = parse_action();
      ts_.expect_symbol(")");
      inner.viewers.insert(inner.viewers.begin(), std::move(agent));
      return inner;
    }
    return ActionRef(ts_.expect_ident("an action name").text);
  }

 private:
  Term parse_meet() {
    Term t = parse_unary();
    while (ts_.accept_symbol("/\\")) t = Term::meet(t, parse_unary());
    return t;
  }

  Term parse_unary() {
    if (ts_.accept_symbol("~")) return Term::negation(parse_unary());
    return parse_primary();
  }

  Term parse_argument() {
    ts_.expect_symbol("(");
    Term t = parse();
    ts_.expect_symbol(")");
    return t;
  }

  Term parse_primary() {
    if (ts_.accept_symbol("(")) {
      Term t = parse();
      ts_.expect_symbol(")");
      return t;
    }
    if (ts_.peek().kind != TokenKind::ident) ts_.fail("a term");
    const std::string head = ts_.peek().text;
    if (head == "bot") {
      ts_.next();
      return Term::bottom();
    }
    if (head == "top") {
      ts_.next();
      return Term::top();
    }
    if (!ts_.is_symbol("[", 1)) return Term::atom(ts_.next().text);

    ts_.next();
    ts_.expect_symbol("[");
    if (head == "upd" || head == "after") {
      ActionRef a = parse_action();
      ts_.expect_symbol("]");
      Term arg = parse_argument();
      return head == "upd" ? Term::upd(std::move(a), arg) : Term::after(std::move(a), arg);
    }
    if (head == "CK") {
      std::vector<std::string> group{ts_.expect_ident("an agent name").text};
      while (ts_.accept_symbol(",")) group.push_back(ts_.expect_ident("an agent name").text);
      unsigned depth = 0;
      if (ts_.accept_symbol(";")) {
        if (ts_.peek().kind != TokenKind::number) ts_.fail("an unfolding depth");
        depth = static_cast<unsigned>(std::stoul(ts_.next().text));
      }
      ts_.expect_symbol("]");
      return Term::ck(std::move(group), parse_argument(), depth);
    }
    std::string agent = ts_.expect_ident("an agent name").text;
    ts_.expect_symbol("]");
    Term arg = parse_argument();
    if (head == "f") return Term::app(std::move(agent), arg);
    if (head == "fi") return Term::info(std::move(agent), arg);
    if (head == "K") return Term::know(std::move(agent), arg);
    if (head == "B") return Term::believe(std::move(agent), arg);
    throw ParseError(ts_.peek().loc, "unknown operator '" + head + "'", "one of f, fi, K, B, CK, upd, after");
  }

  TokenStream& ts_;
};

inline Term parse_term(std::string_view text) {
  TokenStream ts(tokenize(text));
  Term t = TermParser(ts).parse();
  if (!ts.at_end()) ts.fail("end of term");
  return t;
}

/// "lhs |= rhs".
inline Sequent parse_sequent(std::string_view text) {
  TokenStream ts(tokenize(text));
  Term lhs = TermParser(ts).parse();
  ts.expect_symbol("|=");
  Term rhs = TermParser(ts).parse();
  if (!ts.at_end()) ts.fail("end of sequent");
  return {lhs, rhs};
}

}  // namespace adjoint
