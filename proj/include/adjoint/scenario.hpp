#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "adjoint/derivation.hpp"
#include "adjoint/dynamics.hpp"
#include "adjoint/epistemic.hpp"
#include "adjoint/error.hpp"
#include "adjoint/lattice.hpp"
#include "adjoint/semantics.hpp"
#include "adjoint/term.hpp"

namespace adjoint {

struct WorldsCarrier {
  std::vector<std::string> worlds;
  friend bool operator==(const WorldsCarrier&, const WorldsCarrier&) = default;
};

struct PosetCarrier {
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> order;  // (a, b): a < b
  friend bool operator==(const PosetCarrier&, const PosetCarrier&) = default;
};

using Carrier = std::variant<WorldsCarrier, PosetCarrier>;

/// Where each name in a statement first occurs. Diagnostics only; always compares equal.
struct NameLocs {
  std::map<std::string, SourceLoc> first;

  SourceLoc find(const std::string& name, SourceLoc fallback) const {
    auto it = first.find(name);
    return it == first.end() ? fallback : it->second;
  }
  friend bool operator==(const NameLocs&, const NameLocs&) { return true; }
};

struct AtomDecl {
  std::string name;
  std::optional<std::vector<std::string>> denotes;  // carrier elements, joined
  SourceLoc loc;
  friend bool operator==(const AtomDecl&, const AtomDecl&) = default;
};

/// `source -> targets`: a generator and the join of its image.
struct Assignment {
  std::string source;
  std::vector<std::string> targets;
  SourceLoc loc;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AppearanceDef {
  std::string atom;
  Term definition;
  SourceLoc loc;
  NameLocs refs;
  friend bool operator==(const AppearanceDef&, const AppearanceDef&) = default;
};

struct ActionAppearanceDecl {
  std::string action;
  std::string seen;
  SourceLoc loc;
  friend bool operator==(const ActionAppearanceDecl&, const ActionAppearanceDecl&) = default;
};

struct AgentDecl {
  std::string name;
  std::vector<Assignment> sees;
  std::vector<AppearanceDef> appears;
  std::vector<ActionAppearanceDecl> actions;
  SourceLoc loc;
  friend bool operator==(const AgentDecl&, const AgentDecl&) = default;
};

struct ActionDecl {
  std::string name;
  bool communication = false;
  std::vector<Assignment> updates;
  std::optional<std::vector<std::string>> kernel;
  SourceLoc loc;
  friend bool operator==(const ActionDecl&, const ActionDecl&) = default;
};

enum class QueryKind { entails, prove, evaluate, validate };

inline std::string to_string(QueryKind k) {
  switch (k) {
    case QueryKind::entails: return "entails";
    case QueryKind::prove: return "prove";
    case QueryKind::evaluate: return "evaluate";
    case QueryKind::validate: return "validate";
  }
  return "?";
}

struct Query {
  std::string id;
  QueryKind kind = QueryKind::validate;
  std::optional<Sequent> sequent;  // entails, prove
  std::optional<Term> term;        // evaluate
  std::optional<unsigned> depth;   // prove
  bool expect_holds = true;        // entails, prove
  SourceLoc loc;
  NameLocs refs;
  friend bool operator==(const Query&, const Query&) = default;
};

enum class Mode { semantic, symbolic, both };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::semantic: return "semantic";
    case Mode::symbolic: return "symbolic";
    case Mode::both: return "both";
  }
  return "?";
}

inline bool has_semantics(Mode m) { return m != Mode::symbolic; }
inline bool has_symbolics(Mode m) { return m != Mode::semantic; }

struct ScenarioDoc {
  unsigned version = 1;
  std::string name;
  std::string description;
  Mode mode = Mode::both;
  std::optional<Carrier> carrier;
  std::vector<AtomDecl> atoms;
  std::vector<AgentDecl> agents;
  std::vector<ActionDecl> actions;
  std::vector<std::string> facts;
  std::vector<Query> queries;

  const Query* find_query(const std::string& id) const {
    for (const auto& q : queries)
      if (q.id == id) return &q;
    return nullptr;
  }

  friend bool operator==(const ScenarioDoc&, const ScenarioDoc&) = default;
};

inline std::vector<std::string> carrier_names(const Carrier& c) {
  if (auto w = std::get_if<WorldsCarrier>(&c)) return w->worlds;
  return std::get<PosetCarrier>(c).elements;
}

// ---------------------------------------------------------------------------------------
// Parsing

namespace detail {

inline bool reserved_name(const std::string& s) { return s == "bot" || s == "top"; }

class ScenarioParser {
 public:
  explicit ScenarioParser(std::string_view text) : text_(text) {}

  ScenarioDoc parse() {
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool saw_version = false;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      TokenStream ts(tokenize(text_.substr(start, end - start), line_no));
      last_loc_ = {line_no, 1};
      if (!ts.at_end()) {
        if (!saw_version) {
          parse_version(ts);
          saw_version = true;
        } else {
          statement(ts);
        }
      }
      start = end + 1;
    }
    if (!saw_version) throw ParseError({line_no, 1}, "missing header", "'version 1'");
    if (block_ != Block::none) throw ParseError(last_loc_, "unterminated block opened on line " +
                                                               std::to_string(block_loc_.line),
                                                "'end'");
    if (doc_.name.empty()) throw ParseError(last_loc_, "missing scenario name", "'scenario <name>'");
    return std::move(doc_);
  }

 private:
  enum class Block { none, poset, agent, action };

  void parse_version(TokenStream& ts) {
    if (!ts.is_ident("version")) ts.fail("'version 1'");
    ts.next();
    if (ts.peek().kind != TokenKind::number) ts.fail("a version number");
    const Token& v = ts.next();
    if (v.text != "1") throw ParseError(v.loc, "unsupported version " + v.text, "1");
    doc_.version = 1;
    end_of_line(ts);
  }

  static void end_of_line(TokenStream& ts) {
    if (!ts.at_end()) ts.fail("end of line");
  }

  std::string name(TokenStream& ts, const std::string& what) {
    const Token& t = ts.expect_ident(what);
    if (reserved_name(t.text)) throw ParseError(t.loc, "'" + t.text + "' is reserved", what);
    return t.text;
  }

  std::vector<std::string> names(TokenStream& ts, const std::string& what) {
    std::vector<std::string> out;
    while (!ts.at_end()) out.push_back(name(ts, what));
    return out;
  }

  static NameLocs collect_refs(const TokenStream& ts) {
    NameLocs refs;
    for (std::size_t i = 0; ts.peek(i).kind != TokenKind::end; ++i)
      if (ts.peek(i).kind == TokenKind::ident) refs.first.emplace(ts.peek(i).text, ts.peek(i).loc);
    return refs;
  }

  Assignment assignment(TokenStream& ts, SourceLoc loc) {
    Assignment a;
    a.loc = loc;
    a.source = name(ts, "a generator");
    ts.expect_symbol("->");
    a.targets = names(ts, "an element name");
    return a;
  }

  void open(Block b, SourceLoc loc) {
    block_ = b;
    block_loc_ = loc;
  }

  void statement(TokenStream& ts) {
    const Token head = ts.peek();
    if (head.kind != TokenKind::ident) ts.fail("a statement keyword");
    switch (block_) {
      case Block::none: return top_level(ts, head);
      case Block::poset: return poset_line(ts, head);
      case Block::agent: return agent_line(ts, head);
      case Block::action: return action_line(ts, head);
    }
  }

  void top_level(TokenStream& ts, const Token& head) {
    const std::string& kw = head.text;
    ts.next();
    if (kw == "scenario") {
      doc_.name = ts.expect_ident("a scenario name").text;
    } else if (kw == "description") {
      if (ts.peek().kind != TokenKind::string) ts.fail("a quoted description");
      doc_.description = ts.next().text;
    } else if (kw == "mode") {
      const Token& m = ts.expect_ident("semantic, symbolic or both");
      if (m.text == "semantic") doc_.mode = Mode::semantic;
      else if (m.text == "symbolic") doc_.mode = Mode::symbolic;
      else if (m.text == "both") doc_.mode = Mode::both;
      else throw ParseError(m.loc, "unknown mode '" + m.text + "'", "semantic, symbolic or both");
    } else if (kw == "worlds") {
      set_carrier(head.loc, WorldsCarrier{names(ts, "a world name")});
    } else if (kw == "poset") {
      set_carrier(head.loc, PosetCarrier{});
      open(Block::poset, head.loc);
    } else if (kw == "atom") {
      AtomDecl a;
      a.loc = head.loc;
      a.name = name(ts, "an atom name");
      if (ts.accept_symbol("=")) a.denotes = names(ts, "an element name");
      doc_.atoms.push_back(std::move(a));
    } else if (kw == "agent") {
      AgentDecl a;
      a.loc = head.loc;
      a.name = name(ts, "an agent name");
      doc_.agents.push_back(std::move(a));
      open(Block::agent, head.loc);
    } else if (kw == "action") {
      ActionDecl a;
      a.loc = head.loc;
      a.name = name(ts, "an action name");
      if (ts.is_ident("communication")) {
        ts.next();
        a.communication = true;
      }
      doc_.actions.push_back(std::move(a));
      open(Block::action, head.loc);
    } else if (kw == "facts") {
      for (auto& f : names(ts, "an atom name")) doc_.facts.push_back(std::move(f));
    } else if (kw == "query") {
      query(ts, head.loc);
    } else if (kw == "version") {
      throw ParseError(head.loc, "repeated version header");
    } else {
      throw ParseError(head.loc, "unknown statement '" + kw + "'",
                       "one of scenario, description, mode, worlds, poset, atom, agent, action, facts, query");
    }
    end_of_line(ts);
  }

  void set_carrier(SourceLoc loc, Carrier c) {
    if (doc_.carrier) throw ParseError(loc, "second carrier declaration; only one of worlds or poset is allowed");
    doc_.carrier = std::move(c);
  }

  void poset_line(TokenStream& ts, const Token& head) {
    auto& p = std::get<PosetCarrier>(*doc_.carrier);
    ts.next();
    if (head.text == "end") {
      block_ = Block::none;
    } else if (head.text == "elements") {
      for (auto& e : names(ts, "an element name")) p.elements.push_back(std::move(e));
    } else if (head.text == "order") {
      do {
        std::string a = name(ts, "an element name");
        ts.expect_symbol("<");
        std::string b = name(ts, "an element name");
        p.order.emplace_back(std::move(a), std::move(b));
      } while (ts.accept_symbol(","));
    } else {
      throw ParseError(head.loc, "unknown poset statement '" + head.text + "'", "one of elements, order, end");
    }
    end_of_line(ts);
  }

  void agent_line(TokenStream& ts, const Token& head) {
    AgentDecl& a = doc_.agents.back();
    ts.next();
    if (head.text == "end") {
      block_ = Block::none;
    } else if (head.text == "sees") {
      a.sees.push_back(assignment(ts, head.loc));
    } else if (head.text == "appears") {
      AppearanceDef d;
      d.loc = head.loc;
      d.refs = collect_refs(ts);
      d.atom = name(ts, "an atom name");
      ts.expect_symbol("=");
      d.definition = TermParser(ts).parse();
      a.appears.push_back(std::move(d));
    } else if (head.text == "action") {
      ActionAppearanceDecl d;
      d.loc = head.loc;
      d.action = name(ts, "an action name");
      ts.expect_symbol("->");
      d.seen = name(ts, "an action name");
      a.actions.push_back(std::move(d));
    } else {
      throw ParseError(head.loc, "unknown agent statement '" + head.text + "'", "one of sees, appears, action, end");
    }
    end_of_line(ts);
  }

  void action_line(TokenStream& ts, const Token& head) {
    ActionDecl& a = doc_.actions.back();
    ts.next();
    if (head.text == "end") {
      block_ = Block::none;
    } else if (head.text == "update") {
      a.updates.push_back(assignment(ts, head.loc));
    } else if (head.text == "kernel") {
      if (!a.kernel) a.kernel.emplace();
      for (auto& k : names(ts, "an atom name")) a.kernel->push_back(std::move(k));
    } else {
      throw ParseError(head.loc, "unknown action statement '" + head.text + "'", "one of update, kernel, end");
    }
    end_of_line(ts);
  }

  void query(TokenStream& ts, SourceLoc loc) {
    Query q;
    q.loc = loc;
    q.id = ts.expect_ident("a query id").text;
    q.refs = collect_refs(ts);
    const Token& kind = ts.expect_ident("entails, prove, evaluate or validate");
    auto sequent = [&] {
      Term lhs = TermParser(ts).parse();
      ts.expect_symbol("|=");
      Term rhs = TermParser(ts).parse();
      return Sequent{lhs, rhs};
    };
    if (kind.text == "entails") {
      q.kind = QueryKind::entails;
      q.sequent = sequent();
    } else if (kind.text == "prove") {
      q.kind = QueryKind::prove;
      q.sequent = sequent();
      if (ts.is_ident("depth")) {
        ts.next();
        if (ts.peek().kind != TokenKind::number) ts.fail("a depth bound");
        const Token& d = ts.next();
        q.depth = static_cast<unsigned>(std::stoul(d.text));
        if (*q.depth == 0) throw ParseError(d.loc, "depth must be at least 1");
      }
    } else if (kind.text == "evaluate") {
      q.kind = QueryKind::evaluate;
      q.term = TermParser(ts).parse();
    } else if (kind.text == "validate") {
      q.kind = QueryKind::validate;
    } else {
      throw ParseError(kind.loc, "unknown query kind '" + kind.text + "'", "entails, prove, evaluate or validate");
    }
    if ((q.kind == QueryKind::entails || q.kind == QueryKind::prove) && ts.is_ident("expect")) {
      ts.next();
      const Token& e = ts.expect_ident("holds or fails");
      if (e.text == "holds") q.expect_holds = true;
      else if (e.text == "fails") q.expect_holds = false;
      else throw ParseError(e.loc, "unknown expectation '" + e.text + "'", "holds or fails");
    }
    doc_.queries.push_back(std::move(q));
  }

  std::string_view text_;
  ScenarioDoc doc_;
  Block block_ = Block::none;
  SourceLoc block_loc_;
  SourceLoc last_loc_;
};

/// Cross-reference checks over a parsed document.
class Resolver {
 public:
  explicit Resolver(const ScenarioDoc& d) : doc_(d) {}

  void run() {
    if (has_semantics(doc_.mode) && !doc_.carrier)
      throw ParseError({1, 1}, "mode " + to_string(doc_.mode) + " needs a carrier", "a worlds or poset declaration");
    if (doc_.carrier) {
      for (const auto& e : carrier_names(*doc_.carrier)) {
        if (!elements_.insert(e).second) throw Error(Errc::duplicate_label, "carrier element '" + e + "' repeated");
      }
      if (auto p = std::get_if<PosetCarrier>(&*doc_.carrier)) {
        for (const auto& [a, b] : p->order) {
          element(a, {});
          element(b, {});
        }
      }
    }
    for (const auto& a : doc_.atoms) {
      if (!atoms_.insert(a.name).second) fail(a.loc, Errc::duplicate_label, "atom '" + a.name + "' repeated");
      if (elements_.count(a.name))
        fail(a.loc, Errc::duplicate_label, "atom '" + a.name + "' clashes with a carrier element");
      if (a.denotes) {
        if (!doc_.carrier) fail(a.loc, Errc::resolution_error, "atom '" + a.name + "' denotes elements of no carrier");
        for (const auto& e : *a.denotes) element(e, a.loc);
      } else if (has_semantics(doc_.mode)) {
        fail(a.loc, Errc::resolution_error, "atom '" + a.name + "' has no denotation in the model");
      }
    }
    for (const auto& a : doc_.agents)
      if (!agents_.insert(a.name).second) fail(a.loc, Errc::duplicate_label, "agent '" + a.name + "' repeated");
    for (const auto& a : doc_.actions)
      if (!actions_.insert(a.name).second)
        fail(a.loc, Errc::duplicate_label, "action '" + a.name + "' repeated");

    for (const auto& a : doc_.agents) {
      for (const auto& s : a.sees) assignment(s);
      std::set<std::string> defined;
      for (const auto& d : a.appears) {
        atom(d.atom, d.refs.find(d.atom, d.loc));
        if (!defined.insert(d.atom).second)
          fail(d.loc, Errc::duplicate_label, "f_" + a.name + "(" + d.atom + ") defined twice");
        term(d.definition, d.refs, d.loc, false);
      }
      std::set<std::string> seen;
      for (const auto& d : a.actions) {
        action(d.action, d.loc);
        action(d.seen, d.loc);
        if (!seen.insert(d.action).second)
          fail(d.loc, Errc::duplicate_label, "f'_" + a.name + "(" + d.action + ") defined twice");
      }
    }
    for (const auto& a : doc_.actions) {
      for (const auto& u : a.updates) assignment(u);
      if (a.kernel)
        for (const auto& k : *a.kernel) atom_or_element(k, a.loc);
    }
    for (const auto& f : doc_.facts) atom_or_element(f, {});

    std::set<std::string> ids;
    for (const auto& q : doc_.queries) {
      if (!ids.insert(q.id).second) fail(q.loc, Errc::duplicate_label, "query id '" + q.id + "' repeated");
      const bool semantic = q.kind == QueryKind::entails || q.kind == QueryKind::evaluate;
      if (semantic && !has_semantics(doc_.mode))
        fail(q.loc, Errc::resolution_error, to_string(q.kind) + " query '" + q.id + "' needs a semantic model");
      if (q.kind == QueryKind::prove && !has_symbolics(doc_.mode))
        fail(q.loc, Errc::resolution_error, "prove query '" + q.id + "' needs symbolic assumptions");
      if (q.sequent) {
        term(q.sequent->lhs, q.refs, q.loc, has_semantics(doc_.mode));
        term(q.sequent->rhs, q.refs, q.loc, has_semantics(doc_.mode));
      }
      if (q.term) term(*q.term, q.refs, q.loc, true);
    }
  }

 private:
  [[noreturn]] static void fail(SourceLoc loc, Errc code, const std::string& msg) {
    if (code == Errc::resolution_error || code == Errc::parse_error) throw ParseError(loc, msg);
    throw Error(code, "line " + std::to_string(loc.line) + ": " + msg);
  }

  void element(const std::string& e, SourceLoc loc) const {
    if (!elements_.count(e)) throw ResolutionError(loc, e, "carrier element");
  }
  void atom(const std::string& a, SourceLoc loc) const {
    if (!atoms_.count(a)) throw ResolutionError(loc, a, "atom");
  }
  void atom_or_element(const std::string& a, SourceLoc loc) const {
    if (!atoms_.count(a) && !elements_.count(a)) throw ResolutionError(loc, a, "atom");
  }
  void agent(const std::string& a, SourceLoc loc) const {
    if (!agents_.count(a)) throw ResolutionError(loc, a, "agent");
  }
  void action(const std::string& a, SourceLoc loc) const {
    if (!actions_.count(a)) throw ResolutionError(loc, a, "action");
  }
  void assignment(const Assignment& s) const {
    element(s.source, s.loc);
    for (const auto& t : s.targets) element(t, s.loc);
  }

  void term(const Term& t, const NameLocs& refs, SourceLoc loc, bool elements_ok) const {
    auto at = [&](const std::string& n) { return refs.find(n, loc); };
    switch (t.kind()) {
      case TermKind::atom:
        if (!atoms_.count(t.name()) && !(elements_ok && elements_.count(t.name())))
          throw ResolutionError(at(t.name()), t.name(), "atom");
        break;
      case TermKind::appearance:
      case TermKind::information:
      case TermKind::knowledge:
      case TermKind::belief: agent(t.agent(), at(t.agent())); break;
      case TermKind::common_knowledge:
        for (const auto& a : t.group()) agent(a, at(a));
        break;
      case TermKind::update:
      case TermKind::after:
        action(t.action().base, at(t.action().base));
        for (const auto& v : t.action().viewers) agent(v, at(v));
        break;
      default: break;
    }
    for (std::size_t i = 0; i < t.arity(); ++i) term(t.arg(i), refs, loc, elements_ok);
  }

  const ScenarioDoc& doc_;
  std::set<std::string> elements_, atoms_, agents_, actions_;
};

}  // namespace detail

/// Parses and resolves a scenario. Throws ParseError or ResolutionError with a location.
inline ScenarioDoc parse_scenario(std::string_view text) {
  ScenarioDoc doc = detail::ScenarioParser(text).parse();
  detail::Resolver(doc).run();
  return doc;
}

// ---------------------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string spaced(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += " " + x;
  return s;
}

}  // namespace detail

/// Canonical text; parse_scenario(serialize(d)) == d.
inline std::string serialize(const ScenarioDoc& doc) {
  using detail::spaced;
  std::string out = "version " + std::to_string(doc.version) + "\n";
  out += "scenario " + doc.name + "\n";
  if (!doc.description.empty()) out += "description " + detail::quoted(doc.description) + "\n";
  out += "mode " + to_string(doc.mode) + "\n";
  if (doc.carrier) {
    out += "\n";
    if (auto w = std::get_if<WorldsCarrier>(&*doc.carrier)) {
      out += "worlds" + spaced(w->worlds) + "\n";
    } else {
      const auto& p = std::get<PosetCarrier>(*doc.carrier);
      out += "poset\n  elements" + spaced(p.elements) + "\n";
      if (!p.order.empty()) {
        out += "  order";
        for (std::size_t i = 0; i < p.order.size(); ++i)
          out += (i ? ", " : " ") + p.order[i].first + " < " + p.order[i].second;
        out += "\n";
      }
      out += "end\n";
    }
  }
  if (!doc.atoms.empty()) out += "\n";
  for (const auto& a : doc.atoms) {
    out += "atom " + a.name;
    if (a.denotes) out += " =" + spaced(*a.denotes);
    out += "\n";
  }
  for (const auto& a : doc.agents) {
    out += "\nagent " + a.name + "\n";
    for (const auto& s : a.sees) out += "  sees " + s.source + " ->" + spaced(s.targets) + "\n";
    for (const auto& d : a.appears) out += "  appears " + d.atom + " = " + to_string(d.definition) + "\n";
    for (const auto& d : a.actions) out += "  action " + d.action + " -> " + d.seen + "\n";
    out += "end\n";
  }
  for (const auto& a : doc.actions) {
    out += "\naction " + a.name + (a.communication ? " communication" : "") + "\n";
    for (const auto& u : a.updates) out += "  update " + u.source + " ->" + spaced(u.targets) + "\n";
    if (a.kernel) out += "  kernel" + spaced(*a.kernel) + "\n";
    out += "end\n";
  }
  if (!doc.facts.empty()) out += "\nfacts" + spaced(doc.facts) + "\n";
  if (!doc.queries.empty()) out += "\n";
  for (const auto& q : doc.queries) {
    out += "query " + q.id + " " + to_string(q.kind);
    if (q.sequent) out += " " + to_string(*q.sequent);
    if (q.term) out += " " + to_string(*q.term);
    if (q.depth) out += " depth " + std::to_string(*q.depth);
    if (q.sequent && !q.expect_holds) out += " expect fails";
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Instantiation

struct InstantiateOptions {
  LatticeLimits limits = LatticeLimits::from_environment();
  DynamicOptions dynamic;
};

/// What a document denotes: a validated algebra with its atom bindings, the symbolic
/// assumptions, or both (in which case proofs are cross-checked against the model).
struct Instance {
  std::shared_ptr<const DynamicAlgebra> algebra;
  std::map<std::string, Element> atoms;  // atoms and carrier element names
  std::optional<Assumptions> assumptions;
  std::vector<Query> queries;
  bool cross_check = false;
  /// Appearance definitions the model satisfies only up to inequality, or not at all.
  std::vector<std::string> unrealized;

  std::optional<Model> model() const {
    if (!algebra) return std::nullopt;
    return Model{algebra.get(), atoms};
  }
};

namespace detail {

inline std::string error_detail(const Error& e) {
  std::string what = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

/// Re-raises a library error with the statement's line in front.
template <class F>
auto at_line(SourceLoc loc, const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const AxiomViolation&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), "line " + std::to_string(loc.line) + " (" + what + "): " + error_detail(e));
  }
}

inline Assumptions build_assumptions(const ScenarioDoc& doc) {
  Assumptions as;
  for (const auto& a : doc.agents) {
    for (const auto& d : a.appears) as.define_appearance(a.name, d.atom, d.definition);
    for (const auto& d : a.actions) as.define_action_appearance(a.name, d.action, d.seen);
  }
  for (const auto& a : doc.actions) {
    if (a.kernel) as.kernel[a.name].insert(a.kernel->begin(), a.kernel->end());
    if (a.communication) as.communication.insert(a.name);
  }
  as.facts.insert(doc.facts.begin(), doc.facts.end());
  return as;
}

}  // namespace detail

inline Instance instantiate(const ScenarioDoc& doc, const InstantiateOptions& options = {}) {
  Instance inst;
  inst.queries = doc.queries;
  if (has_symbolics(doc.mode)) inst.assumptions = detail::build_assumptions(doc);
  if (!has_semantics(doc.mode)) return inst;

  using detail::at_line;
  const Carrier& carrier = *doc.carrier;
  LatticePtr lat;
  std::map<std::string, Element> elems;
  if (auto w = std::get_if<WorldsCarrier>(&carrier)) {
    lat = at_line({1, 1}, "worlds", [&] { return powerset_lattice(w->worlds, options.limits); });
    for (std::size_t i = 0; i < w->worlds.size(); ++i) elems[w->worlds[i]] = Element{std::uint32_t{1} << i};
  } else {
    const auto& p = std::get<PosetCarrier>(carrier);
    lat = at_line({1, 1}, "poset", [&] { return build_from_order(p.elements, p.order, options.limits); });
    for (const auto& e : p.elements) elems[e] = *lat->find(e);
  }
  auto join_of = [&](const std::vector<std::string>& names) {
    std::vector<Element> es;
    for (const auto& n : names) es.push_back(elems.at(n));
    return lat->join(es);
  };
  inst.atoms = elems;
  for (const auto& a : doc.atoms) inst.atoms[a.name] = join_of(*a.denotes);
  auto generators = [&](const std::vector<Assignment>& v) {
    Generators g;
    for (const auto& s : v) g.emplace_back(elems.at(s.source), join_of(s.targets));
    return g;
  };

  std::vector<std::pair<std::string, LatticeMap>> maps;
  for (const auto& a : doc.agents)
    maps.emplace_back(a.name, at_line(a.loc, "agent " + a.name, [&] { return map_from_generators(lat, generators(a.sees)); }));
  Mama mama = at_line({1, 1}, "agents", [&] { return Mama(lat, maps); });

  std::vector<ActionSpec> specs;
  for (const auto& a : doc.actions) {
    ActionSpec s{{a.name, a.communication},
                 at_line(a.loc, "action " + a.name, [&] { return map_from_generators(lat, generators(a.updates)); }),
                 std::nullopt};
    if (a.kernel) {
      s.declared_kernel.emplace();
      for (const auto& k : *a.kernel) s.declared_kernel->push_back(inst.atoms.at(k));
    }
    specs.push_back(std::move(s));
  }
  ActionAppearance app;
  for (const auto& a : doc.agents) {
    auto& row = app[a.name];
    for (const auto& d : a.actions) row[d.action] = d.seen;
  }
  std::vector<Element> facts;
  for (const auto& f : doc.facts) facts.push_back(inst.atoms.at(f));

  SourceLoc build_loc = doc.actions.empty() ? SourceLoc{1, 1} : doc.actions.front().loc;
  auto alg = at_line(build_loc, "dynamic algebra", [&] {
    return DynamicAlgebra::build(std::move(mama), std::move(specs), std::move(app), std::move(facts), options.dynamic);
  });
  inst.algebra = std::make_shared<const DynamicAlgebra>(std::move(alg));

  if (inst.assumptions) {
    inst.cross_check = true;
    const Model m = *inst.model();
    for (const auto& a : doc.agents) {
      for (const auto& d : a.appears) {
        const Element actual = evaluate(Term::app(a.name, Term::atom(d.atom)), m);
        const Element claimed = evaluate(d.definition, m);
        if (actual != claimed)
          inst.unrealized.push_back("f_" + a.name + "(" + d.atom + ") = " + to_string(d.definition) + " (the model gives " +
                                    lat->name(actual) + ", not " + lat->name(claimed) + ")");
      }
    }
  }
  return inst;
}

}  // namespace adjoint
