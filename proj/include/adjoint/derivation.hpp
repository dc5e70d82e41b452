#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "adjoint/error.hpp"
#include "adjoint/term.hpp"

namespace adjoint {

/// Symbolic hypotheses a proof may cite.
struct Assumptions {
  std::map<std::pair<std::string, std::string>, Term> appearance;                // (A, atom) -> f_A(atom)
  std::map<std::pair<std::string, std::string>, std::string> action_appearance;  // (A, a) -> f'_A(a)
  std::map<std::string, std::set<std::string>> kernel;                           // a -> atoms in ker(a)
  std::set<std::string> facts;
  std::set<std::string> communication;

  void define_appearance(const std::string& agent, const std::string& atom, Term def) {
    if (!appearance.emplace(std::make_pair(agent, atom), std::move(def)).second)
      throw Error(Errc::duplicate_label, "f_" + agent + "(" + atom + ") defined twice");
  }
  void define_action_appearance(const std::string& agent, const std::string& action, std::string seen) {
    if (!action_appearance.emplace(std::make_pair(agent, action), std::move(seen)).second)
      throw Error(Errc::duplicate_label, "f'_" + agent + "(" + action + ") defined twice");
  }

  const Term* appearance_of(const std::string& agent, const std::string& atom) const {
    auto it = appearance.find({agent, atom});
    return it == appearance.end() ? nullptr : &it->second;
  }
  const std::string* action_seen_by(const std::string& agent, const std::string& action) const {
    auto it = action_appearance.find({agent, action});
    return it == action_appearance.end() ? nullptr : &it->second;
  }
  bool in_kernel(const std::string& action, const std::string& atom) const {
    auto it = kernel.find(action);
    return it != kernel.end() && it->second.count(atom) != 0;
  }
};

enum class Rule {
  order_axiom,
  kernel_discharge,
  fact_discharge,
  app_subst,
  act_app_subst,
  def_expand,
  adj_unfold_after,
  adj_unfold_info,
  no_miracle,
  join_distrib,
  case_split,
  meet_intro,
};

inline constexpr Rule all_rules[] = {Rule::order_axiom,      Rule::kernel_discharge, Rule::fact_discharge,
                                     Rule::app_subst,        Rule::act_app_subst,    Rule::def_expand,
                                     Rule::adj_unfold_after, Rule::adj_unfold_info,  Rule::no_miracle,
                                     Rule::join_distrib,     Rule::case_split,       Rule::meet_intro};

inline std::string to_string(Rule r) {
  switch (r) {
    case Rule::order_axiom: return "OrderAxiom";
    case Rule::kernel_discharge: return "KernelDischarge";
    case Rule::fact_discharge: return "FactDischarge";
    case Rule::app_subst: return "AppSubst";
    case Rule::act_app_subst: return "ActAppSubst";
    case Rule::def_expand: return "DefExpand";
    case Rule::adj_unfold_after: return "AdjUnfoldAfter";
    case Rule::adj_unfold_info: return "AdjUnfoldInfo";
    case Rule::no_miracle: return "NoMiracle";
    case Rule::join_distrib: return "JoinDistrib";
    case Rule::case_split: return "CaseSplit";
    case Rule::meet_intro: return "MeetIntro";
  }
  return "?";
}

inline std::optional<Rule> rule_from_string(std::string_view s) {
  for (Rule r : all_rules)
    if (to_string(r) == s) return r;
  return std::nullopt;
}

struct ProofTree {
  Sequent goal;
  Rule rule = Rule::order_axiom;
  std::vector<ProofTree> children;

  std::size_t height() const {
    std::size_t h = 0;
    for (const auto& c : children) h = std::max(h, c.height());
    return h + 1;
  }

  /// Rules in pre-order.
  std::vector<Rule> rules() const {
    std::vector<Rule> out{rule};
    for (const auto& c : children) {
      auto sub = c.rules();
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }

  friend bool operator==(const ProofTree&, const ProofTree&) = default;
};

struct NotProved {
  enum class Reason { depth_exhausted, no_applicable_rule };
  Reason reason = Reason::no_applicable_rule;
  std::vector<Sequent> frontier;  // open subgoals met during the search, first few only
};

inline std::string to_string(NotProved::Reason r) {
  return r == NotProved::Reason::depth_exhausted ? "depth_exhausted" : "no_applicable_rule";
}

using ProofResult = std::variant<ProofTree, NotProved>;

struct ProverOptions {
  unsigned max_depth = 32;
  /// When false, KernelDischarge is tried only after every other rule.
  bool kernel_shortcut = true;
  std::size_t max_expansions = 200000;
};

namespace detail {

using Step = std::function<std::optional<Term>(const Term&)>;

inline Term with_action(const Term& t, ActionRef a) {
  return t.is(TermKind::update) ? Term::upd(std::move(a), t.arg()) : Term::after(std::move(a), t.arg());
}

inline Step app_subst_step(const Assumptions& as) {
  return [&as](const Term& t) -> std::optional<Term> {
    if (!t.is(TermKind::appearance) || !t.arg().is(TermKind::atom)) return std::nullopt;
    if (const Term* def = as.appearance_of(t.agent(), t.arg().name())) return *def;
    return std::nullopt;
  };
}

/// Resolves the innermost viewer of an action reference.
inline Step act_app_subst_step(const Assumptions& as) {
  return [&as](const Term& t) -> std::optional<Term> {
    if (!t.is(TermKind::update) && !t.is(TermKind::after)) return std::nullopt;
    const ActionRef& a = t.action();
    if (a.plain()) return std::nullopt;
    const std::string* seen = as.action_seen_by(a.viewers.back(), a.base);
    if (!seen) return std::nullopt;
    ActionRef r{*seen, std::vector<std::string>(a.viewers.begin(), a.viewers.end() - 1)};
    return with_action(t, std::move(r));
  };
}

inline Term group_information_term(const std::vector<std::string>& group, const Term& t) {
  Term acc = Term::info(group.front(), t);
  for (std::size_t i = 1; i < group.size(); ++i) acc = Term::meet(acc, Term::info(group[i], t));
  return acc;
}

inline std::optional<Term> def_expand_step(const Term& t) {
  switch (t.kind()) {
    case TermKind::knowledge: return Term::meet(Term::info(t.agent(), t.arg()), t.arg());
    case TermKind::belief: return Term::negation(Term::know(t.agent(), Term::negation(t.arg())));
    case TermKind::common_knowledge: {
      if (t.depth() == 0) return std::nullopt;
      Term acc = t.arg();
      Term layer = t.arg();
      for (unsigned i = 0; i < t.depth(); ++i) {
        layer = group_information_term(t.group(), layer);
        acc = Term::meet(acc, layer);
      }
      return acc;
    }
    default: return std::nullopt;
  }
}

inline std::optional<Term> join_distrib_step(const Term& t) {
  if (!t.is(TermKind::appearance) && !t.is(TermKind::update)) return std::nullopt;
  if (!t.arg().is(TermKind::join)) return std::nullopt;
  return Term::join(t.with_args({t.arg().left()}), t.with_args({t.arg().right()}));
}

/// f_A(h_a(t)) ~> h_{f'_A(a)}(f_A(t)), only with a declared f'_A(a).
inline Step no_miracle_step(const Assumptions& as) {
  return [&as](const Term& t) -> std::optional<Term> {
    if (!t.is(TermKind::appearance) || !t.arg().is(TermKind::update)) return std::nullopt;
    const Term& inner = t.arg();
    if (!inner.action().plain()) return std::nullopt;
    const std::string* seen = as.action_seen_by(t.agent(), inner.action().base);
    if (!seen) return std::nullopt;
    return Term::upd(ActionRef(*seen), Term::app(t.agent(), inner.arg()));
  };
}

inline std::vector<Term> children_of(const Term& t) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < t.arity(); ++i) out.push_back(t.arg(i));
  return out;
}

/// Rewrites every outermost redex; nullopt when nothing changed.
inline std::optional<Term> rewrite_all(const Term& t, const Step& step) {
  if (auto r = step(t)) return r;
  bool changed = false;
  auto args = children_of(t);
  for (auto& a : args) {
    if (auto r = rewrite_all(a, step)) {
      a = *r;
      changed = true;
    }
  }
  if (!changed) return std::nullopt;
  return t.with_args(std::move(args));
}

/// All results of rewriting exactly one redex, in pre-order. With `monotone`, redexes under
/// negation are skipped.
inline void rewrite_each(const Term& t, const Step& step, bool monotone, std::vector<Term>& out) {
  if (auto r = step(t)) out.push_back(*r);
  if (monotone && t.is(TermKind::negation)) return;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    std::vector<Term> sub;
    rewrite_each(t.arg(i), step, monotone, sub);
    for (auto& s : sub) {
      auto args = children_of(t);
      args[i] = std::move(s);
      out.push_back(t.with_args(std::move(args)));
    }
  }
}

inline std::optional<Term> rewrite_first(const Term& t, const Step& step) {
  std::vector<Term> all;
  rewrite_each(t, step, false, all);
  if (all.empty()) return std::nullopt;
  return all.front();
}

inline void flatten(const Term& t, TermKind k, std::vector<Term>& out) {
  if (t.is(k)) {
    flatten(t.left(), k, out);
    flatten(t.right(), k, out);
  } else {
    out.push_back(t);
  }
}

inline bool closes_by_order(const Sequent& s) {
  if (s.lhs == s.rhs || s.lhs.is(TermKind::bottom) || s.rhs.is(TermKind::top)) return true;
  std::vector<Term> parts;
  flatten(s.rhs, TermKind::join, parts);
  for (const auto& p : parts)
    if (p == s.lhs) return true;
  parts.clear();
  flatten(s.lhs, TermKind::meet, parts);
  for (const auto& p : parts)
    if (p == s.rhs) return true;
  return false;
}

inline bool closes_by_kernel(const Sequent& s, const Assumptions& as) {
  if (!s.lhs.is(TermKind::update) || !s.lhs.action().plain()) return false;
  const Term& x = s.lhs.arg();
  return x.is(TermKind::bottom) || (x.is(TermKind::atom) && as.in_kernel(s.lhs.action().base, x.name()));
}

inline std::optional<Sequent> fact_discharge(const Sequent& s, const Assumptions& as) {
  if (!s.lhs.is(TermKind::update) || !s.lhs.action().plain()) return std::nullopt;
  if (!s.rhs.is(TermKind::atom) || !as.facts.count(s.rhs.name())) return std::nullopt;
  if (!as.communication.count(s.lhs.action().base)) return std::nullopt;
  return Sequent{s.lhs.arg(), s.rhs};
}

struct Candidate {
  Rule rule;
  std::vector<Sequent> children;
};

inline void add_rewrite(std::vector<Candidate>& out, Rule r, const Sequent& s, const Step& step) {
  auto l = rewrite_all(s.lhs, step);
  auto rr = rewrite_all(s.rhs, step);
  if (l || rr) out.push_back({r, {Sequent{l.value_or(s.lhs), rr.value_or(s.rhs)}}});
}

inline std::vector<Candidate> candidates(const Sequent& s, const Assumptions& as, bool kernel_shortcut) {
  std::vector<Candidate> out;
  if (closes_by_order(s)) out.push_back({Rule::order_axiom, {}});
  const bool kernel = closes_by_kernel(s, as);
  if (kernel && kernel_shortcut) out.push_back({Rule::kernel_discharge, {}});
  if (auto c = fact_discharge(s, as)) out.push_back({Rule::fact_discharge, {*c}});
  add_rewrite(out, Rule::app_subst, s, app_subst_step(as));
  add_rewrite(out, Rule::act_app_subst, s, act_app_subst_step(as));
  add_rewrite(out, Rule::def_expand, s, def_expand_step);
  if (s.rhs.is(TermKind::after))
    out.push_back({Rule::adj_unfold_after, {Sequent{Term::upd(s.rhs.action(), s.lhs), s.rhs.arg()}}});
  if (s.rhs.is(TermKind::information))
    out.push_back({Rule::adj_unfold_info, {Sequent{Term::app(s.rhs.agent(), s.lhs), s.rhs.arg()}}});
  std::vector<Term> nm;
  rewrite_each(s.lhs, no_miracle_step(as), true, nm);
  for (auto& t : nm) out.push_back({Rule::no_miracle, {Sequent{t, s.rhs}}});
  if (auto l = rewrite_first(s.lhs, join_distrib_step)) {
    out.push_back({Rule::join_distrib, {Sequent{*l, s.rhs}}});
  } else if (auto r = rewrite_first(s.rhs, join_distrib_step)) {
    out.push_back({Rule::join_distrib, {Sequent{s.lhs, *r}}});
  }
  if (s.lhs.is(TermKind::join))
    out.push_back({Rule::case_split, {Sequent{s.lhs.left(), s.rhs}, Sequent{s.lhs.right(), s.rhs}}});
  if (s.rhs.is(TermKind::meet))
    out.push_back({Rule::meet_intro, {Sequent{s.lhs, s.rhs.left()}, Sequent{s.lhs, s.rhs.right()}}});
  if (kernel && !kernel_shortcut) out.push_back({Rule::kernel_discharge, {}});
  return out;
}

class Prover {
 public:
  Prover(const Assumptions& as, const ProverOptions& opt) : as_(as), opt_(opt) {}

  ProofResult run(const Sequent& goal) {
    if (auto t = search(goal, opt_.max_depth)) return *t;
    NotProved np;
    np.reason = depth_hit_ ? NotProved::Reason::depth_exhausted : NotProved::Reason::no_applicable_rule;
    np.frontier = std::move(frontier_);
    return np;
  }

 private:
  static constexpr std::size_t frontier_cap = 16;

  void open(const Sequent& s) {
    if (frontier_.size() >= frontier_cap) return;
    for (const auto& f : frontier_)
      if (f == s) return;
    frontier_.push_back(s);
  }

  std::optional<ProofTree> search(const Sequent& s, unsigned budget) {
    if (budget == 0 || ++expansions_ > opt_.max_expansions) {
      depth_hit_ = true;
      open(s);
      return std::nullopt;
    }
    const std::string key = to_string(s);
    if (auto it = failed_.find(key); it != failed_.end() && it->second >= budget) return std::nullopt;
    const auto cands = candidates(s, as_, opt_.kernel_shortcut);
    if (cands.empty()) open(s);
    for (const auto& c : cands) {
      ProofTree node{s, c.rule, {}};
      bool ok = true;
      for (const auto& child : c.children) {
        auto sub = search(child, budget - 1);
        if (!sub) {
          ok = false;
          break;
        }
        node.children.push_back(std::move(*sub));
      }
      if (ok) return node;
    }
    unsigned& known = failed_[key];
    known = std::max(known, budget);
    return std::nullopt;
  }

  const Assumptions& as_;
  ProverOptions opt_;
  std::map<std::string, unsigned> failed_;
  std::vector<Sequent> frontier_;
  bool depth_hit_ = false;
  std::size_t expansions_ = 0;
};

/// y arises from x by rewriting one or more non-overlapping redexes with `step`.
inline bool rewrites_to(const Term& x, const Term& y, const Step& step, bool monotone, bool& changed) {
  if (x == y) return true;
  if (auto r = step(x); r && *r == y) {
    changed = true;
    return true;
  }
  if (x.arity() == 0 || x.arity() != y.arity()) return false;
  if (monotone && x.is(TermKind::negation)) return false;
  if (!(x.with_args(children_of(y)) == y)) return false;
  for (std::size_t i = 0; i < x.arity(); ++i)
    if (!rewrites_to(x.arg(i), y.arg(i), step, monotone, changed)) return false;
  return true;
}

inline bool sequent_rewrites_to(const Sequent& a, const Sequent& b, const Step& step, bool lhs_only, bool monotone) {
  bool changed = false;
  if (lhs_only && !(a.rhs == b.rhs)) return false;
  if (!rewrites_to(a.lhs, b.lhs, step, monotone, changed)) return false;
  if (!rewrites_to(a.rhs, b.rhs, step, monotone, changed)) return false;
  return changed;
}

}  // namespace detail

inline ProofResult prove(const Sequent& goal, const Assumptions& as, const ProverOptions& options = {}) {
  if (options.max_depth < 1) throw Error(Errc::internal, "max_depth must be at least 1");
  return detail::Prover(as, options).run(goal);
}

/// Location of the first node whose rule application does not check. `path` lists child
/// indices from the root.
struct BadNode {
  std::vector<std::size_t> path;
  Sequent goal;
  Rule rule = Rule::order_axiom;
  std::string reason;
};

namespace detail {

inline std::optional<std::string> check_node(const ProofTree& n, const Assumptions& as) {
  const Sequent& g = n.goal;
  auto arity = [&](std::size_t k) -> std::optional<std::string> {
    if (n.children.size() != k)
      return "expected " + std::to_string(k) + " premise(s), found " + std::to_string(n.children.size());
    return std::nullopt;
  };
  auto premise = [&](std::size_t i) -> const Sequent& { return n.children[i].goal; };
  auto rewrite = [&](const Step& step, bool lhs_only, bool monotone) -> std::optional<std::string> {
    if (auto e = arity(1)) return e;
    if (!sequent_rewrites_to(g, premise(0), step, lhs_only, monotone)) return std::string("premise is not a rewrite");
    return std::nullopt;
  };

  switch (n.rule) {
    case Rule::order_axiom:
      if (auto e = arity(0)) return e;
      if (!closes_by_order(g)) return std::string("not an instance of the order axioms");
      return std::nullopt;
    case Rule::kernel_discharge:
      if (auto e = arity(0)) return e;
      if (!closes_by_kernel(g, as)) return std::string("argument is not in the declared kernel");
      return std::nullopt;
    case Rule::fact_discharge: {
      if (auto e = arity(1)) return e;
      auto expected = fact_discharge(g, as);
      if (!expected) return std::string("not an update of a communication action into a fact");
      if (!(*expected == premise(0))) return std::string("premise does not drop the update");
      return std::nullopt;
    }
    case Rule::app_subst: return rewrite(app_subst_step(as), false, false);
    case Rule::act_app_subst: return rewrite(act_app_subst_step(as), false, false);
    case Rule::def_expand: return rewrite(def_expand_step, false, false);
    case Rule::join_distrib: return rewrite(join_distrib_step, false, false);
    case Rule::no_miracle: return rewrite(no_miracle_step(as), true, true);
    case Rule::adj_unfold_after:
      if (auto e = arity(1)) return e;
      if (!g.rhs.is(TermKind::after)) return std::string("right side is not h*_a(m)");
      if (!(premise(0) == Sequent{Term::upd(g.rhs.action(), g.lhs), g.rhs.arg()}))
        return std::string("premise is not h_a(l) <= m");
      return std::nullopt;
    case Rule::adj_unfold_info:
      if (auto e = arity(1)) return e;
      if (!g.rhs.is(TermKind::information)) return std::string("right side is not f*_A(m)");
      if (!(premise(0) == Sequent{Term::app(g.rhs.agent(), g.lhs), g.rhs.arg()}))
        return std::string("premise is not f_A(l) <= m");
      return std::nullopt;
    case Rule::case_split:
      if (auto e = arity(2)) return e;
      if (!g.lhs.is(TermKind::join)) return std::string("left side is not a join");
      if (!(premise(0) == Sequent{g.lhs.left(), g.rhs}) || !(premise(1) == Sequent{g.lhs.right(), g.rhs}))
        return std::string("premises are not the two cases");
      return std::nullopt;
    case Rule::meet_intro:
      if (auto e = arity(2)) return e;
      if (!g.rhs.is(TermKind::meet)) return std::string("right side is not a meet");
      if (!(premise(0) == Sequent{g.lhs, g.rhs.left()}) || !(premise(1) == Sequent{g.lhs, g.rhs.right()}))
        return std::string("premises are not the two conjuncts");
      return std::nullopt;
  }
  return std::string("unknown rule");
}

inline std::optional<BadNode> verify(const ProofTree& n, const Assumptions& as, std::vector<std::size_t>& path) {
  if (auto e = check_node(n, as)) return BadNode{path, n.goal, n.rule, *e};
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    path.push_back(i);
    if (auto bad = verify(n.children[i], as, path)) return bad;
    path.pop_back();
  }
  return std::nullopt;
}

}  // namespace detail

/// Re-checks every rule application, without search. Empty means the tree is sound.
inline std::optional<BadNode> verify_tree(const ProofTree& tree, const Assumptions& as) {
  std::vector<std::size_t> path;
  return detail::verify(tree, as, path);
}

// ---------------------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string premises(const ProofTree& n) {
  std::string s;
  for (std::size_t i = 0; i < n.children.size(); ++i) s += (i ? " and " : "") + to_math(n.children[i].goal);
  return s;
}

inline std::string phrase(const ProofTree& n) {
  const Sequent& g = n.goal;
  switch (n.rule) {
    case Rule::order_axiom: return "holds in every lattice";
    case Rule::kernel_discharge:
      return "holds since " + to_math(g.lhs.arg()) + " is in ker(" + to_math(g.lhs.action()) + "), so " + to_math(g.lhs) +
             " = ⊥";
    case Rule::fact_discharge:
      return "since " + to_math(g.rhs) + " is a fact and " + to_math(g.lhs.action()) +
             " a communication action, it suffices to show " + premises(n);
    case Rule::app_subst: return "by the assumptions on appearances this is " + premises(n);
    case Rule::act_app_subst: return "by the assumptions on action appearances this is " + premises(n);
    case Rule::def_expand: return "unfolding the definitions this is " + premises(n);
    case Rule::adj_unfold_after:
      return "by the adjunction rule on h*_" + to_math(g.rhs.action()) + " this holds iff " + premises(n);
    case Rule::adj_unfold_info:
      return "by the adjunction rule on f*_" + g.rhs.agent() + " this holds iff " + premises(n);
    case Rule::no_miracle: return "by the no-miracle axiom it suffices to show " + premises(n);
    case Rule::join_distrib: return "since the maps preserve joins this is " + premises(n);
    case Rule::case_split: return "it suffices to show both cases " + premises(n);
    case Rule::meet_intro: return "it suffices to show both " + premises(n);
  }
  return {};
}

inline void render(const ProofTree& n, std::size_t depth, std::string& out) {
  out += std::string(2 * depth, ' ') + to_math(n.goal) + ": " + phrase(n) + " [" + to_string(n.rule) + "]\n";
  for (const auto& c : n.children) render(c, depth + 1, out);
}

}  // namespace detail

/// One line per node, indented by depth.
inline std::string render_text(const ProofTree& tree) {
  std::string out;
  detail::render(tree, 0, out);
  return out;
}

inline nlohmann::json sequent_to_json(const Sequent& s) { return {{"lhs", to_string(s.lhs)}, {"rhs", to_string(s.rhs)}}; }

/// {goal: {lhs, rhs}, rule, children: [...]}, terms in scenario syntax.
inline nlohmann::json to_json(const ProofTree& tree) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : tree.children) children.push_back(to_json(c));
  return {{"goal", sequent_to_json(tree.goal)}, {"rule", to_string(tree.rule)}, {"children", std::move(children)}};
}

inline ProofTree proof_from_json(const nlohmann::json& j) {
  try {
    ProofTree t;
    t.goal = Sequent{parse_term(j.at("goal").at("lhs").get<std::string>()),
                     parse_term(j.at("goal").at("rhs").get<std::string>())};
    const auto name = j.at("rule").get<std::string>();
    auto r = rule_from_string(name);
    if (!r) throw Error(Errc::parse_error, "unknown rule '" + name + "'");
    t.rule = *r;
    for (const auto& c : j.at("children")) t.children.push_back(proof_from_json(c));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("malformed proof document: ") + e.what());
  }
}

}  // namespace adjoint
