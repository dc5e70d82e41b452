#pragma once

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adjoint/derivation.hpp"
#include "adjoint/dynamics.hpp"
#include "adjoint/epistemic.hpp"
#include "adjoint/error.hpp"
#include "adjoint/quantale.hpp"
#include "adjoint/scenario.hpp"
#include "adjoint/semantics.hpp"

namespace adjoint::cli {

inline constexpr int schema_version = 1;

enum Exit : int { ok = 0, query_failed = 1, axiom_violation = 2, parse_failure = 3, internal_failure = 4 };

struct Options {
  bool json = false;
  bool strict_facts = false;
  bool non_paranoid = false;
  bool no_kernel_shortcut = false;
  bool full_lattice_axioms = false;
  std::optional<unsigned> depth;
  std::size_t word_bound = 3;
};

struct Verdict {
  std::string query;
  QueryKind kind = QueryKind::validate;
  std::string status;  // holds, fails, proved, not_proved, value, valid, invalid, error
  bool success = false;
  bool expect_holds = true;
  std::string subject;  // the sequent or term, in scenario syntax
  std::optional<std::string> lhs_value, rhs_value, value;
  std::optional<std::string> counterexample;
  std::optional<ProofTree> proof;
  std::optional<NotProved> not_proved;
  std::optional<bool> cross_check;  // semantic re-check of a proof in "both" mode
  std::string message;
};

struct AxiomEntry {
  std::string name;
  bool holds = true;
  bool mandatory = true;
  std::string detail;
};

struct Table {
  std::string map;
  std::string adjoint;
  std::vector<std::array<std::string, 3>> rows;  // element, map value, adjoint value
};

struct RunReport {
  std::string command;
  std::string scenario;
  std::vector<Verdict> verdicts;
  std::vector<AxiomEntry> axioms;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> timings;  // phase, milliseconds
  std::optional<std::string> error;
  std::string error_kind;
  std::optional<SourceLoc> error_loc;
  int error_exit = ok;
  bool internal_breach = false;
};

/// Exit status as a function of the verdicts and axiom entries alone.
inline int exit_code(const RunReport& r) {
  if (r.error) return r.error_exit;
  if (r.internal_breach) return internal_failure;
  for (const auto& a : r.axioms)
    if (a.mandatory && !a.holds) return axiom_violation;
  for (const auto& v : r.verdicts)
    if (!v.success) return v.status == "invalid" ? axiom_violation : query_failed;
  return ok;
}

namespace detail {

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& r) : r_(r), t_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    r_.timings.emplace_back(phase, std::chrono::duration<double, std::milli>(now - t_).count());
    t_ = now;
  }

 private:
  RunReport& r_;
  std::chrono::steady_clock::time_point t_;
};

inline void fail(RunReport& r, const Error& e, int exit) {
  r.error = e.what();
  r.error_kind = to_string(e.code());
  r.error_exit = exit;
  if (auto p = dynamic_cast<const ParseError*>(&e)) r.error_loc = p->location();
  if (auto p = dynamic_cast<const ResolutionError*>(&e)) r.error_loc = p->location();
}

inline int build_failure_exit(const Error& e) {
  switch (e.code()) {
    case Errc::axiom_violation:
    case Errc::not_join_preserving:
    case Errc::not_meet_preserving: return axiom_violation;
    case Errc::internal: return internal_failure;
    default: return parse_failure;
  }
}

/// A join-irreducible below `lhs` but not below `rhs`.
inline std::optional<std::string> counterexample(const FiniteLattice& l, Element lhs, Element rhs) {
  for (Element j : l.join_irreducibles())
    if (l.leq(j, lhs) && !l.leq(j, rhs)) return l.name(j);
  return std::nullopt;
}

inline std::string describe_violation(const FiniteLattice& l, const AxiomReport& r);

inline std::vector<AxiomEntry> axiom_entries(const Instance& inst, const Options& opt) {
  std::vector<AxiomEntry> out;
  if (inst.assumptions) {
    const auto& as = *inst.assumptions;
    out.push_back({"symbolic assumptions", true, true,
                   std::to_string(as.appearance.size()) + " appearance and " +
                       std::to_string(as.action_appearance.size()) + " action appearance definitions"});
    for (const auto& u : inst.unrealized) out.push_back({"assumption matches the model", false, false, u});
  }
  if (!inst.algebra) return out;

  const DynamicAlgebra& alg = *inst.algebra;
  const FiniteLattice& l = *alg.lattice();
  for (const auto& agent : alg.mama().agents()) {
    const auto& p = alg.mama().pair(agent);
    auto bad = verify_adjunction(p.left, p.right);
    out.push_back({"adjunction f_" + agent + " -| f*_" + agent, !bad, true, bad ? "fails at b = " + l.name(bad->b) : ""});
  }
  for (const auto& act : alg.actions()) {
    const auto& p = alg.update_pair(act.name);
    auto bad = verify_adjunction(p.left, p.right);
    out.push_back({"adjunction h_" + act.name + " -| h*_" + act.name, !bad, true,
                   bad ? "fails at b = " + l.name(bad->b) : ""});
  }

  const auto nm = check_no_miracle(alg, opt.full_lattice_axioms);
  out.push_back({"no-miracle", nm.empty(), true,
                 nm.empty() ? std::string(opt.full_lattice_axioms ? "checked on every element"
                                                                  : "checked on the join-irreducibles")
                            : describe_violation(l, AxiomReport{nm, {}, {}})});

  const auto facts = validate_fact_stability(alg, opt.strict_facts);
  out.push_back({"fact stability", facts.forward.empty(), true,
                 facts.forward.empty() ? "" : describe_violation(l, AxiomReport{{}, facts.forward, {}})});
  if (opt.strict_facts) {
    std::string d;
    if (!facts.converse.empty()) {
      const auto& v = facts.converse.front();
      d = "h_" + v.action + "(" + l.name(v.l) + ") is below fact " + l.name(v.fact) + " but " + l.name(v.l) + " is not";
    }
    out.push_back({"strict fact stability", facts.converse.empty(), true, d});
  }

  const auto kernels = check_declared_kernels(alg);
  out.push_back({"declared kernels", kernels.empty(), true,
                 kernels.empty() ? "" : describe_violation(l, AxiomReport{{}, {}, kernels})});

  if (!alg.actions().empty()) {
    std::vector<std::string> gens;
    for (const auto& a : alg.actions()) gens.push_back(a.name);
    const auto q = ActionQuantale::build(gens, opt.word_bound);
    const auto view = indexed_to_binary(alg, q);
    const auto sys = check_epistemic_system(view, {opt.non_paranoid, opt.full_lattice_axioms});
    std::string d = "word bound " + std::to_string(opt.word_bound) +
                    (sys.exhaustive ? ", exhaustive" : ", sampled population");
    if (!sys.module_failures.empty()) d = sys.module_failures.front().law + " at " + sys.module_failures.front().witness;
    if (!sys.rebuild_error.empty()) d = sys.rebuild_error;
    out.push_back({"epistemic system module laws", sys.module_failures.empty() && sys.rebuild_error.empty() &&
                                                       sys.axioms && sys.axioms->ok(),
                   true, d});
    std::string qd = sys.quantale.failures.empty()
                         ? std::string(opt.non_paranoid ? "non-paranoid equalities" : "optimistically paranoid laws")
                         : sys.quantale.failures.front().law + " at " + sys.quantale.failures.front().witness;
    out.push_back({"epistemic quantale laws", sys.quantale.passed(), true, qd});
    out.push_back({"non-paranoid agents", sys.quantale.non_paranoid_holds, false, "1 = f'(1) and f'(a.b) = f'(a).f'(b)"});
  }

  for (const auto& agent : alg.mama().agents()) {
    const auto c = check_coclosure_consequences(alg.mama(), agent);
    std::string d;
    if (c.hypothesis_witness) d = "witness l = " + l.name(*c.hypothesis_witness);
    out.push_back({"S4 hypotheses for " + agent + " (decreasing, weakly idempotent)", c.hypotheses_met(), false, d});
    if (c.hypotheses_met())
      out.push_back({"S4 consequences for " + agent, c.consequences_hold(), true,
                     c.consequence_witness ? "witness l = " + l.name(*c.consequence_witness) : ""});
  }
  out.push_back({"Boolean base", l.is_boolean(), false, std::to_string(l.size()) + " elements"});
  return out;
}

inline std::string describe_violation(const FiniteLattice& l, const AxiomReport& r) {
  if (!r.no_miracle.empty()) {
    const auto& v = r.no_miracle.front();
    return "NoMiracleViolation(agent " + v.agent + ", action " + v.action + ", l = " + l.name(v.l) + "): f_" + v.agent +
           "(h_" + v.action + "(l)) = " + l.name(v.lhs) + " is not below " + l.name(v.rhs);
  }
  if (!r.fact_forward.empty()) {
    const auto& v = r.fact_forward.front();
    return "FactStabilityViolation(action " + v.action + ", fact " + l.name(v.fact) + ", l = " + l.name(v.l) + ")";
  }
  if (!r.kernels.empty()) {
    const auto& v = r.kernels.front();
    return "KernelMismatch(action " + v.action + ", element " + l.name(v.element) + ")";
  }
  return {};
}

inline bool mandatory_axioms_hold(const std::vector<AxiomEntry>& axioms) {
  for (const auto& a : axioms)
    if (a.mandatory && !a.holds) return false;
  return true;
}

inline Verdict run_query(const Query& q, const Instance& inst, const Options& opt, const std::vector<AxiomEntry>& axioms,
                         bool as_proof, RunReport& report) {
  Verdict v;
  v.query = q.id;
  v.kind = as_proof ? QueryKind::prove : q.kind;
  v.expect_holds = q.expect_holds;
  if (q.sequent) v.subject = to_string(*q.sequent);
  if (q.term) v.subject = to_string(*q.term);
  const auto model = inst.model();

  if (v.kind == QueryKind::validate) {
    const bool good = mandatory_axioms_hold(axioms);
    v.status = good ? "valid" : "invalid";
    v.success = good;
    return v;
  }
  if (v.kind == QueryKind::evaluate) {
    if (!model) throw Error(Errc::resolution_error, "query '" + q.id + "' needs a semantic model");
    v.value = model->lattice().name(evaluate(*q.term, *model));
    v.status = "value";
    v.success = true;
    return v;
  }
  if (!q.sequent) throw Error(Errc::resolution_error, "query '" + q.id + "' has no sequent to prove");
  if (v.kind == QueryKind::entails) {
    if (!model) throw Error(Errc::resolution_error, "query '" + q.id + "' needs a semantic model");
    const FiniteLattice& l = model->lattice();
    const Element lhs = evaluate(q.sequent->lhs, *model);
    const Element rhs = evaluate(q.sequent->rhs, *model);
    v.lhs_value = l.name(lhs);
    v.rhs_value = l.name(rhs);
    const bool holds = l.leq(lhs, rhs);
    v.status = holds ? "holds" : "fails";
    if (!holds) v.counterexample = counterexample(l, lhs, rhs);
    v.success = holds == q.expect_holds;
    return v;
  }

  if (!inst.assumptions) throw Error(Errc::resolution_error, "query '" + q.id + "' needs symbolic assumptions");
  ProverOptions po;
  po.max_depth = opt.depth.value_or(q.depth.value_or(32));
  po.kernel_shortcut = !opt.no_kernel_shortcut;
  auto result = prove(*q.sequent, *inst.assumptions, po);
  if (auto* tree = std::get_if<ProofTree>(&result)) {
    v.status = "proved";
    v.success = q.expect_holds;
    if (auto bad = verify_tree(*tree, *inst.assumptions)) {
      v.message = "proof audit failed at " + to_string(bad->goal) + ": " + bad->reason;
      v.success = false;
      report.internal_breach = true;
    }
    if (model && inst.cross_check) {
      const FiniteLattice& l = model->lattice();
      const Element lhs = evaluate(q.sequent->lhs, *model);
      const Element rhs = evaluate(q.sequent->rhs, *model);
      v.lhs_value = l.name(lhs);
      v.rhs_value = l.name(rhs);
      v.cross_check = l.leq(lhs, rhs);
      if (!*v.cross_check) {
        v.message = "soundness cross-check failed: the model gives " + l.name(lhs) + " and " + l.name(rhs);
        if (!inst.unrealized.empty()) v.message += " (some assumptions are not realized by the model)";
        v.counterexample = counterexample(l, lhs, rhs);
        v.success = false;
        report.internal_breach = true;
      }
    }
    v.proof = std::move(*tree);
  } else {
    v.status = "not_proved";
    v.not_proved = std::get<NotProved>(std::move(result));
    v.success = !q.expect_holds;
  }
  return v;
}

inline void add_table(RunReport& r, const FiniteLattice& l, const std::string& name, const AdjointPair& p,
                      const std::string& adjoint_name) {
  Table t{name, adjoint_name, {}};
  for (Element x : l.elements()) t.rows.push_back({l.name(x), l.name(p.left(x)), l.name(p.right(x))});
  r.tables.push_back(std::move(t));
}

}  // namespace detail

/// Runs one command over scenario text. `target` is the query id (query, prove) or map name
/// (tables: f[A] or h[a]; empty for all maps).
inline RunReport run_command(const std::string& command, std::string_view text, const std::string& target,
                             const Options& opt) {
  RunReport r;
  r.command = command;
  detail::Stopwatch clock(r);

  ScenarioDoc doc;
  try {
    doc = parse_scenario(text);
  } catch (const Error& e) {
    detail::fail(r, e, parse_failure);
    return r;
  }
  r.scenario = doc.name;
  clock.lap("parse");

  Instance inst;
  InstantiateOptions io;
  io.dynamic.full_lattice_axioms = opt.full_lattice_axioms;
  try {
    inst = instantiate(doc, io);
  } catch (const AxiomViolation& e) {
    r.axioms.push_back({"no-miracle, fact stability and kernels", false, true, adjoint::detail::error_detail(e)});
    detail::fail(r, e, axiom_violation);
    return r;
  } catch (const Error& e) {
    detail::fail(r, e, detail::build_failure_exit(e));
    return r;
  }
  clock.lap("instantiate");

  try {
    if (command == "tables") {
      if (!inst.algebra) throw Error(Errc::resolution_error, "tables need a semantic model");
      const DynamicAlgebra& alg = *inst.algebra;
      const FiniteLattice& l = *alg.lattice();
      bool found = false;
      for (const auto& agent : alg.mama().agents()) {
        const std::string name = "f[" + agent + "]";
        if (target.empty() || target == name) {
          detail::add_table(r, l, name, alg.mama().pair(agent), "fi[" + agent + "]");
          found = true;
        }
      }
      for (const auto& act : alg.actions()) {
        const std::string name = "h[" + act.name + "]";
        if (target.empty() || target == name) {
          detail::add_table(r, l, name, alg.update_pair(act.name), "after[" + act.name + "]");
          found = true;
        }
      }
      if (!found) throw ResolutionError({0, 0}, target, "map");
      clock.lap("tables");
      return r;
    }

    const bool wants_axioms = command == "validate" || command == "run" ||
                              (command == "query" && doc.find_query(target) &&
                               doc.find_query(target)->kind == QueryKind::validate);
    if (wants_axioms) {
      r.axioms = detail::axiom_entries(inst, opt);
      clock.lap("validate");
    }
    if (command == "validate") return r;

    std::vector<const Query*> selected;
    if (command == "run") {
      for (const auto& q : inst.queries) selected.push_back(&q);
    } else if (command == "query" || command == "prove") {
      const Query* q = doc.find_query(target);
      if (!q) throw ResolutionError({0, 0}, target, "query");
      selected.push_back(q);
    } else {
      throw Error(Errc::parse_error, "unknown command '" + command + "'");
    }
    for (const Query* q : selected) r.verdicts.push_back(detail::run_query(*q, inst, opt, r.axioms, command == "prove", r));
    clock.lap("queries");
  } catch (const ResolutionError& e) {
    detail::fail(r, e, parse_failure);
  } catch (const Error& e) {
    detail::fail(r, e, e.code() == Errc::internal ? internal_failure : parse_failure);
  }
  return r;
}

// ---------------------------------------------------------------------------------------
// Output

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j{{"query", v.query},   {"kind", to_string(v.kind)}, {"status", v.status},
                   {"success", v.success}, {"subject", v.subject}};
  if (v.kind == QueryKind::entails || v.kind == QueryKind::prove) j["expected"] = v.expect_holds ? "holds" : "fails";
  if (v.lhs_value) j["lhs_value"] = *v.lhs_value;
  if (v.rhs_value) j["rhs_value"] = *v.rhs_value;
  if (v.value) j["value"] = *v.value;
  if (v.counterexample) j["counterexample"] = *v.counterexample;
  if (v.proof) j["proof"] = adjoint::to_json(*v.proof);
  if (v.not_proved) {
    j["reason"] = to_string(v.not_proved->reason);
    nlohmann::json f = nlohmann::json::array();
    for (const auto& s : v.not_proved->frontier) f.push_back(sequent_to_json(s));
    j["frontier"] = std::move(f);
  }
  if (v.cross_check) j["cross_check"] = *v.cross_check;
  if (!v.message.empty()) j["message"] = v.message;
  return j;
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j{{"schema_version", schema_version}, {"command", r.command}, {"scenario", r.scenario}};
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  j["axioms"] = nlohmann::json::array();
  for (const auto& a : r.axioms)
    j["axioms"].push_back({{"name", a.name}, {"holds", a.holds}, {"mandatory", a.mandatory}, {"detail", a.detail}});
  if (!r.tables.empty()) {
    j["tables"] = nlohmann::json::array();
    for (const auto& t : r.tables) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : t.rows) rows.push_back({{"element", row[0]}, {"map", row[1]}, {"adjoint", row[2]}});
      j["tables"].push_back({{"map", t.map}, {"adjoint", t.adjoint}, {"rows", std::move(rows)}});
    }
  }
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [phase, ms] : r.timings) timings[phase + "_ms"] = ms;
  j["timings"] = std::move(timings);
  if (r.error) {
    nlohmann::json e{{"kind", r.error_kind}, {"message", *r.error}};
    if (r.error_loc) {
      e["line"] = r.error_loc->line;
      e["column"] = r.error_loc->column;
    }
    j["error"] = std::move(e);
  }
  j["exit_code"] = exit_code(r);
  return j;
}

namespace detail {

inline std::string pad(std::string s, std::size_t width) {
  // Column widths count code points so that the set braces line up.
  std::size_t cps = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++cps;
  if (cps < width) s += std::string(width - cps, ' ');
  return s;
}

inline std::string indent(const std::string& text, const std::string& prefix) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out += prefix + line + "\n";
  return out;
}

}  // namespace detail

inline std::string to_text(const RunReport& r) {
  std::string out;
  if (!r.scenario.empty()) out += "scenario " + r.scenario + "\n";
  if (r.error) {
    out += "error: " + *r.error + "\n";
    for (const auto& a : r.axioms)
      if (!a.holds) out += "  " + a.detail + "\n";
    return out;
  }
  for (const auto& t : r.tables) {
    std::size_t w0 = 7, w1 = t.map.size();
    for (const auto& row : t.rows) {
      w0 = std::max(w0, row[0].size());
      w1 = std::max(w1, row[1].size());
    }
    out += "\n" + detail::pad("element", w0 + 2) + detail::pad(t.map, w1 + 2) + t.adjoint + "\n";
    for (const auto& row : t.rows) out += detail::pad(row[0], w0 + 2) + detail::pad(row[1], w1 + 2) + row[2] + "\n";
  }
  if (!r.axioms.empty()) {
    out += "axioms:\n";
    for (const auto& a : r.axioms) {
      const std::string mark = a.holds ? "ok  " : (a.mandatory ? "FAIL" : "no  ");
      out += "  " + mark + "  " + a.name + (a.mandatory ? "" : " (optional)");
      if (!a.detail.empty()) out += ": " + a.detail;
      out += "\n";
    }
  }
  if (!r.verdicts.empty()) out += "queries:\n";
  std::size_t good = 0;
  for (const auto& v : r.verdicts) {
    if (v.success) ++good;
    out += "  " + v.query + "  " + v.status + (v.success ? "" : " (unexpected)") + "  " + v.subject + "\n";
    if (v.value) out += "      = " + *v.value + "\n";
    if (v.lhs_value && v.rhs_value) out += "      model: " + *v.lhs_value + " vs " + *v.rhs_value + "\n";
    if (v.counterexample) out += "      counterexample: " + *v.counterexample + "\n";
    if (v.proof) out += detail::indent(render_text(*v.proof), "      ");
    if (v.not_proved) {
      out += "      " + to_string(v.not_proved->reason) + "; open subgoals:\n";
      for (const auto& s : v.not_proved->frontier) out += "        " + to_math(s) + "\n";
    }
    if (!v.message.empty()) out += "      " + v.message + "\n";
  }
  if (!r.verdicts.empty())
    out += std::to_string(good) + "/" + std::to_string(r.verdicts.size()) + " queries as expected\n";
  return out;
}

}  // namespace adjoint::cli
