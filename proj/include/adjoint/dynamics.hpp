#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adjoint/epistemic.hpp"
#include "adjoint/error.hpp"
#include "adjoint/lattice.hpp"
#include "adjoint/operators.hpp"

namespace adjoint {

struct ActionLabel {
  std::string name;
  bool communication = false;

  friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

/// One action of an algebra: its label, its update map h_a, and optionally the elements the
/// scenario claims are annihilated by it.
struct ActionSpec {
  ActionLabel label;
  LatticeMap update;
  std::optional<std::vector<Element>> declared_kernel;
};

/// f'_A: agent -> (action -> action).
using ActionAppearance = std::map<std::string, std::map<std::string, std::string>>;

struct NoMiracleViolation {
  std::string agent;
  std::string action;
  Element l{};
  Element lhs{};  // f_A(h_a(l))
  Element rhs{};  // h_{f'_A(a)}(f_A(l))
};

struct FactViolation {
  std::string action;
  Element fact{};
  Element l{};
  bool converse = false;  // true: h_a(l) <= fact but l is not below it
};

struct KernelMismatch {
  std::string action;
  Element element{};  // declared kernel element with h_a(element) != bottom
};

struct AxiomReport {
  std::vector<NoMiracleViolation> no_miracle;
  std::vector<FactViolation> fact_forward;
  std::vector<KernelMismatch> kernels;

  bool ok() const { return no_miracle.empty() && fact_forward.empty() && kernels.empty(); }
};

class AxiomViolation : public Error {
 public:
  AxiomViolation(AxiomReport report, const std::string& message)
      : Error(Errc::axiom_violation, message), report_(std::move(report)) {}
  const AxiomReport& report() const noexcept { return report_; }

 private:
  AxiomReport report_;
};

struct DynamicOptions {
  /// Check no-miracle on every element rather than only the join-irreducibles.
  bool full_lattice_axioms = false;
};

/// An action epistemic algebra with action appearances (a real action epistemic algebra),
/// facts and communication actions. Only constructible through `build`, which validates.
class DynamicAlgebra {
 public:
  static DynamicAlgebra build(Mama mama, std::vector<ActionSpec> actions, ActionAppearance action_appearance,
                              std::vector<Element> facts, const DynamicOptions& options = {});

  const Mama& mama() const noexcept { return mama_; }
  const LatticePtr& lattice() const noexcept { return mama_.lattice(); }
  const std::vector<ActionLabel>& actions() const noexcept { return labels_; }
  const std::vector<Element>& facts() const noexcept { return facts_; }
  const ActionAppearance& action_appearance() const noexcept { return action_appearance_; }

  bool has_action(const std::string& a) const { return updates_.count(a) != 0; }

  const ActionLabel& label(const std::string& a) const {
    for (const auto& l : labels_)
      if (l.name == a) return l;
    throw Error(Errc::unknown_action, "'" + a + "'");
  }

  const AdjointPair& update_pair(const std::string& a) const {
    auto it = updates_.find(a);
    if (it == updates_.end()) throw Error(Errc::unknown_action, "'" + a + "'");
    return it->second;
  }
  const LatticeMap& update(const std::string& a) const { return update_pair(a).left; }
  const LatticeMap& update_adjoint(const std::string& a) const { return update_pair(a).right; }

  /// f'_A(a).
  const std::string& action_seen_by(const std::string& agent, const std::string& action) const {
    auto it = action_appearance_.find(agent);
    if (it == action_appearance_.end()) throw Error(Errc::unknown_agent, "'" + agent + "'");
    auto jt = it->second.find(action);
    if (jt == it->second.end()) throw Error(Errc::unknown_action, "'" + action + "'");
    return jt->second;
  }

  const std::optional<std::vector<Element>>& declared_kernel(const std::string& a) const {
    auto it = declared_kernels_.find(a);
    if (it == declared_kernels_.end()) throw Error(Errc::unknown_action, "'" + a + "'");
    return it->second;
  }

 private:
  explicit DynamicAlgebra(Mama mama) : mama_(std::move(mama)) {}

  Mama mama_;
  std::vector<ActionLabel> labels_;
  std::map<std::string, AdjointPair> updates_;
  std::map<std::string, std::optional<std::vector<Element>>> declared_kernels_;
  ActionAppearance action_appearance_;
  std::vector<Element> facts_;
};

/// f_A(h_a(l)) <= h_{f'_A(a)}(f_A(l)) for every agent and action. Both sides are join-preserving
/// in l, so by default only the join-irreducibles are visited.
inline std::vector<NoMiracleViolation> check_no_miracle(const DynamicAlgebra& alg, bool full_lattice = false) {
  const FiniteLattice& l = *alg.lattice();
  std::vector<Element> points;
  if (full_lattice) {
    points.assign(l.elements().begin(), l.elements().end());
  } else {
    points = l.join_irreducibles();
  }
  std::vector<NoMiracleViolation> out;
  for (const auto& agent : alg.mama().agents()) {
    const LatticeMap& f = alg.mama().appearance_map(agent);
    for (const auto& act : alg.actions()) {
      const LatticeMap& h = alg.update(act.name);
      const LatticeMap& h_seen = alg.update(alg.action_seen_by(agent, act.name));
      for (Element x : points) {
        const Element lhs = f(h(x));
        const Element rhs = h_seen(f(x));
        if (!l.leq(lhs, rhs)) out.push_back({agent, act.name, x, lhs, rhs});
      }
    }
  }
  return out;
}

/// {l | h_a(l) = bottom}, in id order.
inline std::vector<Element> kernel(const DynamicAlgebra& alg, const std::string& action) {
  const LatticeMap& h = alg.update(action);
  const FiniteLattice& l = *alg.lattice();
  std::vector<Element> out;
  for (Element x : l.elements())
    if (h(x) == l.bottom()) out.push_back(x);
  return out;
}

/// Declared kernel elements that the update does not annihilate.
inline std::vector<KernelMismatch> check_declared_kernels(const DynamicAlgebra& alg) {
  std::vector<KernelMismatch> out;
  const FiniteLattice& l = *alg.lattice();
  for (const auto& act : alg.actions()) {
    const auto& declared = alg.declared_kernel(act.name);
    if (!declared) continue;
    for (Element e : *declared)
      if (alg.update(act.name)(e) != l.bottom()) out.push_back({act.name, e});
  }
  return out;
}

/// True iff the declared kernel elements generate exactly the computed kernel. Unset when
/// nothing was declared for the action.
inline std::optional<bool> kernel_matches_declaration(const DynamicAlgebra& alg, const std::string& action) {
  const auto& declared = alg.declared_kernel(action);
  if (!declared) return std::nullopt;
  const FiniteLattice& l = *alg.lattice();
  const auto computed = kernel(alg, action);
  return l.join(*declared) == l.join(computed) && check_declared_kernels(alg).empty();
}

struct FactStabilityReport {
  bool strict = false;
  std::vector<FactViolation> forward;
  std::vector<FactViolation> converse;  // populated in strict mode only

  bool passed() const { return forward.empty() && (!strict || converse.empty()); }
};

/// For every communication action a and fact phi: l <= phi implies h_a(l) <= phi.
/// Strict mode also lists the converse failures, which occur at kernel elements.
inline FactStabilityReport validate_fact_stability(const DynamicAlgebra& alg, bool strict = false) {
  const FiniteLattice& l = *alg.lattice();
  FactStabilityReport r;
  r.strict = strict;
  for (const auto& act : alg.actions()) {
    if (!act.communication) continue;
    const LatticeMap& h = alg.update(act.name);
    for (Element phi : alg.facts()) {
      for (Element x : l.elements()) {
        const bool below = l.leq(x, phi);
        const bool image_below = l.leq(h(x), phi);
        if (below && !image_below) r.forward.push_back({act.name, phi, x, false});
        if (strict && image_below && !below) r.converse.push_back({act.name, phi, x, true});
      }
    }
  }
  return r;
}

inline DynamicAlgebra DynamicAlgebra::build(Mama mama, std::vector<ActionSpec> actions,
                                            ActionAppearance action_appearance, std::vector<Element> facts,
                                            const DynamicOptions& options) {
  DynamicAlgebra alg(std::move(mama));
  const LatticePtr& lat = alg.lattice();
  for (auto& spec : actions) {
    const std::string& name = spec.label.name;
    if (alg.updates_.count(name)) throw Error(Errc::duplicate_label, "action '" + name + "' declared twice");
    if (spec.update.lattice() != lat) throw Error(Errc::lattice_mismatch, "update of '" + name + "'");
    if (spec.declared_kernel)
      for (Element e : *spec.declared_kernel) lat->check(e);
    alg.updates_.emplace(name, right_adjoint(as_join_preserving(spec.update)));
    alg.declared_kernels_.emplace(name, std::move(spec.declared_kernel));
    alg.labels_.push_back(std::move(spec.label));
  }
  for (const auto& agent : alg.mama().agents()) {
    auto it = action_appearance.find(agent);
    for (const auto& act : alg.labels_) {
      if (it == action_appearance.end() || !it->second.count(act.name))
        throw Error(Errc::incomplete_action_appearance,
                    "agent '" + agent + "' has no appearance for action '" + act.name + "'");
      const std::string& seen = it->second.at(act.name);
      if (!alg.updates_.count(seen))
        throw Error(Errc::unknown_action, "agent '" + agent + "' sees '" + act.name + "' as unknown '" + seen + "'");
    }
  }
  for (const auto& [agent, table] : action_appearance) {
    if (!alg.mama().has_agent(agent)) throw Error(Errc::unknown_agent, "'" + agent + "' in action appearance");
    for (const auto& [from, to] : table)
      if (!alg.updates_.count(from)) throw Error(Errc::unknown_action, "'" + from + "' in action appearance");
  }
  alg.action_appearance_ = std::move(action_appearance);
  for (Element phi : facts) lat->check(phi);
  alg.facts_ = std::move(facts);

  AxiomReport report;
  report.no_miracle = check_no_miracle(alg, options.full_lattice_axioms);
  report.fact_forward = validate_fact_stability(alg, false).forward;
  report.kernels = check_declared_kernels(alg);
  if (!report.ok()) {
    std::string msg;
    const FiniteLattice& l = *lat;
    if (!report.no_miracle.empty()) {
      const auto& v = report.no_miracle.front();
      msg = "NoMiracleViolation(agent " + v.agent + ", action " + v.action + ", l = " + l.name(v.l) +
            "): f_A(h_a(l)) = " + l.name(v.lhs) + " is not below h_{f'_A(a)}(f_A(l)) = " + l.name(v.rhs);
    } else if (!report.fact_forward.empty()) {
      const auto& v = report.fact_forward.front();
      msg = "FactStabilityViolation(action " + v.action + ", fact " + l.name(v.fact) + ", l = " + l.name(v.l) + ")";
    } else {
      const auto& v = report.kernels.front();
      msg = "KernelMismatch(action " + v.action + ", element " + l.name(v.element) + ")";
    }
    throw AxiomViolation(std::move(report), msg);
  }
  return alg;
}

/// h*_a(l): "after action a, l holds".
inline Element update_result(const DynamicAlgebra& alg, const std::string& action, Element l) {
  return alg.update_adjoint(action)(l);
}

/// Applies meet_{i>=1} (h*_alpha)^i to l, where h_alpha joins the updates of the actions in alpha.
inline Element eventually(const DynamicAlgebra& alg, const std::vector<std::string>& alpha, Element l) {
  if (alpha.empty()) throw Error(Errc::empty_action_set, "eventually needs at least one action");
  LatticeMap h = alg.update(alpha.front());
  for (std::size_t i = 1; i < alpha.size(); ++i) h = pointwise_join(h, alg.update(alpha[i]));
  return gfp_meet(right_adjoint(h).right)(l);
}

}  // namespace adjoint
