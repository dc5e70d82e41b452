#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adjoint/error.hpp"
#include "adjoint/lattice.hpp"
#include "adjoint/operators.hpp"

namespace adjoint {

using Generators = std::vector<std::pair<Element, Element>>;

/// A multi-agent adjoint modal algebra: one appearance map f_A per agent, with its
/// information map f*_A as the computed right adjoint.
class Mama {
 public:
  /// Agents in declaration order, each with a validated join-preserving appearance map.
  Mama(LatticePtr lattice, const std::vector<std::pair<std::string, LatticeMap>>& appearances)
      : lattice_(std::move(lattice)) {
    if (appearances.empty()) throw Error(Errc::no_agents, "a MAMA needs at least one agent");
    for (const auto& [name, f] : appearances) {
      if (f.lattice() != lattice_) throw Error(Errc::lattice_mismatch, "appearance of '" + name + "'");
      if (pairs_.count(name)) throw Error(Errc::duplicate_label, "agent '" + name + "' declared twice");
      AdjointPair pair = right_adjoint(as_join_preserving(f));
      if (verify_adjunction(pair.left, pair.right))
        throw Error(Errc::internal, "computed adjoint of '" + name + "' fails the adjunction");
      agents_.push_back(name);
      pairs_.emplace(name, std::move(pair));
    }
  }

  const LatticePtr& lattice() const noexcept { return lattice_; }
  const std::vector<std::string>& agents() const noexcept { return agents_; }
  bool has_agent(const std::string& a) const { return pairs_.count(a) != 0; }

  const AdjointPair& pair(const std::string& agent) const {
    auto it = pairs_.find(agent);
    if (it == pairs_.end()) throw Error(Errc::unknown_agent, "'" + agent + "'");
    return it->second;
  }

  const LatticeMap& appearance_map(const std::string& agent) const { return pair(agent).left; }
  const LatticeMap& information_map(const std::string& agent) const { return pair(agent).right; }

 private:
  LatticePtr lattice_;
  std::vector<std::string> agents_;
  std::map<std::string, AdjointPair> pairs_;
};

/// Builds every agent's appearance from assignments on the join-irreducibles.
inline Mama build_mama(const LatticePtr& lattice, const std::vector<std::pair<std::string, Generators>>& agents) {
  std::vector<std::pair<std::string, LatticeMap>> maps;
  maps.reserve(agents.size());
  for (const auto& [name, gens] : agents) maps.emplace_back(name, map_from_generators(lattice, gens));
  return Mama(lattice, maps);
}

inline Element appearance(const Mama& m, const std::string& agent, Element l) { return m.appearance_map(agent)(l); }
inline Element information(const Mama& m, const std::string& agent, Element l) {
  return m.information_map(agent)(l);
}

/// K_A(l) = f*_A(l) /\ l.
inline Element knowledge(const Mama& m, const std::string& agent, Element l) {
  return m.lattice()->meet(information(m, agent, l), l);
}

inline LatticeMap knowledge_map(const Mama& m, const std::string& agent) {
  return pointwise_meet(m.information_map(agent), identity_map(m.lattice()));
}

/// B_A(l) = not K_A(not l); Boolean carriers only.
inline Element belief(const Mama& m, const std::string& agent, Element l) {
  const FiniteLattice& lat = *m.lattice();
  if (!lat.is_boolean()) throw Error(Errc::not_boolean, "belief is defined on Boolean carriers");
  return lat.complement(knowledge(m, agent, lat.complement(l)));
}

/// A nonempty set of agents of one MAMA.
class Group {
 public:
  Group(const Mama& m, std::vector<std::string> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error(Errc::empty_group, "groups must be nonempty");
    for (const auto& a : members_)
      if (!m.has_agent(a)) throw Error(Errc::unknown_agent, "'" + a + "'");
  }

  const std::vector<std::string>& members() const noexcept { return members_; }

 private:
  std::vector<std::string> members_;
};

/// f_beta = join of the members' appearances.
inline LatticeMap group_appearance(const Mama& m, const Group& g) {
  LatticeMap acc = m.appearance_map(g.members().front());
  for (std::size_t i = 1; i < g.members().size(); ++i) acc = pointwise_join(acc, m.appearance_map(g.members()[i]));
  return acc;
}

/// f*_beta = meet of the members' informations.
inline LatticeMap group_information(const Mama& m, const Group& g) {
  LatticeMap acc = m.information_map(g.members().front());
  for (std::size_t i = 1; i < g.members().size(); ++i)
    acc = pointwise_meet(acc, m.information_map(g.members()[i]));
  return acc;
}

/// meet_{i>=1} (f*_beta)^i.
inline LatticeMap common_information(const Mama& m, const Group& g) { return gfp_meet(group_information(m, g)); }

/// meet_{i>=0} (f*_beta)^i: truthful common information.
inline LatticeMap common_knowledge(const Mama& m, const Group& g) {
  return pointwise_meet(identity_map(m.lattice()), common_information(m, g));
}

/// The adjoint pair (join_{i>=1} f_beta^i, meet_{i>=1} (f*_beta)^i).
inline AdjointPair common_information_pair(const Mama& m, const Group& g) {
  return {lfp_join(group_appearance(m, g)), common_information(m, g)};
}

/// Outcome of checking the co-closure hypotheses (f_A decreasing and weakly idempotent)
/// and, when they hold, their knowledge consequences.
struct CoclosureReport {
  bool decreasing = false;
  bool weakly_idempotent = false;
  std::optional<Element> hypothesis_witness;  // first l breaking a hypothesis

  // Consequences; only meaningful when hypotheses_met().
  bool information_transitive = false;  // f* <= f* . f*
  bool knowledge_transitive = false;    // K <= K . K
  bool knowledge_reflexive = false;     // K(l) = l
  std::optional<bool> negative_introspection;  // not K(l) <= K(not K(l)); Boolean carriers only
  std::optional<Element> consequence_witness;

  bool hypotheses_met() const { return decreasing && weakly_idempotent; }
  bool consequences_hold() const {
    return information_transitive && knowledge_transitive && knowledge_reflexive &&
           negative_introspection.value_or(true);
  }
};

inline CoclosureReport check_coclosure_consequences(const Mama& m, const std::string& agent) {
  const FiniteLattice& l = *m.lattice();
  const LatticeMap& f = m.appearance_map(agent);
  const LatticeMap& fs = m.information_map(agent);
  CoclosureReport r;
  r.decreasing = true;
  r.weakly_idempotent = true;
  for (Element x : l.elements()) {
    if (!l.leq(f(x), x)) {
      r.decreasing = false;
      if (!r.hypothesis_witness) r.hypothesis_witness = x;
    }
    if (!l.leq(f(f(x)), f(x))) {
      r.weakly_idempotent = false;
      if (!r.hypothesis_witness) r.hypothesis_witness = x;
    }
  }
  if (!r.hypotheses_met()) return r;

  auto k = [&](Element x) { return l.meet(fs(x), x); };
  r.information_transitive = r.knowledge_transitive = r.knowledge_reflexive = true;
  if (l.is_boolean()) r.negative_introspection = true;
  auto fail = [&](bool& flag, Element x) {
    flag = false;
    if (!r.consequence_witness) r.consequence_witness = x;
  };
  for (Element x : l.elements()) {
    if (!l.leq(fs(x), fs(fs(x)))) fail(r.information_transitive, x);
    if (!l.leq(k(x), k(k(x)))) fail(r.knowledge_transitive, x);
    if (k(x) != x) fail(r.knowledge_reflexive, x);
    if (l.is_boolean()) {
      const Element not_k = l.complement(k(x));
      if (!l.leq(not_k, k(not_k))) {
        r.negative_introspection = false;
        if (!r.consequence_witness) r.consequence_witness = x;
      }
    }
  }
  return r;
}

}  // namespace adjoint
