#pragma once

#include <map>
#include <string>
#include <vector>

#include "adjoint/dynamics.hpp"
#include "adjoint/epistemic.hpp"
#include "adjoint/error.hpp"
#include "adjoint/term.hpp"

namespace adjoint {

/// A validated algebra together with the lattice element each atom denotes.
struct Model {
  const DynamicAlgebra* algebra = nullptr;
  std::map<std::string, Element> atoms;

  const FiniteLattice& lattice() const { return *algebra->lattice(); }
};

/// Resolves f'_A(f'_B(a)) against the algebra's action appearances.
inline std::string resolve_action(const DynamicAlgebra& alg, const ActionRef& a) {
  if (!alg.has_action(a.base)) throw Error(Errc::unknown_action, "'" + a.base + "'");
  std::string name = a.base;
  for (auto it = a.viewers.rbegin(); it != a.viewers.rend(); ++it) name = alg.action_seen_by(*it, name);
  return name;
}

inline Element evaluate(const Term& t, const Model& m) {
  const FiniteLattice& l = m.lattice();
  const DynamicAlgebra& alg = *m.algebra;
  const Mama& mama = alg.mama();
  switch (t.kind()) {
    case TermKind::atom: {
      auto it = m.atoms.find(t.name());
      if (it == m.atoms.end()) throw Error(Errc::unknown_label, "atom '" + t.name() + "'");
      return it->second;
    }
    case TermKind::bottom: return l.bottom();
    case TermKind::top: return l.top();
    case TermKind::join: return l.join(evaluate(t.left(), m), evaluate(t.right(), m));
    case TermKind::meet: return l.meet(evaluate(t.left(), m), evaluate(t.right(), m));
    case TermKind::negation: return l.heyting_negation(evaluate(t.arg(), m));
    case TermKind::appearance: return appearance(mama, t.agent(), evaluate(t.arg(), m));
    case TermKind::information: return information(mama, t.agent(), evaluate(t.arg(), m));
    case TermKind::knowledge: return knowledge(mama, t.agent(), evaluate(t.arg(), m));
    case TermKind::belief: return belief(mama, t.agent(), evaluate(t.arg(), m));
    case TermKind::common_knowledge: {
      const Group g(mama, t.group());
      const Element x = evaluate(t.arg(), m);
      if (t.depth() == 0) return common_knowledge(mama, g)(x);
      const LatticeMap e = group_information(mama, g);
      Element acc = x;
      Element step = x;
      for (unsigned i = 0; i < t.depth(); ++i) {
        step = e(step);
        acc = l.meet(acc, step);
      }
      return acc;
    }
    case TermKind::update: return alg.update(resolve_action(alg, t.action()))(evaluate(t.arg(), m));
    case TermKind::after: return alg.update_adjoint(resolve_action(alg, t.action()))(evaluate(t.arg(), m));
  }
  throw Error(Errc::internal, "unhandled term kind");
}

/// Whether lhs <= rhs holds in the model.
inline bool holds(const Sequent& s, const Model& m) {
  return m.lattice().leq(evaluate(s.lhs, m), evaluate(s.rhs, m));
}

}  // namespace adjoint
