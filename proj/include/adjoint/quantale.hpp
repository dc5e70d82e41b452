#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adjoint/dynamics.hpp"
#include "adjoint/error.hpp"

namespace adjoint {

/// A word over the action generators, as letter indices; the empty word is the unit action.
using Word = std::vector<std::uint16_t>;
/// An element of the bounded action quantale: a finite set of words (a choice of sequences).
using QElement = std::set<Word>;
using QuantaleMap = std::function<QElement(const QElement&)>;

/// The powerset of generator words truncated at a maximum length. Join is union, composition
/// is pairwise concatenation, the unit is {empty word}. Compositions that would leave the
/// carrier raise WordLengthExceeded instead of being truncated.
class ActionQuantale {
 public:
  static ActionQuantale build(std::vector<std::string> generators, std::size_t max_word_length = 3) {
    if (max_word_length < 1) throw Error(Errc::word_length_exceeded, "word bound must be at least 1");
    std::set<std::string> seen;
    for (const auto& g : generators)
      if (!seen.insert(g).second) throw Error(Errc::duplicate_label, "generator '" + g + "' repeated");
    ActionQuantale q;
    q.generators_ = std::move(generators);
    q.bound_ = max_word_length;
    std::vector<Word> layer{Word{}};
    q.words_.push_back(Word{});
    for (std::size_t len = 1; len <= max_word_length && !q.generators_.empty(); ++len) {
      std::vector<Word> next;
      for (const Word& w : layer) {
        for (std::uint16_t g = 0; g < q.generators_.size(); ++g) {
          Word v = w;
          v.push_back(g);
          next.push_back(v);
        }
      }
      q.words_.insert(q.words_.end(), next.begin(), next.end());
      layer = std::move(next);
    }
    return q;
  }

  const std::vector<std::string>& generators() const noexcept { return generators_; }
  std::size_t max_word_length() const noexcept { return bound_; }
  /// Every word of length <= bound, shortest first.
  const std::vector<Word>& words() const noexcept { return words_; }

  std::uint16_t index(const std::string& g) const {
    auto it = std::find(generators_.begin(), generators_.end(), g);
    if (it == generators_.end()) throw Error(Errc::unknown_action, "'" + g + "' is not a quantale generator");
    return static_cast<std::uint16_t>(it - generators_.begin());
  }

  QElement unit() const { return {Word{}}; }
  QElement bottom() const { return {}; }
  QElement letter(const std::string& g) const { return {Word{index(g)}}; }

  /// The element holding the given words, each spelled as generator names.
  QElement from_words(const std::vector<std::vector<std::string>>& spelled) const {
    QElement out;
    for (const auto& w : spelled) {
      if (w.size() > bound_) throw Error(Errc::word_length_exceeded, "word longer than the bound");
      Word word;
      for (const auto& g : w) word.push_back(index(g));
      out.insert(std::move(word));
    }
    return out;
  }

  static QElement join(const QElement& a, const QElement& b) {
    QElement out = a;
    out.insert(b.begin(), b.end());
    return out;
  }

  static std::size_t longest(const QElement& x) {
    std::size_t m = 0;
    for (const Word& w : x) m = std::max(m, w.size());
    return m;
  }

  bool composable(const QElement& a, const QElement& b) const {
    return a.empty() || b.empty() || longest(a) + longest(b) <= bound_;
  }

  /// a . b = { uv | u in a, v in b }.
  QElement compose(const QElement& a, const QElement& b) const {
    if (!composable(a, b))
      throw Error(Errc::word_length_exceeded, format(a) + " . " + format(b) + " leaves the words of length <= " +
                                                  std::to_string(bound_));
    QElement out;
    for (const Word& u : a) {
      for (const Word& v : b) {
        Word w = u;
        w.insert(w.end(), v.begin(), v.end());
        out.insert(std::move(w));
      }
    }
    return out;
  }

  std::string format(const Word& w) const {
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += ".";
      s += generators_[w[i]];
    }
    return s;
  }

  std::string format(const QElement& x) const {
    std::string s = "{";
    bool first = true;
    for (const Word& w : x) {
      if (!first) s += ", ";
      s += format(w);
      first = false;
    }
    return s + "}";
  }

  /// Elements the law checks range over. With at most `exhaustive_limit` words this is the
  /// whole carrier; otherwise it is bottom, every singleton word, and the set of all letters.
  /// Every checked law is compatible with unions, so singletons generate the rest.
  std::vector<QElement> population(std::size_t exhaustive_limit = 8) const {
    std::vector<QElement> out;
    if (words_.size() <= exhaustive_limit) {
      const std::size_t count = std::size_t{1} << words_.size();
      for (std::size_t mask = 0; mask < count; ++mask) {
        QElement x;
        for (std::size_t i = 0; i < words_.size(); ++i)
          if (mask >> i & 1u) x.insert(words_[i]);
        out.push_back(std::move(x));
      }
      return out;
    }
    out.push_back(bottom());
    for (const Word& w : words_) out.push_back({w});
    QElement letters;
    for (std::uint16_t g = 0; g < generators_.size(); ++g) letters.insert(Word{g});
    out.push_back(std::move(letters));
    return out;
  }

  bool population_is_exhaustive(std::size_t exhaustive_limit = 8) const { return words_.size() <= exhaustive_limit; }

 private:
  ActionQuantale() = default;

  std::vector<std::string> generators_;
  std::size_t bound_ = 3;
  std::vector<Word> words_;
};

/// The letterwise lift of a letter map to words, extended pointwise to sets of words.
inline QuantaleMap letterwise_lift(std::vector<std::uint16_t> letter_image) {
  return [table = std::move(letter_image)](const QElement& x) {
    QElement out;
    for (const Word& w : x) {
      Word v;
      v.reserve(w.size());
      for (auto c : w) v.push_back(table.at(c));
      out.insert(std::move(v));
    }
    return out;
  };
}

inline void require_matching_generators(const DynamicAlgebra& alg, const ActionQuantale& q) {
  std::set<std::string> a, b(q.generators().begin(), q.generators().end());
  for (const auto& l : alg.actions()) a.insert(l.name);
  if (a != b || q.generators().size() != alg.actions().size())
    throw Error(Errc::generator_mismatch, "quantale generators differ from the algebra's actions");
}

/// f'_A lifted letterwise for every agent of the algebra.
inline std::map<std::string, QuantaleMap> lift_action_appearance(const DynamicAlgebra& alg, const ActionQuantale& q) {
  require_matching_generators(alg, q);
  std::map<std::string, QuantaleMap> out;
  for (const auto& agent : alg.mama().agents()) {
    std::vector<std::uint16_t> table(q.generators().size());
    for (std::size_t i = 0; i < q.generators().size(); ++i)
      table[i] = q.index(alg.action_seen_by(agent, q.generators()[i]));
    out.emplace(agent, letterwise_lift(std::move(table)));
  }
  return out;
}

struct LawFailure {
  std::string law;
  std::string witness;
};

struct QuantaleReport {
  bool exhaustive = false;
  bool non_paranoid_mode = false;
  std::vector<LawFailure> failures;
  /// Whether the stricter equalities 1 = f'(1) and f'(a.b) = f'(a).f'(b) hold, whatever the mode.
  bool non_paranoid_holds = true;
  std::size_t skipped_pairs = 0;  // lax-composition instances whose right side leaves the carrier

  bool passed() const { return failures.empty(); }
};

/// Quantale laws on the carrier plus, per agent, join preservation of the lift and the
/// optimistically paranoid laws 1 <= f'(1) and f'(a.b) <= f'(a).f'(b). With `non_paranoid`
/// the equalities become mandatory.
inline QuantaleReport check_epistemic_quantale(const ActionQuantale& q, const std::map<std::string, QuantaleMap>& lifts,
                                               bool non_paranoid = false) {
  QuantaleReport r;
  r.non_paranoid_mode = non_paranoid;
  r.exhaustive = q.population_is_exhaustive();
  const auto pop = q.population();
  auto fail = [&](std::string law, std::string witness) {
    if (r.failures.size() < 64) r.failures.push_back({std::move(law), std::move(witness)});
  };

  for (const auto& x : pop) {
    if (q.compose(q.unit(), x) != x || q.compose(x, q.unit()) != x) fail("unit", q.format(x));
    for (const auto& y : pop) {
      if (!q.composable(x, y)) continue;
      const QElement xy = q.compose(x, y);
      for (const auto& z : pop) {
        if (q.composable(xy, z) && q.composable(y, z)) {
          if (q.compose(xy, z) != q.compose(x, q.compose(y, z)))
            fail("associativity", q.format(x) + ", " + q.format(y) + ", " + q.format(z));
        }
        const QElement yz = ActionQuantale::join(y, z);
        if (q.composable(x, yz) && q.compose(x, yz) != ActionQuantale::join(xy, q.compose(x, z)))
          fail("left distributivity", q.format(x) + ", " + q.format(y) + ", " + q.format(z));
        if (q.composable(yz, x) && q.composable(y, x) && q.composable(z, x) &&
            q.compose(yz, x) != ActionQuantale::join(q.compose(y, x), q.compose(z, x)))
          fail("right distributivity", q.format(y) + ", " + q.format(z) + ", " + q.format(x));
      }
    }
  }

  for (const auto& [agent, f] : lifts) {
    if (!f(q.bottom()).empty()) fail("lift preserves bottom", agent);
    const QElement f_unit = f(q.unit());
    if (!f_unit.count(Word{})) fail("1 <= f'(1)", agent + ": f'(1) = " + q.format(f_unit));
    if (f_unit != q.unit()) {
      r.non_paranoid_holds = false;
      if (non_paranoid) fail("1 = f'(1)", agent + ": f'(1) = " + q.format(f_unit));
    }
    for (const auto& x : pop) {
      const QElement fx = f(x);
      for (const auto& y : pop) {
        const QElement fy = f(y);
        if (f(ActionQuantale::join(x, y)) != ActionQuantale::join(fx, fy))
          fail("lift preserves joins", agent + ": " + q.format(x) + ", " + q.format(y));
        if (!q.composable(x, y)) continue;
        if (!q.composable(fx, fy)) {
          ++r.skipped_pairs;
          continue;
        }
        const QElement lhs = f(q.compose(x, y));
        const QElement rhs = q.compose(fx, fy);
        if (!std::includes(rhs.begin(), rhs.end(), lhs.begin(), lhs.end()))
          fail("f'(a.b) <= f'(a).f'(b)", agent + ": " + q.format(x) + ", " + q.format(y));
        if (lhs != rhs) {
          r.non_paranoid_holds = false;
          if (non_paranoid) fail("f'(a.b) = f'(a).f'(b)", agent + ": " + q.format(x) + ", " + q.format(y));
        }
      }
    }
  }
  return r;
}

using ActFn = std::function<Element(Element, const QElement&)>;

/// The two-sorted presentation: the proposition MAMA, the action quantale with lifted
/// appearances, and the binary action h(l, q). The remaining fields carry what is needed to
/// rebuild the indexed algebra.
struct EpistemicSystemView {
  Mama mama;
  ActionQuantale quantale;
  std::map<std::string, QuantaleMap> lifts;
  ActFn act;
  std::vector<ActionLabel> actions;
  ActionAppearance action_appearance;
  std::vector<Element> facts;
};

/// h(l, S) = join over words w in S of h_{w_k}(...h_{w_1}(l)).
inline EpistemicSystemView indexed_to_binary(const DynamicAlgebra& alg, const ActionQuantale& q) {
  require_matching_generators(alg, q);
  std::vector<LatticeMap> letters;
  for (const auto& g : q.generators()) letters.push_back(alg.update(g));
  LatticePtr lat = alg.lattice();
  ActFn act = [lat, letters = std::move(letters)](Element l, const QElement& x) {
    Element acc = lat->bottom();
    for (const Word& w : x) {
      Element cur = l;
      for (auto c : w) cur = letters[c](cur);
      acc = lat->join(acc, cur);
    }
    return acc;
  };
  return {alg.mama(), q, lift_action_appearance(alg, q), std::move(act), alg.actions(), alg.action_appearance(),
          alg.facts()};
}

/// Recovers h_a(l) = h(l, {a}) for every generator and rebuilds (and revalidates) the indexed algebra.
inline DynamicAlgebra binary_to_indexed(const EpistemicSystemView& view, const DynamicOptions& options = {}) {
  const LatticePtr& lat = view.mama.lattice();
  std::vector<ActionSpec> specs;
  for (const auto& label : view.actions) {
    const QElement x = view.quantale.letter(label.name);
    std::vector<Element> table(lat->size());
    for (Element l : lat->elements()) table[l.id] = view.act(l, x);
    specs.push_back({label, LatticeMap(lat, std::move(table)), std::nullopt});
  }
  return DynamicAlgebra::build(view.mama, std::move(specs), view.action_appearance, view.facts, options);
}

struct SystemOptions {
  bool non_paranoid = false;
  bool full_lattice_axioms = false;
};

struct SystemReport {
  bool exhaustive = false;
  std::vector<LawFailure> module_failures;
  QuantaleReport quantale;
  std::optional<AxiomReport> axioms;
  std::string rebuild_error;

  bool passed() const {
    return module_failures.empty() && quantale.passed() && rebuild_error.empty() && axioms && axioms->ok();
  }
};

/// Module laws h(l, join S_i) = join h(l, S_i), h(l, 1) = l, h(l, a.b) = h(h(l, a), b); join
/// preservation in l and the lifted permutation f_A h(l, a) <= h(f_A(l), f'_A(a)); the indexed
/// algebra's axioms; and the epistemic-quantale laws.
inline SystemReport check_epistemic_system(const EpistemicSystemView& view, const SystemOptions& options = {}) {
  SystemReport r;
  const ActionQuantale& q = view.quantale;
  const FiniteLattice& lat = *view.mama.lattice();
  r.exhaustive = q.population_is_exhaustive();
  const auto pop = q.population();
  auto fail = [&](std::string law, std::string witness) {
    if (r.module_failures.size() < 64) r.module_failures.push_back({std::move(law), std::move(witness)});
  };
  auto at = [&](Element l, const QElement& x) { return "l = " + lat.name(l) + ", q = " + q.format(x); };

  for (Element l : lat.elements()) {
    if (view.act(l, q.unit()) != l) fail("h(l, 1) = l", at(l, q.unit()));
    if (view.act(l, q.bottom()) != lat.bottom()) fail("h(l, 0) = bottom", at(l, q.bottom()));
    for (const auto& x : pop) {
      const Element hx = view.act(l, x);
      for (const auto& y : pop) {
        if (view.act(l, ActionQuantale::join(x, y)) != lat.join(hx, view.act(l, y)))
          fail("h(l, a \\/ b) = h(l, a) \\/ h(l, b)", at(l, x) + ", " + q.format(y));
        if (q.composable(x, y) && view.act(l, q.compose(x, y)) != view.act(hx, y))
          fail("h(l, a.b) = h(h(l, a), b)", at(l, x) + ", " + q.format(y));
      }
      for (const auto& [agent, f_prime] : view.lifts) {
        const LatticeMap& f = view.mama.appearance_map(agent);
        if (!lat.leq(f(hx), view.act(f(l), f_prime(x))))
          fail("f_A h(l, a) <= h(f_A(l), f'_A(a))", agent + ": " + at(l, x));
      }
    }
  }
  for (const auto& x : pop) {
    if (view.act(lat.bottom(), x) != lat.bottom()) fail("h(bottom, a) = bottom", q.format(x));
    for (Element l : lat.elements())
      for (Element m : lat.elements())
        if (m.id > l.id && view.act(lat.join(l, m), x) != lat.join(view.act(l, x), view.act(m, x)))
          fail("h(l \\/ m, a) = h(l, a) \\/ h(m, a)", at(l, x) + ", m = " + lat.name(m));
  }

  try {
    DynamicAlgebra rebuilt = binary_to_indexed(view, {options.full_lattice_axioms});
    r.axioms = AxiomReport{};
  } catch (const AxiomViolation& e) {
    r.axioms = e.report();
  } catch (const Error& e) {
    r.rebuild_error = e.what();
  }
  r.quantale = check_epistemic_quantale(q, view.lifts, options.non_paranoid);
  return r;
}

}  // namespace adjoint
