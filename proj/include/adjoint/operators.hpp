#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adjoint/error.hpp"
#include "adjoint/lattice.hpp"

namespace adjoint {

/// Declared flavor of a map. Flags combine: the identity is both.
enum class MapKind : std::uint8_t {
  unclassified = 0,
  join_preserving = 1,
  meet_preserving = 2,
  both = 3,
};

constexpr MapKind operator&(MapKind a, MapKind b) {
  return static_cast<MapKind>(static_cast<std::uint8_t>(a) & static_cast<std::uint8_t>(b));
}
constexpr MapKind operator|(MapKind a, MapKind b) {
  return static_cast<MapKind>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
constexpr bool has(MapKind k, MapKind flag) { return (k & flag) == flag; }

/// A total endo-map on a finite lattice, stored as an image table.
class LatticeMap {
 public:
  LatticeMap(LatticePtr lattice, std::vector<Element> values, MapKind kind = MapKind::unclassified)
      : lattice_(std::move(lattice)), values_(std::move(values)), kind_(kind) {
    if (values_.size() != lattice_->size())
      throw Error(Errc::foreign_element, "map table has " + std::to_string(values_.size()) + " entries for a " +
                                             std::to_string(lattice_->size()) + "-element lattice");
    for (Element v : values_) lattice_->check(v);
  }

  Element operator()(Element x) const {
    lattice_->check(x);
    return values_[x.id];
  }

  const LatticePtr& lattice() const noexcept { return lattice_; }
  const std::vector<Element>& values() const noexcept { return values_; }
  MapKind kind() const noexcept { return kind_; }
  bool join_preserving() const noexcept { return has(kind_, MapKind::join_preserving); }
  bool meet_preserving() const noexcept { return has(kind_, MapKind::meet_preserving); }

  /// Same table, different declared flavor. Callers use the checked `as_*` helpers.
  LatticeMap with_kind(MapKind kind) const { return LatticeMap(lattice_, values_, kind); }

  /// Table equality; the flavor is bookkeeping.
  friend bool operator==(const LatticeMap& a, const LatticeMap& b) {
    return a.lattice_ == b.lattice_ && a.values_ == b.values_;
  }

 private:
  LatticePtr lattice_;
  std::vector<Element> values_;
  MapKind kind_;
};

/// Why a map fails to preserve joins (or meets): either the unit law at bottom (top),
/// or a binary law at the pair (a, b).
struct PreservationFailure {
  bool at_unit = false;
  Element a{};
  Element b{};

  friend bool operator==(const PreservationFailure&, const PreservationFailure&) = default;
};

/// A pair (b, b') on which "left(b) <= b' iff b <= right(b')" fails.
struct AdjunctionFailure {
  Element b{};
  Element b_prime{};

  friend bool operator==(const AdjunctionFailure&, const AdjunctionFailure&) = default;
};

struct AdjointPair {
  LatticeMap left;   // join-preserving
  LatticeMap right;  // meet-preserving
};

inline void require_same_lattice(const LatticeMap& f, const LatticeMap& g) {
  if (f.lattice() != g.lattice()) throw Error(Errc::lattice_mismatch, "maps live on different lattices");
}

inline LatticeMap identity_map(const LatticePtr& l) {
  std::vector<Element> values(l->elements().begin(), l->elements().end());
  return LatticeMap(l, std::move(values), MapKind::both);
}

inline LatticeMap constant_map(const LatticePtr& l, Element value) {
  l->check(value);
  MapKind kind = MapKind::unclassified;
  if (value == l->bottom()) kind = kind | MapKind::join_preserving;
  if (value == l->top()) kind = kind | MapKind::meet_preserving;
  return LatticeMap(l, std::vector<Element>(l->size(), value), kind);
}

inline std::optional<PreservationFailure> validate_join_preserving(const LatticeMap& f) {
  const FiniteLattice& l = *f.lattice();
  if (f(l.bottom()) != l.bottom()) return PreservationFailure{true, l.bottom(), l.bottom()};
  for (Element a : l.elements())
    for (Element b : l.elements())
      if (b.id > a.id && f(l.join(a, b)) != l.join(f(a), f(b))) return PreservationFailure{false, a, b};
  return std::nullopt;
}

inline std::optional<PreservationFailure> validate_meet_preserving(const LatticeMap& g) {
  const FiniteLattice& l = *g.lattice();
  if (g(l.top()) != l.top()) return PreservationFailure{true, l.top(), l.top()};
  for (Element a : l.elements())
    for (Element b : l.elements())
      if (b.id > a.id && g(l.meet(a, b)) != l.meet(g(a), g(b))) return PreservationFailure{false, a, b};
  return std::nullopt;
}

inline std::string describe(const FiniteLattice& l, const PreservationFailure& p, bool joins) {
  if (p.at_unit) return joins ? "f(bottom) != bottom" : "g(top) != top";
  return std::string(joins ? "join" : "meet") + " of (" + l.name(p.a) + ", " + l.name(p.b) + ") not preserved";
}

/// Checks the join laws and tags the map; throws NotJoinPreserving with the witness otherwise.
inline LatticeMap as_join_preserving(const LatticeMap& f) {
  if (f.join_preserving()) return f;
  if (auto bad = validate_join_preserving(f))
    throw Error(Errc::not_join_preserving, describe(*f.lattice(), *bad, true));
  return f.with_kind(f.kind() | MapKind::join_preserving);
}

inline LatticeMap as_meet_preserving(const LatticeMap& g) {
  if (g.meet_preserving()) return g;
  if (auto bad = validate_meet_preserving(g))
    throw Error(Errc::not_meet_preserving, describe(*g.lattice(), *bad, false));
  return g.with_kind(g.kind() | MapKind::meet_preserving);
}

/// Extends an assignment on the join-irreducibles to the whole lattice:
/// f(x) = join{ assignment(j) | j join-irreducible, j <= x }.
inline LatticeMap map_from_generators(const LatticePtr& lattice, std::span<const std::pair<Element, Element>> assignments) {
  const FiniteLattice& l = *lattice;
  const auto& gens = l.join_irreducibles();
  std::vector<std::optional<Element>> image(l.size());
  for (const auto& [gen, value] : assignments) {
    l.check(gen);
    l.check(value);
    if (!l.is_join_irreducible(gen))
      throw Error(Errc::not_a_generator, "'" + l.name(gen) + "' is not join-irreducible");
    if (image[gen.id]) throw Error(Errc::duplicate_generator, "'" + l.name(gen) + "' assigned twice");
    image[gen.id] = value;
  }
  for (Element g : gens)
    if (!image[g.id]) throw Error(Errc::missing_generator, "no image for generator '" + l.name(g) + "'");

  std::vector<Element> values(l.size(), l.bottom());
  for (Element x : l.elements())
    for (Element g : gens)
      if (l.leq(g, x)) values[x.id] = l.join(values[x.id], *image[g.id]);
  // Distributive carriers make this join-preserving; elsewhere the extension must be checked.
  LatticeMap f(lattice, std::move(values));
  if (l.is_distributive()) return f.with_kind(MapKind::join_preserving);
  return as_join_preserving(f);
}

inline std::optional<AdjunctionFailure> verify_adjunction(const LatticeMap& f, const LatticeMap& g) {
  require_same_lattice(f, g);
  const FiniteLattice& l = *f.lattice();
  for (Element b : l.elements())
    for (Element bp : l.elements())
      if (l.leq(f(b), bp) != l.leq(b, g(bp))) return AdjunctionFailure{b, bp};
  return std::nullopt;
}

/// f*(b) = join{ b' | f(b') <= b }.
inline AdjointPair right_adjoint(const LatticeMap& f) {
  if (!f.join_preserving()) throw Error(Errc::not_join_preserving, "right adjoint needs a join-preserving map");
  const FiniteLattice& l = *f.lattice();
  std::vector<Element> values(l.size());
  for (Element b : l.elements()) {
    Element acc = l.bottom();
    for (Element bp : l.elements())
      if (l.leq(f(bp), b)) acc = l.join(acc, bp);
    values[b.id] = acc;
  }
  return {f, LatticeMap(f.lattice(), std::move(values), MapKind::meet_preserving)};
}

/// g*(b) = meet{ b' | b <= g(b') }.
inline AdjointPair left_adjoint(const LatticeMap& g) {
  if (!g.meet_preserving()) throw Error(Errc::not_meet_preserving, "left adjoint needs a meet-preserving map");
  const FiniteLattice& l = *g.lattice();
  std::vector<Element> values(l.size());
  for (Element b : l.elements()) {
    Element acc = l.top();
    for (Element bp : l.elements())
      if (l.leq(b, g(bp))) acc = l.meet(acc, bp);
    values[b.id] = acc;
  }
  return {LatticeMap(g.lattice(), std::move(values), MapKind::join_preserving), g};
}

/// g(b) = not f(not b), with the Boolean complement. Join-preserving maps dualize to meet-preserving ones.
inline LatticeMap de_morgan_dual(const LatticeMap& f) {
  const FiniteLattice& l = *f.lattice();
  if (!l.is_boolean()) throw Error(Errc::not_boolean, "de Morgan dual needs a Boolean carrier");
  std::vector<Element> values(l.size());
  for (Element b : l.elements()) values[b.id] = l.complement(f(l.complement(b)));
  MapKind kind = MapKind::unclassified;
  if (f.join_preserving()) kind = kind | MapKind::meet_preserving;
  if (f.meet_preserving()) kind = kind | MapKind::join_preserving;
  return LatticeMap(f.lattice(), std::move(values), kind);
}

/// Same construction with Heyting negation; defined on any distributive carrier. The flavor is
/// not propagated because negation need not be involutive.
inline LatticeMap heyting_dual(const LatticeMap& f) {
  const FiniteLattice& l = *f.lattice();
  if (!l.is_distributive()) throw Error(Errc::not_distributive, "Heyting dual needs a distributive carrier");
  std::vector<Element> values(l.size());
  for (Element b : l.elements()) values[b.id] = l.heyting_negation(f(l.heyting_negation(b)));
  return LatticeMap(f.lattice(), std::move(values));
}

/// (f . g)(x) = f(g(x)).
inline LatticeMap compose(const LatticeMap& f, const LatticeMap& g) {
  require_same_lattice(f, g);
  std::vector<Element> values(f.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f.values()[g.values()[i].id];
  return LatticeMap(f.lattice(), std::move(values), f.kind() & g.kind());
}

inline LatticeMap pointwise_join(const LatticeMap& f, const LatticeMap& g) {
  require_same_lattice(f, g);
  const FiniteLattice& l = *f.lattice();
  std::vector<Element> values(l.size());
  for (Element x : l.elements()) values[x.id] = l.join(f(x), g(x));
  return LatticeMap(f.lattice(), std::move(values), f.kind() & g.kind() & MapKind::join_preserving);
}

inline LatticeMap pointwise_meet(const LatticeMap& f, const LatticeMap& g) {
  require_same_lattice(f, g);
  const FiniteLattice& l = *f.lattice();
  std::vector<Element> values(l.size());
  for (Element x : l.elements()) values[x.id] = l.meet(f(x), g(x));
  return LatticeMap(f.lattice(), std::move(values), f.kind() & g.kind() & MapKind::meet_preserving);
}

/// f^i; f^0 is the identity.
inline LatticeMap power(const LatticeMap& f, unsigned i) {
  LatticeMap acc = identity_map(f.lattice());
  for (unsigned k = 0; k < i; ++k) acc = compose(f, acc);
  return acc;
}

namespace detail {

/// Iterates F_1 = f, F_{k+1} = f op (f . F_k) to a fixpoint; `op` is pointwise join or meet.
template <class Combine>
LatticeMap iterate_closure(const LatticeMap& f, Combine combine) {
  const FiniteLattice& l = *f.lattice();
  const std::size_t cap = std::max<std::size_t>(1, l.size() * std::max<std::size_t>(1, l.height())) + 1;
  LatticeMap current = f;
  for (std::size_t k = 0; k < cap; ++k) {
    LatticeMap next = combine(f, compose(f, current));
    if (next == current) return current;
    current = std::move(next);
  }
  throw Error(Errc::internal, "fixpoint iteration exceeded |L|*height(L) steps");
}

}  // namespace detail

/// join_{i>=1} f^i.
inline LatticeMap lfp_join(const LatticeMap& f) {
  if (!f.join_preserving()) throw Error(Errc::not_join_preserving, "lfp_join needs a join-preserving map");
  return detail::iterate_closure(f, [](const LatticeMap& a, const LatticeMap& b) { return pointwise_join(a, b); });
}

/// meet_{i>=1} g^i.
inline LatticeMap gfp_meet(const LatticeMap& g) {
  if (!g.meet_preserving()) throw Error(Errc::not_meet_preserving, "gfp_meet needs a meet-preserving map");
  return detail::iterate_closure(g, [](const LatticeMap& a, const LatticeMap& b) { return pointwise_meet(a, b); });
}

/// join_{i>=0} f^i.
inline LatticeMap lfp_join_reflexive(const LatticeMap& f) {
  return pointwise_join(identity_map(f.lattice()), lfp_join(f));
}

/// meet_{i>=0} g^i.
inline LatticeMap gfp_meet_reflexive(const LatticeMap& g) {
  return pointwise_meet(identity_map(g.lattice()), gfp_meet(g));
}

/// Compares f*(b) with not g*(not b) for g the dual of f, using Heyting negation (which is the
/// complement on Boolean carriers). Returns the first b where they differ. The comparison is
/// only defined when the dual is meet-preserving; otherwise NotMeetPreserving propagates.
inline std::optional<Element> demorgan_lift_gap(const LatticeMap& f) {
  const FiniteLattice& l = *f.lattice();
  const LatticeMap f_star = right_adjoint(f).right;
  const LatticeMap g = l.is_boolean() ? de_morgan_dual(f) : as_meet_preserving(heyting_dual(f));
  const LatticeMap g_star = left_adjoint(g).left;
  for (Element b : l.elements())
    if (f_star(b) != l.heyting_negation(g_star(l.heyting_negation(b)))) return b;
  return std::nullopt;
}

/// On a Boolean carrier, the adjoints of a map and of its de Morgan dual are de Morgan duals.
inline std::optional<Element> check_demorgan_lift(const LatticeMap& f) {
  if (!f.lattice()->is_boolean()) throw Error(Errc::not_boolean, "de Morgan lift is stated for Boolean carriers");
  return demorgan_lift_gap(f);
}

}  // namespace adjoint
