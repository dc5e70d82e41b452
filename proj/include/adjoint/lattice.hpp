#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adjoint/error.hpp"

namespace adjoint {

/// An element of a finite lattice. Ids are dense, 0..size()-1, and index every table.
struct Element {
  std::uint32_t id = 0;

  friend constexpr auto operator<=>(const Element&, const Element&) = default;
};

/// Size caps for desk-scale exhaustive checking.
struct LatticeLimits {
  std::size_t max_elements = 256;  // 2^16 order-table cells
  std::size_t max_worlds = 16;

  /// Defaults, with ADJOINT_KIT_MAX_LATTICE (an element count) overriding max_elements.
  static LatticeLimits from_environment() {
    LatticeLimits limits;
    if (const char* raw = std::getenv("ADJOINT_KIT_MAX_LATTICE")) {
      char* end = nullptr;
      const unsigned long long value = std::strtoull(raw, &end, 10);
      if (end != raw && *end == '\0' && value > 0) limits.max_elements = static_cast<std::size_t>(value);
    }
    return limits;
  }
};

struct Classification {
  bool is_distributive = false;
  bool is_boolean = false;
  std::optional<std::vector<Element>> complement_table;
};

class FiniteLattice;
using LatticePtr = std::shared_ptr<const FiniteLattice>;

/// A finite lattice with every join, meet and order query precomputed into dense tables.
/// Immutable after construction.
class FiniteLattice {
 public:
  std::size_t size() const noexcept { return names_.size(); }
  Element bottom() const noexcept { return bottom_; }
  Element top() const noexcept { return top_; }

  bool contains(Element e) const noexcept { return e.id < size(); }

  void check(Element e) const {
    if (!contains(e)) throw Error(Errc::foreign_element, "element id " + std::to_string(e.id) + " not in lattice");
  }

  bool leq(Element a, Element b) const { return leq_[cell(a, b)] != 0; }
  Element join(Element a, Element b) const { return join_[cell(a, b)]; }
  Element meet(Element a, Element b) const { return meet_[cell(a, b)]; }

  /// Least upper bound of `s`; the empty join is bottom.
  Element join(std::span<const Element> s) const {
    Element acc = bottom_;
    for (Element e : s) acc = join(acc, e);
    return acc;
  }

  /// Greatest lower bound of `s`; the empty meet is top.
  Element meet(std::span<const Element> s) const {
    Element acc = top_;
    for (Element e : s) acc = meet(acc, e);
    return acc;
  }

  auto elements() const {
    return std::views::iota(std::uint32_t{0}, static_cast<std::uint32_t>(size())) |
           std::views::transform([](std::uint32_t i) { return Element{i}; });
  }

  const std::string& name(Element e) const {
    check(e);
    return names_[e.id];
  }

  std::optional<Element> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool is_distributive() const noexcept { return classification_.is_distributive; }
  bool is_boolean() const noexcept { return classification_.is_boolean; }
  const Classification& classification() const noexcept { return classification_; }

  Element complement(Element e) const {
    check(e);
    if (!is_boolean()) throw Error(Errc::not_boolean, "complement requires a Boolean lattice");
    return (*classification_.complement_table)[e.id];
  }

  /// Relative pseudo-complement a -> b = join{x | x /\ a <= b}.
  Element implies(Element a, Element b) const {
    check(a);
    check(b);
    if (!is_distributive()) throw Error(Errc::not_distributive, "Heyting implication requires distributivity");
    Element acc = bottom_;
    for (Element x : elements())
      if (leq(meet(x, a), b)) acc = join(acc, x);
    return acc;
  }

  Element heyting_negation(Element a) const { return implies(a, bottom_); }

  const std::vector<Element>& join_irreducibles() const noexcept { return irreducibles_; }

  bool is_join_irreducible(Element e) const {
    return std::binary_search(irreducibles_.begin(), irreducibles_.end(), e);
  }

  /// Number of edges in a longest chain.
  std::size_t height() const noexcept { return height_; }

  /// World labels when this lattice was built as a powerset; element ids are then bitmasks.
  const std::optional<std::vector<std::string>>& worlds() const noexcept { return worlds_; }

 private:
  friend LatticePtr build_from_order(std::span<const std::string>,
                                     std::span<const std::pair<std::string, std::string>>, const LatticeLimits&);
  friend LatticePtr powerset_lattice(std::span<const std::string>, const LatticeLimits&);
  friend Classification classify(const FiniteLattice&);

  FiniteLattice() = default;

  std::size_t cell(Element a, Element b) const { return static_cast<std::size_t>(a.id) * size() + b.id; }

  void finish();

  std::vector<std::string> names_;
  std::unordered_map<std::string, Element> index_;
  std::vector<std::uint8_t> leq_;
  std::vector<Element> join_;
  std::vector<Element> meet_;
  Element bottom_{};
  Element top_{};
  Classification classification_;
  std::vector<Element> irreducibles_;
  std::size_t height_ = 0;
  std::optional<std::vector<std::string>> worlds_;
};

/// Exhaustive distributivity and complement scan.
inline Classification classify(const FiniteLattice& l) {
  Classification out;
  out.is_distributive = true;
  for (Element x : l.elements()) {
    for (Element y : l.elements()) {
      for (Element z : l.elements()) {
        if (l.meet(x, l.join(y, z)) != l.join(l.meet(x, y), l.meet(x, z))) {
          out.is_distributive = false;
          return out;
        }
      }
    }
  }
  // In a distributive lattice complements are unique when they exist.
  std::vector<Element> table(l.size());
  for (Element x : l.elements()) {
    bool found = false;
    for (Element y : l.elements()) {
      if (l.meet(x, y) == l.bottom() && l.join(x, y) == l.top()) {
        table[x.id] = y;
        found = true;
        break;
      }
    }
    if (!found) return out;
  }
  out.is_boolean = true;
  out.complement_table = std::move(table);
  return out;
}

inline void FiniteLattice::finish() {
  const std::size_t n = size();
  for (std::uint32_t i = 0; i < n; ++i) index_.emplace(names_[i], Element{i});

  classification_ = classify(*this);

  for (Element x : elements()) {
    if (x == bottom_) continue;
    bool irreducible = true;
    for (Element a : elements()) {
      if (a == x || !leq(a, x)) continue;
      for (Element b : elements()) {
        if (b == x || !leq(b, x)) continue;
        if (join(a, b) == x) {
          irreducible = false;
          break;
        }
      }
      if (!irreducible) break;
    }
    if (irreducible) irreducibles_.push_back(x);
  }

  // Longest chain: process elements by the number of elements below them.
  std::vector<std::size_t> below(n, 0);
  for (Element a : elements())
    for (Element b : elements())
      if (leq(b, a)) ++below[a.id];
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return below[a] < below[b]; });
  std::vector<std::size_t> chain(n, 0);
  for (std::uint32_t a : order) {
    for (std::uint32_t b : order) {
      if (b != a && leq(Element{b}, Element{a})) chain[a] = std::max(chain[a], chain[b] + 1);
    }
    height_ = std::max(height_, chain[a]);
  }
}

/// Builds a lattice from labels and generating order pairs (a <= b). The pairs are closed
/// reflexively and transitively before every join and meet is looked up.
inline LatticePtr build_from_order(std::span<const std::string> labels,
                                   std::span<const std::pair<std::string, std::string>> leq_pairs,
                                   const LatticeLimits& limits = {}) {
  const std::size_t n = labels.size();
  if (n == 0) throw Error(Errc::empty_carrier, "a lattice needs at least one element");
  if (n > limits.max_elements)
    throw Error(Errc::too_large,
                std::to_string(n) + " elements exceeds the cap of " + std::to_string(limits.max_elements));

  std::shared_ptr<FiniteLattice> l(new FiniteLattice());
  std::unordered_map<std::string, std::uint32_t> idx;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!idx.emplace(labels[i], i).second) throw Error(Errc::duplicate_label, "label '" + labels[i] + "' repeated");
    l->names_.push_back(labels[i]);
  }

  auto lookup = [&](const std::string& s) {
    auto it = idx.find(s);
    if (it == idx.end()) throw Error(Errc::unknown_label, "order pair mentions unknown label '" + s + "'");
    return it->second;
  };

  std::vector<std::uint8_t>& leq = l->leq_;
  leq.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
  for (const auto& [a, b] : leq_pairs) leq[lookup(a) * n + lookup(b)] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq[k * n + j]) leq[i * n + j] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (leq[i * n + j] && leq[j * n + i])
        throw Error(Errc::not_a_poset, "cycle between '" + labels[i] + "' and '" + labels[j] + "'");

  std::vector<std::size_t> below(n, 0), above(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (leq[j * n + i]) {
        ++below[i];
        ++above[j];
      }

  // The least upper bound, if it exists, is the upper bound with fewest elements below it.
  auto bound = [&](std::size_t a, std::size_t b, bool upper) -> std::optional<std::uint32_t> {
    auto ok = [&](std::size_t u) { return upper ? (leq[a * n + u] && leq[b * n + u]) : (leq[u * n + a] && leq[u * n + b]); };
    auto rel = [&](std::size_t x, std::size_t y) { return upper ? leq[x * n + y] != 0 : leq[y * n + x] != 0; };
    std::optional<std::size_t> best;
    for (std::size_t u = 0; u < n; ++u) {
      if (!ok(u)) continue;
      const auto rank = upper ? below[u] : above[u];
      if (!best || rank < (upper ? below[*best] : above[*best])) best = u;
    }
    if (!best) return std::nullopt;
    for (std::size_t u = 0; u < n; ++u)
      if (ok(u) && !rel(*best, u)) return std::nullopt;
    return static_cast<std::uint32_t>(*best);
  };

  l->join_.resize(n * n);
  l->meet_.resize(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      auto j = bound(a, b, true);
      if (!j) throw NotALattice(labels[a], labels[b], true);
      auto m = bound(a, b, false);
      if (!m) throw NotALattice(labels[a], labels[b], false);
      l->join_[a * n + b] = l->join_[b * n + a] = Element{*j};
      l->meet_[a * n + b] = l->meet_[b * n + a] = Element{*m};
    }
  }

  Element bot{0}, top{0};
  for (std::uint32_t i = 0; i < n; ++i) {
    bot = l->meet_[bot.id * n + i];
    top = l->join_[top.id * n + i];
  }
  l->bottom_ = bot;
  l->top_ = top;
  l->finish();
  return l;
}

/// All subsets of `worlds` ordered by inclusion. Element ids are the subset bitmasks, with
/// bit i standing for worlds[i].
inline LatticePtr powerset_lattice(std::span<const std::string> worlds, const LatticeLimits& limits = {}) {
  const std::size_t k = worlds.size();
  if (k > limits.max_worlds)
    throw Error(Errc::too_many_worlds,
                std::to_string(k) + " worlds exceeds the cap of " + std::to_string(limits.max_worlds));
  const std::size_t n = std::size_t{1} << k;
  if (n > limits.max_elements)
    throw Error(Errc::too_large, "powerset of " + std::to_string(k) + " worlds has " + std::to_string(n) +
                                     " elements, over the cap of " + std::to_string(limits.max_elements));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (worlds[i] == worlds[j]) throw Error(Errc::duplicate_label, "world '" + worlds[i] + "' repeated");

  std::shared_ptr<FiniteLattice> l(new FiniteLattice());
  l->worlds_ = std::vector<std::string>(worlds.begin(), worlds.end());
  for (std::uint32_t mask = 0; mask < n; ++mask) {
    std::string label = "{";
    bool first = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (!first) label += ",";
      label += worlds[i];
      first = false;
    }
    l->names_.push_back(label + "}");
  }
  l->leq_.resize(n * n);
  l->join_.resize(n * n);
  l->meet_.resize(n * n);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      l->leq_[a * n + b] = (a & ~b) == 0;
      l->join_[a * n + b] = Element{a | b};
      l->meet_[a * n + b] = Element{a & b};
    }
  }
  l->bottom_ = Element{0};
  l->top_ = Element{static_cast<std::uint32_t>(n - 1)};
  l->finish();
  return l;
}

}  // namespace adjoint
