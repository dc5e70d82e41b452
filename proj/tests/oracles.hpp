#pragma once

// Reference computations that avoid the library's tables: lattices are families of
// bitsets, maps are plain vectors, adjoints come straight from their defining formulas.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adjoint/adjoint.hpp"

namespace oracle {

using Mask = std::uint32_t;

/// A lattice given as a Moore family: subsets of a small ground set, closed under
/// intersection and containing the full set. Order is inclusion.
struct SetLattice {
  std::vector<Mask> members;  // sorted by popcount, then value

  std::size_t size() const { return members.size(); }

  std::size_t index(Mask m) const {
    return static_cast<std::size_t>(std::find(members.begin(), members.end(), m) - members.begin());
  }

  /// Least member containing m.
  Mask close(Mask m) const {
    Mask best = members.back();
    for (Mask x : members)
      if ((x & m) == m) best &= x;
    return best;
  }

  Mask join(Mask a, Mask b) const { return close(a | b); }
  Mask meet(Mask a, Mask b) const { return a & b; }
  static bool leq(Mask a, Mask b) { return (a & ~b) == 0; }
};

inline std::string mask_label(Mask m) { return "s" + std::to_string(m); }

inline SetLattice random_set_lattice(std::mt19937& rng, unsigned ground, std::size_t max_size) {
  const Mask full = (Mask{1} << ground) - 1;
  std::uniform_int_distribution<Mask> pick(0, full);
  std::set<Mask> fam{full};
  const int tries = std::uniform_int_distribution<int>(1, 8)(rng);
  for (int i = 0; i < tries; ++i) {
    std::set<Mask> next = fam;
    next.insert(pick(rng));
    bool grew = true;
    while (grew) {
      grew = false;
      for (Mask a : std::vector<Mask>(next.begin(), next.end()))
        for (Mask b : std::vector<Mask>(next.begin(), next.end()))
          if (next.insert(a & b).second) grew = true;
    }
    if (next.size() > max_size) break;
    fam = std::move(next);
  }
  SetLattice l{{fam.begin(), fam.end()}};
  std::sort(l.members.begin(), l.members.end(), [](Mask a, Mask b) {
    const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  return l;
}

/// The same lattice as a library object, labelled "s<mask>", with cover-free order pairs.
inline adjoint::LatticePtr to_library(const SetLattice& s) {
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> order;
  for (Mask m : s.members) labels.push_back(mask_label(m));
  for (Mask a : s.members)
    for (Mask b : s.members)
      if (a != b && SetLattice::leq(a, b)) order.emplace_back(mask_label(a), mask_label(b));
  return adjoint::build_from_order(labels, order);
}

/// A map on a set lattice, as member -> member.
using SetMap = std::map<Mask, Mask>;

/// Joins of "step" maps x -> (x <= a ? bottom : b), each of which preserves joins.
inline SetMap random_join_map(std::mt19937& rng, const SetLattice& l) {
  const Mask bottom = l.members.front();
  std::uniform_int_distribution<std::size_t> pick(0, l.size() - 1);
  SetMap f;
  for (Mask x : l.members) f[x] = bottom;
  const int steps = std::uniform_int_distribution<int>(0, 4)(rng);
  for (int i = 0; i < steps; ++i) {
    const Mask a = l.members[pick(rng)];
    const Mask b = l.members[pick(rng)];
    for (Mask x : l.members)
      if (!SetLattice::leq(x, a)) f[x] = l.join(f[x], b);
  }
  return f;
}

/// f*(b) = join of every b' with f(b') <= b.
inline SetMap right_adjoint(const SetLattice& l, const SetMap& f) {
  SetMap g;
  for (Mask b : l.members) {
    Mask acc = l.members.front();
    for (Mask x : l.members)
      if (SetLattice::leq(f.at(x), b)) acc = l.join(acc, x);
    g[b] = acc;
  }
  return g;
}

inline adjoint::LatticeMap to_library(const adjoint::LatticePtr& lib, const SetMap& f) {
  std::vector<adjoint::Element> values(lib->size());
  for (const auto& [x, y] : f) values[lib->find(mask_label(x))->id] = *lib->find(mask_label(y));
  return adjoint::LatticeMap(lib, std::move(values));
}

// ---------------------------------------------------------------------------------------
// Powerset carriers: element ids are bitmasks over the worlds.

/// Random relation-induced appearance: f({w}) = R(w).
inline std::vector<Mask> random_relation(std::mt19937& rng, unsigned worlds) {
  std::uniform_int_distribution<Mask> pick(0, (Mask{1} << worlds) - 1);
  std::vector<Mask> r(worlds);
  for (auto& x : r) x = pick(rng);
  return r;
}

inline Mask image(const std::vector<Mask>& rel, Mask x) {
  Mask out = 0;
  for (std::size_t w = 0; w < rel.size(); ++w)
    if (x >> w & 1) out |= rel[w];
  return out;
}

/// Box: {w | R(w) is inside x}.
inline Mask box(const std::vector<Mask>& rel, Mask x) {
  Mask out = 0;
  for (std::size_t w = 0; w < rel.size(); ++w)
    if ((rel[w] & ~x) == 0) out |= Mask{1} << w;
  return out;
}

inline adjoint::LatticeMap relation_map(const adjoint::LatticePtr& l, const std::vector<Mask>& rel) {
  std::vector<adjoint::Element> v(l->size());
  for (Mask x = 0; x < l->size(); ++x) v[x] = adjoint::Element{image(rel, x)};
  return adjoint::LatticeMap(l, std::move(v));
}

inline std::vector<std::string> world_names(unsigned k) {
  std::vector<std::string> w;
  for (unsigned i = 0; i < k; ++i) w.push_back("w" + std::to_string(i));
  return w;
}

// ---------------------------------------------------------------------------------------
// Kripke evaluation of terms, for scenarios whose carrier is a powerset of worlds.

struct Kripke {
  std::vector<std::string> worlds;
  std::map<std::string, std::vector<Mask>> relation;  // agent -> successors per world
  std::map<std::string, Mask> atoms;

  Mask full() const { return (Mask{1} << worlds.size()) - 1; }

  Mask eval(const adjoint::Term& t) const {
    using adjoint::TermKind;
    switch (t.kind()) {
      case TermKind::atom: return atoms.at(t.name());
      case TermKind::bottom: return 0;
      case TermKind::top: return full();
      case TermKind::join: return eval(t.left()) | eval(t.right());
      case TermKind::meet: return eval(t.left()) & eval(t.right());
      case TermKind::negation: return full() & ~eval(t.arg());
      case TermKind::appearance: return image(relation.at(t.agent()), eval(t.arg()));
      case TermKind::information: return box(relation.at(t.agent()), eval(t.arg()));
      case TermKind::knowledge: {
        const Mask x = eval(t.arg());
        return box(relation.at(t.agent()), x) & x;
      }
      case TermKind::belief: {
        const Mask nx = full() & ~eval(t.arg());
        return full() & ~(box(relation.at(t.agent()), nx) & nx);
      }
      case TermKind::common_knowledge: {
        // Worlds from which every path along the group's relations stays inside x.
        const Mask x = eval(t.arg());
        auto everyone = [&](Mask y) {
          Mask out = full();
          for (const auto& a : t.group()) out &= box(relation.at(a), y);
          return out;
        };
        if (t.depth() > 0) {
          Mask acc = x, layer = x;
          for (unsigned i = 0; i < t.depth(); ++i) acc &= (layer = everyone(layer));
          return acc;
        }
        Mask reach_ok = x;
        for (std::size_t w = 0; w < worlds.size(); ++w) {
          Mask seen = 0, frontier = Mask{1} << w;
          while (frontier) {
            Mask next = 0;
            for (std::size_t v = 0; v < worlds.size(); ++v)
              if (frontier >> v & 1)
                for (const auto& a : t.group()) next |= relation.at(a)[v];
            frontier = next & ~seen;
            seen |= next;
          }
          if ((seen & ~x) != 0) reach_ok &= ~(Mask{1} << w);
        }
        return reach_ok;
      }
      default: throw std::logic_error("no actions in the Kripke oracle");
    }
  }
};

/// Reads worlds, atoms and accessibility straight from a parsed document.
inline Kripke kripke_from(const adjoint::ScenarioDoc& doc) {
  Kripke k;
  k.worlds = std::get<adjoint::WorldsCarrier>(*doc.carrier).worlds;
  auto bit = [&](const std::string& w) {
    return Mask{1} << (std::find(k.worlds.begin(), k.worlds.end(), w) - k.worlds.begin());
  };
  for (const auto& w : k.worlds) k.atoms[w] = bit(w);
  for (const auto& a : doc.atoms) {
    Mask m = 0;
    for (const auto& w : *a.denotes) m |= bit(w);
    k.atoms[a.name] = m;
  }
  for (const auto& a : doc.agents) {
    std::vector<Mask> rel(k.worlds.size(), 0);
    for (const auto& s : a.sees) {
      Mask m = 0;
      for (const auto& w : s.targets) m |= bit(w);
      rel[std::countr_zero(bit(s.source))] = m;
    }
    k.relation[a.name] = rel;
  }
  return k;
}

inline std::string read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string s;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) s.append(buf, n);
  std::fclose(f);
  return s;
}

inline std::string scenario_path(const std::string& name) { return std::string(ADJOINT_SCENARIO_DIR) + "/" + name; }

}  // namespace oracle
