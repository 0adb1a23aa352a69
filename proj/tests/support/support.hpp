#pragma once

// Test-only generators and brute-force reference implementations. Nothing
// here calls into the pruned or indexed code paths it is used to check.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "psh/abstract.hpp"
#include "psh/dsl.hpp"
#include "psh/model.hpp"
#include "psh/ops.hpp"
#include "psh/presheaf.hpp"
#include "psh/rng.hpp"

namespace psh::support {

inline std::string models_dir() { return PSH_MODELS_DIR; }

inline std::string model_path(const std::string& file) { return models_dir() + "/" + file; }

inline Model load_model(const std::string& file) {
  const std::string path = model_path(file);
  return parse_model(read_file(path), path);
}

inline Subset letters(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return Subset(std::move(names));
}

inline std::vector<Subset> power_set(const Subset& u) {
  std::vector<Subset> out;
  const std::size_t n = u.size();
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    std::vector<std::string> xs;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1u) xs.push_back(u.members()[i]);
    out.push_back(Subset(std::move(xs)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Subset random_subset(Rng& rng, const Subset& u) {
  std::vector<std::string> xs;
  for (const auto& x : u)
    if (rng.chance(1, 2)) xs.push_back(x);
  return Subset(std::move(xs));
}

// Alternating ∩/∪ saturation of seeds ∪ {∅, universe, singletons}.
inline std::set<Subset> brute_close(const Subset& universe, const std::vector<Subset>& seeds) {
  std::set<Subset> objs(seeds.begin(), seeds.end());
  objs.insert(Subset{});
  objs.insert(universe);
  for (const auto& x : universe) objs.insert(Subset{x});
  while (true) {
    std::set<Subset> next = objs;
    for (const auto& a : objs)
      for (const auto& b : objs) {
        next.insert(set_intersection(a, b));
        next.insert(set_union(a, b));
      }
    if (next == objs) return objs;
    objs = std::move(next);
  }
}

inline const Fiber& fiber_named(const std::vector<Fiber>& fibers, const std::string& x) {
  for (const auto& f : fibers)
    if (f.feature == x) return f;
  throw std::logic_error("no fiber " + x);
}

// Full product of fibers over u, as assignments.
inline std::vector<Assignment> product(const std::vector<Fiber>& fibers, const Subset& u) {
  std::vector<Assignment> out{Assignment(Subset{}, {})};
  std::vector<std::vector<std::pair<std::string, std::string>>> partial{{}};
  for (const auto& x : u) {
    std::vector<std::vector<std::pair<std::string, std::string>>> grown;
    for (const auto& p : partial)
      for (const auto& v : fiber_named(fibers, x).values) {
        auto q = p;
        q.emplace_back(x, v);
        grown.push_back(std::move(q));
      }
    partial = std::move(grown);
  }
  out.clear();
  for (auto& p : partial) out.push_back(Assignment::from_bindings(std::move(p)));
  return out;
}

inline std::vector<Fiber> fibers_of(const AssignmentPresheaf& p) {
  return {p.fibers().begin(), p.fibers().end()};
}

inline std::set<Assignment> as_set(const std::vector<Assignment>& v) { return {v.begin(), v.end()}; }

inline std::set<Assignment> brute_extensions(const AssignmentPresheaf& p, const Assignment& a,
                                             const Subset& v) {
  std::set<Assignment> out;
  for (const auto& b : p.sections(v))
    if (restrict_assignment(b, a.domain) == a) out.insert(b);
  return out;
}

inline std::vector<Subset> brute_blocking(const AssignmentPresheaf& p, const Assignment& a) {
  std::vector<Subset> blocked;
  for (const auto& w : p.family().objects())
    if (is_subobject(a.domain, w) && brute_extensions(p, a, w).empty()) blocked.push_back(w);
  std::vector<Subset> minimal;
  for (const auto& w : blocked) {
    bool has_smaller = false;
    for (const auto& z : blocked)
      if (z != w && is_subobject(z, w)) has_smaller = true;
    if (!has_smaller) minimal.push_back(w);
  }
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

// Per-object section sets, keyed by object.
using SectionMap = std::map<Subset, std::set<Assignment>>;

inline SectionMap sections_of(const AssignmentPresheaf& p) {
  SectionMap out;
  for (const auto& u : p.family().objects()) out[u] = as_set(p.sections(u));
  return out;
}

// Repeats one-step projection from every object to every subobject until
// nothing changes.
inline SectionMap brute_closure(const AssignmentPresheaf& p) {
  SectionMap s = sections_of(p);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [v, secs] : SectionMap(s))
      for (auto& [u, target] : s)
        if (is_subobject(u, v))
          for (const auto& b : secs) changed |= target.insert(restrict_assignment(b, u)).second;
  }
  return s;
}

// Random sections scattered over random objects; generally not closed.
inline AssignmentPresheaf random_fragment(std::uint64_t seed, std::size_t max_features = 4,
                                          std::size_t max_fiber = 3) {
  Rng rng(seed);
  const Subset u = letters(rng.between(1, max_features));
  std::vector<Fiber> fibers;
  for (const auto& x : u) {
    Fiber f{x, {}, {}};
    const auto n = rng.between(1, max_fiber);
    for (std::size_t i = 0; i < n; ++i) f.values.push_back("v" + std::to_string(i));
    fibers.push_back(std::move(f));
  }
  AssignmentPresheaf p(close_family(u), fibers);
  for (const auto& obj : power_set(u)) {
    if (!rng.chance(1, 2)) continue;
    for (const auto& a : product(fibers, obj))
      if (rng.chance(1, 3)) p.add(a);
  }
  return p;
}

// Every component family, filtered by naturality squares checked directly.
inline std::vector<NatTransformation> brute_nat(const AbstractPresheaf& src,
                                                const AbstractPresheaf& tgt) {
  const CoverFamily& f = src.family();
  const std::size_t n = f.size();
  std::vector<std::vector<std::vector<std::size_t>>> choices(n);
  for (std::size_t o = 0; o < n; ++o) {
    std::vector<std::vector<std::size_t>> fns{{}};
    for (std::size_t x = 0; x < src.count(o); ++x) {
      std::vector<std::vector<std::size_t>> grown;
      for (const auto& fn : fns)
        for (std::size_t y = 0; y < tgt.count(o); ++y) {
          auto g = fn;
          g.push_back(y);
          grown.push_back(std::move(g));
        }
      fns = std::move(grown);
    }
    choices[o] = std::move(fns);
  }
  std::vector<NatTransformation> out;
  std::vector<std::size_t> pick(n, 0);
  if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); }))
    return out;
  while (true) {
    NatTransformation t;
    for (std::size_t o = 0; o < n; ++o) t.components.push_back(choices[o][pick[o]]);
    bool natural = true;
    for (std::size_t u = 0; u < n && natural; ++u)
      for (std::size_t v = 0; v < n && natural; ++v) {
        if (!is_subobject(f.objects()[u], f.objects()[v])) continue;
        for (std::size_t x = 0; x < src.count(v) && natural; ++x)
          natural = tgt.restrict(u, v, t.components[v][x]) ==
                    t.components[u][src.restrict(u, v, x)];
      }
    if (natural) out.push_back(std::move(t));
    std::size_t o = 0;
    for (; o < n; ++o) {
      if (++pick[o] < choices[o].size()) break;
      pick[o] = 0;
    }
    if (o == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool table_admits(const ConstraintTable& t, const Assignment& a) {
  std::vector<std::string> tuple;
  for (const auto& x : t.scope) tuple.push_back(a.at(x));
  const bool listed = t.tuples.count(tuple) > 0;
  return t.polarity == Polarity::allow ? listed : !listed;
}

inline bool inside_fibers(const Model& m, const Subset& scope, const Assignment& a) {
  for (const auto& x : scope)
    if (!m.fiber(x).contains(a.at(x))) return false;
  return true;
}

// Guarded-merge semantics evaluated literally on the merged product.
inline std::set<Assignment> merged_oracle(const Model& left, const Model& right,
                                          const Model& merged, const Subset& u) {
  std::set<Assignment> out;
  for (const auto& a : product(merged.fibers, u)) {
    bool ok = true;
    for (const Model* src : {&left, &right})
      for (const auto& t : src->tables)
        if (ok && is_subobject(t.scope, u))
          ok = !inside_fibers(*src, t.scope, a) || table_admits(t, a);
    if (ok) out.insert(a);
  }
  return out;
}

// Restricts a table to the values present in `fibers`.
inline ConstraintTable table_within(const ConstraintTable& t, const std::vector<Fiber>& fibers) {
  ConstraintTable out{t.scope, t.polarity, {}};
  for (const auto& tuple : t.tuples) {
    bool ok = true;
    for (std::size_t i = 0; i < tuple.size(); ++i)
      ok = ok && fiber_named(fibers, t.scope.members()[i]).contains(tuple[i]);
    if (ok) out.tuples.insert(tuple);
  }
  return out;
}

struct ModelPair {
  Model left;
  Model right;
};

// Two views of one random world: each side sees a subset of the features,
// a nonempty subset of each shared fiber, and the world's tables that fit.
// Such pairs agree wherever their fibers agree.
inline ModelPair consistent_pair(std::uint64_t seed) {
  const Model world = random_model(seed, {5, 4, 5, 3});
  Rng rng(seed * 7919 + 13);
  const Subset all = world.features();
  Subset xs, ys;
  do {
    xs = random_subset(rng, all);
    ys = set_union(set_difference(all, xs), random_subset(rng, all));
  } while (xs.empty() || ys.empty());
  auto side = [&](const Subset& feats, const std::string& name) {
    Model m;
    m.name = name;
    for (const auto& f : world.fibers) {
      if (!feats.contains(f.feature)) continue;
      Fiber g{f.feature, {}, {}};
      for (const auto& v : f.values)
        if (rng.chance(2, 3)) g.values.push_back(v);
      if (g.values.empty()) g.values.push_back(f.values[rng.below(f.values.size())]);
      m.fibers.push_back(std::move(g));
    }
    for (const auto& t : world.tables)
      if (is_subobject(t.scope, feats)) m.tables.push_back(table_within(t, m.fibers));
    normalize(m);
    return m;
  };
  return {side(xs, "L" + std::to_string(seed)), side(ys, "R" + std::to_string(seed))};
}

// Two unrelated random models over overlapping feature names.
inline ModelPair independent_pair(std::uint64_t seed) {
  Model a = random_model(seed, {4, 3, 3, 3});
  Model b = random_model(seed + 100'000, {4, 3, 3, 3});
  a.name = "A" + std::to_string(seed);
  b.name = "B" + std::to_string(seed);
  return {std::move(a), std::move(b)};
}

// Random h into `source`: a random nonempty set of source features, each
// renamed and given a fresh target fiber with an arbitrary value map.
inline FeatureIdentification random_identification(const Model& source, std::uint64_t seed,
                                                   const std::string& target_name = "T") {
  Rng rng(seed);
  FeatureIdentification h{"h", target_name, source.name, {}};
  for (const auto& f : source.fibers) {
    if (!rng.chance(3, 4) && !(h.features.empty() && &f == &source.fibers.back())) continue;
    FeatureCorrespondence c{"t_" + f.feature, f.feature, {}};
    const auto n = rng.between(1, 3);
    for (std::size_t i = 0; i < n; ++i)
      c.values.emplace_back("w" + std::to_string(i), f.values[rng.below(f.values.size())]);
    h.features.push_back(std::move(c));
  }
  return h;
}

// Sections of the transferred model, evaluated on the source side.
inline std::set<Assignment> transfer_oracle(const FeatureIdentification& h, const Model& source,
                                            const Subset& u) {
  std::map<std::string, const FeatureCorrespondence*> by_source;
  for (const auto& c : h.features) by_source[c.source] = &c;
  std::set<Assignment> out;
  for (const auto& a : product(h.target_fibers(), u)) {
    bool ok = true;
    for (const auto& t : source.tables) {
      std::vector<std::pair<std::string, std::string>> image;
      bool applies = true;
      for (const auto& s : t.scope) {
        auto it = by_source.find(s);
        if (it == by_source.end() || !u.contains(it->second->target)) {
          applies = false;
          break;
        }
        const std::string& tv = a.at(it->second->target);
        for (const auto& [x, y] : it->second->values)
          if (x == tv) image.emplace_back(s, y);
      }
      if (applies && !table_admits(t, Assignment::from_bindings(image))) ok = false;
    }
    if (ok) out.insert(a);
  }
  return out;
}

}  // namespace psh::support
