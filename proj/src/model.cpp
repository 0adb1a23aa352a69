#include "psh/model.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "psh/error.hpp"
#include "psh/rng.hpp"

namespace psh {

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::allow ? "allow" : "forbid";
}

Subset Model::features() const {
  std::vector<std::string> names;
  names.reserve(fibers.size());
  for (const auto& f : fibers) names.push_back(f.feature);
  return Subset(std::move(names));
}

const Fiber& Model::fiber(std::string_view feature) const {
  for (const auto& f : fibers)
    if (f.feature == feature) return f;
  throw MalformedInput("model '" + name + "' has no feature '" + std::string(feature) + "'");
}

bool Model::has_feature(std::string_view feature) const {
  return std::any_of(fibers.begin(), fibers.end(),
                     [&](const Fiber& f) { return f.feature == feature; });
}

void normalize(Model& m) {
  std::sort(m.tables.begin(), m.tables.end());
  std::sort(m.cover_seeds.begin(), m.cover_seeds.end());
  m.cover_seeds.erase(std::unique(m.cover_seeds.begin(), m.cover_seeds.end()),
                      m.cover_seeds.end());
}

void validate_model(const Model& m) {
  if (!is_valid_feature_name(m.name)) throw MalformedInput("invalid model name '" + m.name + "'");
  std::set<std::string> seen;
  for (const auto& f : m.fibers) {
    if (!is_valid_feature_name(f.feature))
      throw MalformedInput("invalid feature name '" + f.feature + "'");
    if (!seen.insert(f.feature).second)
      throw MalformedInput("feature '" + f.feature + "' declared twice");
    if (f.values.empty()) throw MalformedInput("fiber of '" + f.feature + "' is empty");
    std::set<std::string> vals(f.values.begin(), f.values.end());
    if (vals.size() != f.values.size())
      throw MalformedInput("fiber of '" + f.feature + "' has a duplicate value");
  }
  for (const auto& t : m.tables) {
    if (t.scope.empty()) throw MalformedInput("constraint table with empty scope");
    for (const auto& x : t.scope)
      if (!seen.count(x))
        throw MalformedInput("table scope " + t.scope.str() + " names unknown feature '" + x + "'");
    for (const auto& tuple : t.tuples) {
      if (tuple.size() != t.scope.size())
        throw MalformedInput("tuple arity mismatch in table over " + t.scope.str());
      for (std::size_t i = 0; i < tuple.size(); ++i)
        if (!m.fiber(t.scope.members()[i]).contains(tuple[i]))
          throw MalformedInput("value '" + tuple[i] + "' is not in the fiber of '" +
                               t.scope.members()[i] + "'");
    }
  }
  for (const auto& s : m.cover_seeds)
    for (const auto& x : s)
      if (!seen.count(x))
        throw MalformedInput("cover seed " + s.str() + " names unknown feature '" + x + "'");
}

namespace {

struct IndexedTable {
  std::vector<std::size_t> positions;  // of scope members within the object
  bool allow = true;
  std::set<AssignmentPresheaf::Tuple> tuples;
};

// Depth-first enumeration over the features of one object.
class ObjectEnumerator {
 public:
  ObjectEnumerator(std::vector<std::size_t> fiber_sizes,
                   std::vector<std::vector<IndexedTable>> by_last)
      : sizes_(std::move(fiber_sizes)), by_last_(std::move(by_last)), current_(sizes_.size()) {}

  void run(std::set<AssignmentPresheaf::Tuple>& out) { descend(0, out); }

 private:
  void descend(std::size_t depth, std::set<AssignmentPresheaf::Tuple>& out) {
    if (depth == sizes_.size()) {
      out.insert(current_);
      return;
    }
    for (std::size_t v = 0; v < sizes_[depth]; ++v) {
      current_[depth] = static_cast<std::uint16_t>(v);
      if (passes(depth)) descend(depth + 1, out);
    }
  }

  bool passes(std::size_t depth) {
    for (const auto& t : by_last_[depth]) {
      key_.clear();
      for (auto p : t.positions) key_.push_back(current_[p]);
      if ((t.tuples.count(key_) > 0) != t.allow) return false;
    }
    return true;
  }

  std::vector<std::size_t> sizes_;
  std::vector<std::vector<IndexedTable>> by_last_;
  AssignmentPresheaf::Tuple current_;
  AssignmentPresheaf::Tuple key_;
};

}  // namespace

AssignmentPresheaf compile(const Model& m) {
  validate_model(m);
  std::vector<Subset> seeds = m.cover_seeds;
  for (const auto& t : m.tables) seeds.push_back(t.scope);
  CoverFamily family = close_family(m.features(), seeds);
  AssignmentPresheaf out(family, m.fibers);

  // Tables re-expressed over fiber indices, keyed by their scope mask.
  struct Encoded {
    Mask scope;
    bool allow;
    std::set<AssignmentPresheaf::Tuple> tuples;
  };
  std::vector<Encoded> encoded;
  for (const auto& t : m.tables) {
    Encoded e{family.mask_of(t.scope), t.polarity == Polarity::allow, {}};
    for (const auto& tuple : t.tuples) {
      AssignmentPresheaf::Tuple idx;
      for (std::size_t i = 0; i < tuple.size(); ++i)
        idx.push_back(static_cast<std::uint16_t>(
            *m.fiber(t.scope.members()[i]).index_of(tuple[i])));
      e.tuples.insert(std::move(idx));
    }
    encoded.push_back(std::move(e));
  }

  for (std::size_t obj = 0; obj < family.size(); ++obj) {
    const Mask mask = family.masks()[obj];
    const auto width = static_cast<std::size_t>(std::popcount(mask));
    std::vector<std::size_t> sizes;
    for (const auto& x : family.objects()[obj]) sizes.push_back(out.fiber(x).values.size());
    std::vector<std::vector<IndexedTable>> by_last(width);
    for (const auto& e : encoded) {
      if ((e.scope & mask) != e.scope) continue;
      IndexedTable t{projection_positions(mask, e.scope), e.allow, e.tuples};
      by_last[t.positions.back()].push_back(std::move(t));
    }
    std::set<AssignmentPresheaf::Tuple> secs;
    ObjectEnumerator(std::move(sizes), std::move(by_last)).run(secs);
    for (auto& t : secs) out.add_tuple(obj, t);
  }
  return out;
}

AssignmentPresheaf materialize(const ListedPresheaf& p) {
  Model shape{p.name, p.fibers, p.listed, {}};
  validate_model(shape);
  std::vector<Subset> seeds;
  for (const auto& t : p.listed) seeds.push_back(t.scope);
  CoverFamily family = close_family(shape.features(), seeds);
  AssignmentPresheaf out(family, p.fibers);
  std::vector<Mask> listed;
  for (const auto& t : p.listed) {
    listed.push_back(family.mask_of(t.scope));
    for (const auto& tuple : t.tuples) out.add(Assignment(t.scope, tuple));
  }
  for (std::size_t obj = 0; obj < family.size(); ++obj) {
    const Mask m = family.masks()[obj];
    if (std::find(listed.begin(), listed.end(), m) != listed.end()) continue;
    for (Mask above : listed) {
      if ((m & above) != m) continue;
      const std::size_t src = *family.find(above);
      const auto pos = projection_positions(above, m);
      for (const auto& t : out.tuples(src)) out.add_tuple(obj, project_tuple(t, pos));
    }
  }
  return out;
}

Model random_model(std::uint64_t seed, const RandomModelLimits& limits) {
  Rng rng(seed);
  Model m;
  m.name = "random_" + std::to_string(seed);
  const std::size_t nfeat = rng.between(1, limits.max_features);
  for (std::size_t i = 0; i < nfeat; ++i) {
    Fiber f;
    f.feature = "f" + std::to_string(i);
    const std::size_t nval = rng.between(1, limits.max_fiber);
    for (std::size_t k = 0; k < nval; ++k) f.values.push_back("v" + std::to_string(k));
    m.fibers.push_back(std::move(f));
  }
  const std::size_t ntables = rng.below(limits.max_tables + 1);
  for (std::size_t t = 0; t < ntables; ++t) {
    ConstraintTable table;
    const std::size_t width = rng.between(1, std::min(limits.max_scope, nfeat));
    std::vector<std::string> scope;
    while (scope.size() < width) {
      auto name = m.fibers[rng.below(nfeat)].feature;
      if (std::find(scope.begin(), scope.end(), name) == scope.end()) scope.push_back(name);
    }
    table.scope = Subset(std::move(scope));
    table.polarity = rng.chance(1, 2) ? Polarity::allow : Polarity::forbid;
    // Allow tables keep most tuples, forbid tables drop a few.
    const std::uint64_t keep = table.polarity == Polarity::allow ? rng.between(5, 9)
                                                                 : rng.between(1, 4);
    std::vector<std::size_t> odo(width, 0);
    while (true) {
      std::vector<std::string> tuple;
      for (std::size_t i = 0; i < width; ++i)
        tuple.push_back(m.fiber(table.scope.members()[i]).values[odo[i]]);
      if (rng.chance(keep, 10)) table.tuples.insert(std::move(tuple));
      std::size_t i = 0;
      for (; i < width; ++i) {
        if (++odo[i] < m.fiber(table.scope.members()[i]).values.size()) break;
        odo[i] = 0;
      }
      if (i == width) break;
    }
    m.tables.push_back(std::move(table));
  }
  if (nfeat > 1 && rng.chance(1, 3)) {
    std::vector<std::string> seed_set{m.fibers[rng.below(nfeat)].feature,
                                      m.fibers[rng.below(nfeat)].feature};
    m.cover_seeds.push_back(Subset(std::move(seed_set)));
  }
  normalize(m);
  return m;
}

}  // namespace psh
