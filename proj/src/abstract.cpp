#include "psh/abstract.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

#include "psh/error.hpp"
#include "psh/rng.hpp"

namespace psh {

AbstractPresheaf::AbstractPresheaf(CoverFamily family)
    : family_(std::move(family)), counts_(family_.size(), 0) {}

const AbstractPresheaf::Map* AbstractPresheaf::restriction(std::size_t u, std::size_t v) const {
  auto it = restrictions_.find({u, v});
  return it == restrictions_.end() ? nullptr : &it->second;
}

void AbstractPresheaf::set_restriction(std::size_t u, std::size_t v, Map map) {
  if (u >= family_.size() || v >= family_.size())
    throw MalformedInput("restriction index out of range");
  const Mask mu = family_.masks()[u], mv = family_.masks()[v];
  if ((mu & mv) != mu)
    throw MalformedInput("restriction " + family_.objects()[u].str() + " <- " +
                         family_.objects()[v].str() + " is not along an inclusion");
  restrictions_[{u, v}] = std::move(map);
}

std::size_t AbstractPresheaf::restrict(std::size_t u, std::size_t v, std::size_t element) const {
  const Map* m = restriction(u, v);
  if (!m || element >= m->size())
    throw InvariantViolation("missing restriction " + family_.objects()[u].str() + " <- " +
                             family_.objects()[v].str());
  return (*m)[element];
}

namespace {

bool below(Mask a, Mask b) { return (a & b) == a; }

std::string pair_str(const CoverFamily& f, std::size_t u, std::size_t v) {
  return f.objects()[u].str() + " ⊆ " + f.objects()[v].str();
}

}  // namespace

LawReport validate_laws(const AbstractPresheaf& p) {
  LawReport report;
  const auto& f = p.family();
  const std::size_t n = f.size();
  bool complete = true;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!below(f.masks()[u], f.masks()[v])) continue;
      ++report.checked;
      const auto* m = p.restriction(u, v);
      if (!m) {
        report.fail("missing-restriction", pair_str(f, u, v));
        complete = false;
        continue;
      }
      if (m->size() != p.count(v) ||
          std::any_of(m->begin(), m->end(), [&](std::size_t x) { return x >= p.count(u); })) {
        report.fail("codomain", pair_str(f, u, v));
        complete = false;
        continue;
      }
      if (u == v) {
        for (std::size_t x = 0; x < m->size(); ++x)
          if ((*m)[x] != x) {
            report.fail("identity", f.objects()[u].str() + " at element " + std::to_string(x));
            break;
          }
      }
    }
  }
  if (!complete) return report;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (!below(f.masks()[u], f.masks()[v])) continue;
      for (std::size_t w = 0; w < n; ++w) {
        if (!below(f.masks()[v], f.masks()[w])) continue;
        ++report.checked;
        const auto& uv = *p.restriction(u, v);
        const auto& vw = *p.restriction(v, w);
        const auto& uw = *p.restriction(u, w);
        for (std::size_t x = 0; x < uw.size(); ++x)
          if (uv[vw[x]] != uw[x]) {
            report.fail("functoriality", f.objects()[u].str() + " ⊆ " + f.objects()[v].str() +
                                             " ⊆ " + f.objects()[w].str() + " at element " +
                                             std::to_string(x));
            break;
          }
      }
    }
  return report;
}

AbstractPresheaf representable(const CoverFamily& family, const Subset& c) {
  const Mask top = family.mask_of(c);
  (void)family.index_of(c);
  AbstractPresheaf y(family);
  const std::size_t n = family.size();
  for (std::size_t d = 0; d < n; ++d) y.set_count(d, below(family.masks()[d], top) ? 1 : 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (below(family.masks()[u], family.masks()[v]))
        y.set_restriction(u, v, AbstractPresheaf::Map(y.count(v), 0));
  return y;
}

std::uint64_t nat_candidate_bound(const AbstractPresheaf& source,
                                  const AbstractPresheaf& target) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (std::size_t u = 0; u < source.family().size(); ++u) {
    const std::uint64_t base = target.count(u);
    for (std::size_t k = 0; k < source.count(u); ++k) {
      if (base == 0) return 0;
      if (total > kMax / base) return kMax;
      total *= base;
    }
  }
  return total;
}

namespace {

class NatSearch {
 public:
  NatSearch(const AbstractPresheaf& f, const AbstractPresheaf& g) : f_(f), g_(g) {
    const auto& fam = f.family();
    order_.resize(fam.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return std::popcount(fam.masks()[a]) > std::popcount(fam.masks()[b]);
    });
    theta_.components.resize(fam.size());
    for (std::size_t u = 0; u < fam.size(); ++u)
      theta_.components[u].assign(f.count(u), 0);
  }

  std::vector<NatTransformation> run() {
    descend(0, 0);
    std::sort(found_.begin(), found_.end());
    return std::move(found_);
  }

 private:
  // Objects are visited largest first, so every strict superset V of the
  // current object already has its component fixed. An element x of F(U) in
  // the image of F(V) -> F(U) then has its value forced by the square.
  void descend(std::size_t pos, std::size_t x) {
    if (pos == order_.size()) {
      found_.push_back(theta_);
      return;
    }
    const std::size_t u = order_[pos];
    if (x == f_.count(u)) {
      descend(pos + 1, 0);
      return;
    }
    std::optional<std::size_t> forced;
    const auto& fam = f_.family();
    for (std::size_t v = 0; v < fam.size(); ++v) {
      if (v == u || !below(fam.masks()[u], fam.masks()[v])) continue;
      const auto& fr = *f_.restriction(u, v);
      const auto& gr = *g_.restriction(u, v);
      for (std::size_t z = 0; z < fr.size(); ++z) {
        if (fr[z] != x) continue;
        const std::size_t need = gr[theta_.components[v][z]];
        if (forced && *forced != need) return;
        forced = need;
      }
    }
    if (forced) {
      theta_.components[u][x] = *forced;
      descend(pos, x + 1);
      return;
    }
    for (std::size_t y = 0; y < g_.count(u); ++y) {
      theta_.components[u][x] = y;
      descend(pos, x + 1);
    }
  }

  const AbstractPresheaf& f_;
  const AbstractPresheaf& g_;
  std::vector<std::size_t> order_;
  NatTransformation theta_;
  std::vector<NatTransformation> found_;
};

void require_same_family(const AbstractPresheaf& a, const AbstractPresheaf& b) {
  if (!(a.family() == b.family()))
    throw MalformedInput("presheaves live over different cover families");
}

}  // namespace

std::vector<NatTransformation> nat_transformations(const AbstractPresheaf& source,
                                                   const AbstractPresheaf& target,
                                                   std::uint64_t max_candidates) {
  require_same_family(source, target);
  for (const auto* p : {&source, &target})
    if (!validate_laws(*p).passed())
      throw MalformedInput("natural transformations need lawful presheaves");
  const std::uint64_t bound = nat_candidate_bound(source, target);
  if (bound > max_candidates)
    throw BoundRefusal("natural transformation search space too large", bound, max_candidates);
  if (bound == 0) return {};
  return NatSearch(source, target).run();
}

LawReport check_naturality(const AbstractPresheaf& source, const AbstractPresheaf& target,
                           const NatTransformation& theta) {
  require_same_family(source, target);
  LawReport report;
  const auto& fam = source.family();
  for (std::size_t u = 0; u < fam.size(); ++u)
    for (std::size_t v = 0; v < fam.size(); ++v) {
      if (!below(fam.masks()[u], fam.masks()[v])) continue;
      ++report.checked;
      for (std::size_t z = 0; z < source.count(v); ++z) {
        const std::size_t lhs = target.restrict(u, v, theta.components[v][z]);
        const std::size_t rhs = theta.components[u][source.restrict(u, v, z)];
        if (lhs != rhs) {
          report.fail("naturality", pair_str(fam, u, v) + " at element " + std::to_string(z));
          break;
        }
      }
    }
  return report;
}

YonedaResult yoneda_check(const AbstractPresheaf& f, const Subset& d,
                          std::uint64_t max_candidates) {
  const std::size_t di = f.family().index_of(d);
  const AbstractPresheaf y = representable(f.family(), d);
  const auto nats = nat_transformations(y, f, max_candidates);

  YonedaResult result;
  result.transformations = nats.size();
  result.elements = f.count(di);
  std::vector<int> hit(f.count(di), 0);
  for (const auto& theta : nats) {
    ++result.report.checked;
    if (auto nat = check_naturality(y, f, theta); !nat.passed()) {
      result.report.merge(nat);
      continue;
    }
    // y(D)(D) has exactly one element, the identity arrow.
    const std::size_t image = theta.components[di].at(0);
    if (image >= hit.size()) {
      result.report.fail("yoneda-range", d.str() + " element " + std::to_string(image));
      continue;
    }
    if (hit[image]++)
      result.report.fail("yoneda-injective",
                         d.str() + " element " + std::to_string(image) + " hit twice");
  }
  for (std::size_t x = 0; x < hit.size(); ++x)
    if (!hit[x])
      result.report.fail("yoneda-surjective", d.str() + " element " + std::to_string(x));
  return result;
}

AbstractPresheaf pullback_presheaf(const CoverFamily& source, const ObjectMap& functor,
                                   const AbstractPresheaf& q) {
  const std::size_t n = source.size();
  std::vector<std::size_t> image(n);
  for (std::size_t c = 0; c < n; ++c) {
    const Subset fc = functor(source.objects()[c]);
    auto idx = q.family().find(fc);
    if (!idx)
      throw MalformedInput("functor sends " + source.objects()[c].str() + " to " + fc.str() +
                           ", which is not an object of the target family");
    image[c] = *idx;
  }
  const auto& qm = q.family().masks();
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t d = 0; d < n; ++d)
      if (below(source.masks()[c], source.masks()[d]) && !below(qm[image[c]], qm[image[d]]))
        throw MalformedInput("functor is not monotone: " + pair_str(source, c, d) + " maps to " +
                             q.family().objects()[image[c]].str() + " ⊄ " +
                             q.family().objects()[image[d]].str());
  AbstractPresheaf out(source);
  for (std::size_t c = 0; c < n; ++c) out.set_count(c, q.count(image[c]));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t d = 0; d < n; ++d) {
      if (!below(source.masks()[c], source.masks()[d])) continue;
      const auto* m = q.restriction(image[c], image[d]);
      if (!m)
        throw InvariantViolation("pulled-back presheaf lacks restriction " +
                                 pair_str(q.family(), image[c], image[d]));
      out.set_restriction(c, d, *m);
    }
  return out;
}

AbstractPresheaf to_abstract(const AssignmentPresheaf& p) {
  const auto& fam = p.family();
  const std::size_t n = fam.size();
  AbstractPresheaf out(fam);
  std::vector<std::map<AssignmentPresheaf::Tuple, std::size_t>> index(n);
  for (std::size_t u = 0; u < n; ++u) {
    out.set_count(u, p.tuples(u).size());
    std::size_t k = 0;
    for (const auto& t : p.tuples(u)) index[u].emplace(t, k++);
  }
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (!below(fam.masks()[u], fam.masks()[v])) continue;
      const auto pos = projection_positions(fam.masks()[v], fam.masks()[u]);
      AbstractPresheaf::Map m;
      m.reserve(p.tuples(v).size());
      for (const auto& t : p.tuples(v)) {
        auto it = index[u].find(project_tuple(t, pos));
        if (it == index[u].end())
          throw InvariantViolation("presheaf is not restriction-closed at " + pair_str(fam, u, v));
        m.push_back(it->second);
      }
      out.set_restriction(u, v, std::move(m));
    }
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

AbstractPresheaf random_abstract_presheaf(const CoverFamily& family, std::uint64_t seed,
                                          std::size_t max_fresh) {
  Rng rng(seed);
  const std::size_t n = family.size();
  AbstractPresheaf out(family);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(family.masks()[a]) > std::popcount(family.masks()[b]);
  });

  for (std::size_t u : order) {
    const Mask mu = family.masks()[u];
    // Slots: every element of every strict superset, then fresh elements.
    std::vector<std::size_t> supers;
    std::vector<std::size_t> offset;
    std::size_t slots = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (v != u && below(mu, family.masks()[v])) {
        supers.push_back(v);
        offset.push_back(slots);
        slots += out.count(v);
      }
    const std::size_t fresh = rng.below(max_fresh + 1);
    UnionFind uf(slots + fresh);
    // (W, z) ~ (V, r_VW(z)) for U ⊊ V ⊊ W keeps the new maps functorial.
    for (std::size_t i = 0; i < supers.size(); ++i)
      for (std::size_t j = 0; j < supers.size(); ++j) {
        const std::size_t v = supers[i], w = supers[j];
        if (v == w || !below(family.masks()[v], family.masks()[w])) continue;
        for (std::size_t z = 0; z < out.count(w); ++z)
          uf.unite(offset[j] + z, offset[i] + out.restrict(v, w, z));
      }
    // Extra random identifications keep the sets small.
    const std::size_t total = slots + fresh;
    if (total > 1) {
      const std::size_t merges = rng.below(total);
      for (std::size_t k = 0; k < merges; ++k) uf.unite(rng.below(total), rng.below(total));
    }
    std::map<std::size_t, std::size_t> cls;
    std::vector<std::size_t> id(total);
    for (std::size_t s = 0; s < total; ++s) {
      auto [it, inserted] = cls.emplace(uf.find(s), cls.size());
      id[s] = it->second;
    }
    out.set_count(u, cls.size());
    AbstractPresheaf::Map identity(cls.size());
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    out.set_restriction(u, u, std::move(identity));
    for (std::size_t i = 0; i < supers.size(); ++i) {
      AbstractPresheaf::Map m(out.count(supers[i]));
      for (std::size_t z = 0; z < m.size(); ++z) m[z] = id[offset[i] + z];
      out.set_restriction(u, supers[i], std::move(m));
    }
  }
  return out;
}

}  // namespace psh
