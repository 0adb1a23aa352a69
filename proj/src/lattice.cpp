#include "psh/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <iterator>
#include <unordered_set>

#include "psh/error.hpp"

namespace psh {

bool is_valid_feature_name(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto head = name.front();
  if (!(std::isalpha(static_cast<unsigned char>(head)) || head == '_')) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

Subset::Subset(std::initializer_list<std::string> members)
    : Subset(std::vector<std::string>(members)) {}

Subset::Subset(std::vector<std::string> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool Subset::contains(std::string_view feature) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), feature);
}

std::string Subset::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ',';
    out += members_[i];
  }
  return out + "}";
}

std::strong_ordering operator<=>(const Subset& a, const Subset& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return a.members_ <=> b.members_;
}

Subset set_union(const Subset& a, const Subset& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Subset(std::move(out));
}

Subset set_intersection(const Subset& a, const Subset& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return Subset(std::move(out));
}

Subset set_difference(const Subset& a, const Subset& b) {
  std::vector<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Subset(std::move(out));
}

bool is_subobject(const Subset& u, const Subset& v) noexcept {
  return std::includes(v.begin(), v.end(), u.begin(), u.end());
}

// ---------------------------------------------------------------------------
// CoverFamily

CoverFamily CoverFamily::from_masks(Subset universe, std::vector<Mask> masks) {
  CoverFamily f;
  f.universe_ = std::move(universe);
  std::vector<std::pair<Subset, Mask>> entries;
  entries.reserve(masks.size());
  for (Mask m : masks) entries.emplace_back(f.subset_of(m), m);
  std::sort(entries.begin(), entries.end());
  for (auto& [s, m] : entries) {
    f.index_.emplace(m, f.objects_.size());
    f.objects_.push_back(std::move(s));
    f.masks_.push_back(m);
  }
  return f;
}

bool CoverFamily::contains(const Subset& s) const { return find(s).has_value(); }

std::optional<std::size_t> CoverFamily::find(const Subset& s) const {
  if (!is_subobject(s, universe_)) return std::nullopt;
  return find(mask_of(s));
}

std::optional<std::size_t> CoverFamily::find(Mask m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CoverFamily::index_of(const Subset& s) const {
  if (auto i = find(s)) return *i;
  throw MalformedInput("subset " + s.str() + " is not an object of the cover family over " +
                       universe_.str());
}

std::size_t CoverFamily::universe_index() const { return index_of(universe_); }

Mask CoverFamily::mask_of(const Subset& s) const {
  Mask m = 0;
  const auto& u = universe_.members();
  for (const auto& x : s) {
    auto it = std::lower_bound(u.begin(), u.end(), x);
    if (it == u.end() || *it != x)
      throw MalformedInput("feature '" + x + "' is not in the universe " + universe_.str());
    m |= Mask{1} << static_cast<unsigned>(it - u.begin());
  }
  return m;
}

Subset CoverFamily::subset_of(Mask m) const {
  std::vector<std::string> out;
  const auto& u = universe_.members();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (m & (Mask{1} << i)) out.push_back(u[i]);
  return Subset(std::move(out));
}

Mask CoverFamily::full_mask() const noexcept {
  return universe_.size() >= 32 ? ~Mask{0} : (Mask{1} << universe_.size()) - 1;
}

std::size_t CoverFamily::feature_index(std::string_view feature) const {
  const auto& u = universe_.members();
  auto it = std::lower_bound(u.begin(), u.end(), feature);
  if (it == u.end() || *it != feature)
    throw MalformedInput("feature '" + std::string(feature) + "' is not in the universe " +
                         universe_.str());
  return static_cast<std::size_t>(it - u.begin());
}

// ---------------------------------------------------------------------------

CoverFamily close_family(const Subset& universe, std::span<const Subset> seeds) {
  for (const auto& x : universe)
    if (!is_valid_feature_name(x)) throw MalformedInput("invalid feature name '" + x + "'");
  if (universe.size() > kMaxFamilyFeatures)
    throw BoundRefusal("cover family universe too large", universe.size(),
                       kMaxFamilyFeatures);

  CoverFamily probe = CoverFamily::from_masks(universe, {});
  std::vector<Mask> start{0, probe.full_mask()};
  for (std::size_t i = 0; i < universe.size(); ++i) start.push_back(Mask{1} << i);
  for (const auto& s : seeds) {
    for (const auto& x : s)
      if (!universe.contains(x))
        throw MalformedInput("seed " + s.str() + " contains feature '" + x +
                             "' outside the universe " + universe.str());
    start.push_back(probe.mask_of(s));
  }

  // Worklist saturation: every newly admitted subset is combined with every
  // subset admitted so far.
  std::unordered_set<Mask> seen;
  std::vector<Mask> admitted;
  std::deque<Mask> pending;
  auto admit = [&](Mask m) {
    if (seen.insert(m).second) pending.push_back(m);
  };
  for (Mask m : start) admit(m);
  while (!pending.empty()) {
    Mask m = pending.front();
    pending.pop_front();
    for (std::size_t i = 0, n = admitted.size(); i < n; ++i) {
      admit(m & admitted[i]);
      admit(m | admitted[i]);
    }
    admitted.push_back(m);
  }
  return CoverFamily::from_masks(universe, std::move(admitted));
}

CoverFamily close_family(const Subset& universe, std::initializer_list<Subset> seeds) {
  return close_family(universe, std::span<const Subset>(seeds.begin(), seeds.size()));
}

namespace {

void require_objects(const CoverFamily& family, const Subset& u, const Subset& v) {
  (void)family.index_of(u);
  (void)family.index_of(v);
}

}  // namespace

Subset meet(const CoverFamily& family, const Subset& u, const Subset& v) {
  require_objects(family, u, v);
  return set_intersection(u, v);
}

Subset join(const CoverFamily& family, const Subset& u, const Subset& v) {
  require_objects(family, u, v);
  return set_union(u, v);
}

CoverFamily restrict_family(const CoverFamily& family, const Subset& s0) {
  if (!is_subobject(s0, family.universe()))
    throw MalformedInput("restriction target " + s0.str() + " is not contained in " +
                         family.universe().str());
  const Mask outer = family.mask_of(s0);
  // Re-index the surviving objects against the smaller universe.
  CoverFamily probe = CoverFamily::from_masks(s0, {});
  std::vector<Mask> kept;
  for (std::size_t i = 0; i < family.size(); ++i)
    if ((family.masks()[i] & ~outer) == 0) kept.push_back(probe.mask_of(family.objects()[i]));
  CoverFamily result = CoverFamily::from_masks(s0, std::move(kept));

  for (const auto& x : s0)
    if (!result.contains(Subset{x}))
      throw InvariantViolation("restricted family over " + s0.str() +
                               " lacks the singleton {" + x + "}");
  if (!result.contains(Subset{}) || !result.contains(s0))
    throw InvariantViolation("restricted family over " + s0.str() +
                             " lacks the empty set or its universe");
  return result;
}

Subset extend_functor_f1(const Subset& u, const Subset& s1, const Subset& s2) {
  if (!is_subobject(u, s1) || !is_subobject(s1, s2))
    throw MalformedInput("f1 requires U ⊆ S1 ⊆ S2, got U=" + u.str() + ", S1=" + s1.str() +
                         ", S2=" + s2.str());
  return set_union(u, set_difference(s2, s1));
}

Subset restriction_functor_r(const Subset& v, const Subset& s1) {
  return set_intersection(v, s1);
}

LawReport check_adjunction_triple(const Subset& s1, const Subset& s2,
                                  std::size_t max_features) {
  if (!is_subobject(s1, s2))
    throw MalformedInput("adjunction check requires S1 ⊆ S2, got S1=" + s1.str() +
                         ", S2=" + s2.str());
  if (s2.size() > max_features)
    throw BoundRefusal("adjunction sweep over " + s2.str() + " exceeds the exhaustive bound",
                       s2.size(), max_features);

  CoverFamily big = close_family(s2);
  LawReport report;
  for (const auto& u_big : big.objects()) {
    if (!is_subobject(u_big, s1)) continue;
    const Subset& u = u_big;
    for (const auto& v : big.objects()) {
      ++report.checked;
      // f0(U) ⊆ V  ⇔  U ⊆ r(V)
      const Subset rv = restriction_functor_r(v, s1);
      if (is_subobject(u, v) != is_subobject(u, rv))
        report.fail("f0 -| r", "U=" + u.str() + ", V=" + v.str());
      // r(V) ⊆ U  ⇔  V ⊆ f1(U)
      if (is_subobject(rv, u) != is_subobject(v, extend_functor_f1(u, s1, s2)))
        report.fail("r -| f1", "U=" + u.str() + ", V=" + v.str());
    }
  }
  return report;
}

LawReport check_lattice_laws(const CoverFamily& family, std::size_t max_features) {
  if (family.universe().size() > max_features)
    throw BoundRefusal("lattice law sweep over " + family.universe().str() +
                           " exceeds the exhaustive bound",
                       family.universe().size(), max_features);
  LawReport report;
  const auto objs = family.objects();
  for (const auto& a : objs) {
    ++report.checked;
    if (!is_subobject(a, a)) report.fail("identity", a.str());
    if (meet(family, a, a) != a || join(family, a, a) != a)
      report.fail("idempotence", a.str());
    for (const auto& b : objs) {
      ++report.checked;
      const Subset m = set_intersection(a, b);
      const Subset j = set_union(a, b);
      if (!family.contains(m) || !family.contains(j)) {
        report.fail("closure", a.str() + ", " + b.str());
        continue;
      }
      if (m != set_intersection(b, a) || j != set_union(b, a))
        report.fail("commutativity", a.str() + ", " + b.str());
      if (set_union(a, m) != a || set_intersection(a, j) != a)
        report.fail("absorption", a.str() + ", " + b.str());
      // m is the greatest lower bound and j the least upper bound among objects.
      for (const auto& c : objs) {
        ++report.checked;
        const bool lower = is_subobject(c, a) && is_subobject(c, b);
        if (lower != is_subobject(c, m))
          report.fail("pullback", a.str() + ", " + b.str() + " via " + c.str());
        const bool upper = is_subobject(a, c) && is_subobject(b, c);
        if (upper != is_subobject(j, c))
          report.fail("pushout", a.str() + ", " + b.str() + " via " + c.str());
        if (set_intersection(m, c) != set_intersection(a, set_intersection(b, c)) ||
            set_union(j, c) != set_union(a, set_union(b, c)))
          report.fail("associativity", a.str() + ", " + b.str() + ", " + c.str());
        if (is_subobject(a, b) && is_subobject(b, c) && !is_subobject(a, c))
          report.fail("composition", a.str() + " ⊆ " + b.str() + " ⊆ " + c.str());
      }
    }
  }
  return report;
}

}  // namespace psh
