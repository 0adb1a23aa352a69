#pragma once

// General finite presheaves with opaque elements, natural transformations
// between them, representables and the Yoneda bijection.

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "psh/lattice.hpp"
#include "psh/presheaf.hpp"
#include "psh/report.hpp"

namespace psh {

inline constexpr std::uint64_t kMaxNatCandidates = 1'000'000;

/// Elements of F(U) are the integers 0..count(U)-1. A restriction map is
/// stored for every inclusion pair U ⊆ V of the family (including U = V).
class AbstractPresheaf {
 public:
  using Map = std::vector<std::size_t>;

  AbstractPresheaf() = default;
  explicit AbstractPresheaf(CoverFamily family);

  const CoverFamily& family() const noexcept { return family_; }

  std::size_t count(std::size_t object) const { return counts_.at(object); }
  std::size_t count(const Subset& u) const { return count(family_.index_of(u)); }
  void set_count(std::size_t object, std::size_t n) { counts_.at(object) = n; }

  // Map F(V) -> F(U) for U ⊆ V; nullptr when not set.
  const Map* restriction(std::size_t u, std::size_t v) const;
  void set_restriction(std::size_t u, std::size_t v, Map map);
  // Convenience accessor that throws when the map is missing.
  std::size_t restrict(std::size_t u, std::size_t v, std::size_t element) const;

  friend bool operator==(const AbstractPresheaf&, const AbstractPresheaf&) = default;

 private:
  CoverFamily family_;
  std::vector<std::size_t> counts_;
  std::map<std::pair<std::size_t, std::size_t>, Map> restrictions_;
};

/// Identity and composition laws, plus presence and range of every map.
LawReport validate_laws(const AbstractPresheaf& p);

/// components[object][element of source] = element of target.
struct NatTransformation {
  std::vector<std::vector<std::size_t>> components;

  friend bool operator==(const NatTransformation&, const NatTransformation&) = default;
  friend auto operator<=>(const NatTransformation&, const NatTransformation&) = default;
};

/// Hom-presheaf y(C): one element at D when D ⊆ C, none otherwise.
AbstractPresheaf representable(const CoverFamily& family, const Subset& c);

/// Product over objects of |G(U)|^|F(U)|, saturating at UINT64_MAX.
std::uint64_t nat_candidate_bound(const AbstractPresheaf& source,
                                  const AbstractPresheaf& target);

/// Every natural transformation source => target, in lexicographic order of
/// their components. Refuses when nat_candidate_bound exceeds `max_candidates`.
std::vector<NatTransformation> nat_transformations(const AbstractPresheaf& source,
                                                   const AbstractPresheaf& target,
                                                   std::uint64_t max_candidates = kMaxNatCandidates);

LawReport check_naturality(const AbstractPresheaf& source, const AbstractPresheaf& target,
                           const NatTransformation& theta);

struct YonedaResult {
  LawReport report;
  std::size_t transformations = 0;
  std::size_t elements = 0;
};

/// Evaluates Θ ↦ Θ_D(id_D) on Nat(y(D), F) and checks it is a bijection onto F(D).
YonedaResult yoneda_check(const AbstractPresheaf& f, const Subset& d,
                          std::uint64_t max_candidates = kMaxNatCandidates);

/// Object part of a monotone map between cover families.
using ObjectMap = std::function<Subset(const Subset&)>;

/// (F*Q)(C) = Q(F(C)) with restrictions inherited from Q. Throws
/// MalformedInput naming a witness pair when F is not monotone or lands
/// outside Q's family.
AbstractPresheaf pullback_presheaf(const CoverFamily& source, const ObjectMap& functor,
                                   const AbstractPresheaf& q);

/// Forgets the assignment structure: elements are sections in canonical order.
AbstractPresheaf to_abstract(const AssignmentPresheaf& p);

/// Seeded random presheaf: built top-down by quotienting the images of all
/// larger objects and adding fresh elements, so every finite presheaf on the
/// family can occur. Deterministic in `seed`.
AbstractPresheaf random_abstract_presheaf(const CoverFamily& family, std::uint64_t seed,
                                          std::size_t max_fresh = 2);

}  // namespace psh
