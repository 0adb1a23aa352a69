#pragma once

// Feature universes, subset lattices (cover families) and the inclusion /
// restriction / padding functors between them.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "psh/report.hpp"

namespace psh {

using FeatureId = std::string;

// Names match [A-Za-z_][A-Za-z0-9_-]*.
bool is_valid_feature_name(std::string_view name) noexcept;

/// A finite set of feature names, stored sorted lexicographically.
///
/// Subsets compare by cardinality first and then lexicographically by their
/// sorted member lists; this is the canonical order used for every listing
/// of family objects.
class Subset {
 public:
  Subset() = default;
  Subset(std::initializer_list<std::string> members);
  explicit Subset(std::vector<std::string> members);

  const std::vector<std::string>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(std::string_view feature) const noexcept;

  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  // "{a,b,c}"
  std::string str() const;

  friend bool operator==(const Subset&, const Subset&) = default;
  friend std::strong_ordering operator<=>(const Subset& a, const Subset& b);

 private:
  std::vector<std::string> members_;
};

Subset set_union(const Subset& a, const Subset& b);
Subset set_intersection(const Subset& a, const Subset& b);
Subset set_difference(const Subset& a, const Subset& b);

/// Hom(U, V) is nonempty in the poset category iff U ⊆ V.
bool is_subobject(const Subset& u, const Subset& v) noexcept;

using Mask = std::uint32_t;

inline constexpr std::size_t kMaxFamilyFeatures = 12;
inline constexpr std::size_t kMaxAdjunctionFeatures = 5;
inline constexpr std::size_t kMaxLatticeLawFeatures = 6;

/// A universe of features together with an ∩/∪-closed collection of its
/// subsets that contains ∅, the universe and every singleton.
///
/// Objects are also addressable by bit masks over the universe (bit i is the
/// i-th feature in lexicographic order) and by their position in the
/// canonical object order.
class CoverFamily {
 public:
  CoverFamily() = default;

  const Subset& universe() const noexcept { return universe_; }
  std::span<const Subset> objects() const noexcept { return objects_; }
  std::span<const Mask> masks() const noexcept { return masks_; }
  std::size_t size() const noexcept { return objects_.size(); }

  bool contains(const Subset& s) const;
  std::optional<std::size_t> find(const Subset& s) const;
  std::optional<std::size_t> find(Mask m) const;
  // Throws MalformedInput when `s` is not an object.
  std::size_t index_of(const Subset& s) const;
  std::size_t universe_index() const;

  // Throws MalformedInput naming the first member outside the universe.
  Mask mask_of(const Subset& s) const;
  Subset subset_of(Mask m) const;
  Mask full_mask() const noexcept;
  std::size_t feature_index(std::string_view feature) const;

  friend bool operator==(const CoverFamily& a, const CoverFamily& b) {
    return a.universe_ == b.universe_ && a.objects_ == b.objects_;
  }

 private:
  friend CoverFamily close_family(const Subset&, std::span<const Subset>);
  friend CoverFamily restrict_family(const CoverFamily&, const Subset&);
  static CoverFamily from_masks(Subset universe, std::vector<Mask> masks);

  Subset universe_;
  std::vector<Subset> objects_;
  std::vector<Mask> masks_;
  std::unordered_map<Mask, std::size_t> index_;
};

/// Smallest cover family over `universe` containing the seeds.
CoverFamily close_family(const Subset& universe, std::span<const Subset> seeds);
CoverFamily close_family(const Subset& universe,
                         std::initializer_list<Subset> seeds = {});

Subset meet(const CoverFamily& family, const Subset& u, const Subset& v);
Subset join(const CoverFamily& family, const Subset& u, const Subset& v);

/// The family U(S0): objects of `family` contained in `s0`.
CoverFamily restrict_family(const CoverFamily& family, const Subset& s0);

/// f1(U) = U ∪ (S2 \ S1), for U ⊆ S1 ⊆ S2.
Subset extend_functor_f1(const Subset& u, const Subset& s1, const Subset& s2);

/// r(V) = V ∩ S1.
Subset restriction_functor_r(const Subset& v, const Subset& s1);

/// Exhaustively verifies f0 ⊣ r ⊣ f1 between the power sets of S1 ⊆ S2:
/// for all U ⊆ S1, V ⊆ S2,
///   U ⊆ V      ⇔ U ⊆ V ∩ S1
///   V ∩ S1 ⊆ U ⇔ V ⊆ U ∪ (S2 \ S1).
/// Refuses when |S2| exceeds `max_features`.
LawReport check_adjunction_triple(const Subset& s1, const Subset& s2,
                                  std::size_t max_features = kMaxAdjunctionFeatures);

/// Lattice and poset-category laws over every object (pair, triple) of the
/// family: meet/join closure, commutativity, associativity, idempotence,
/// absorption, greatest-lower/least-upper bounds, identities, transitivity.
LawReport check_lattice_laws(const CoverFamily& family,
                             std::size_t max_features = kMaxLatticeLawFeatures);

}  // namespace psh
