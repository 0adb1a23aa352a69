#pragma once

// Assignment presheaves: for every object U of a cover family, the set of
// compatible value assignments on U; restriction is projection.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psh/lattice.hpp"
#include "psh/report.hpp"

namespace psh {

/// The finite value range of one feature, in declaration order.
struct Fiber {
  FeatureId feature;
  std::vector<std::string> values;
  // Optional display strings, parallel to `values` (empty when absent).
  std::vector<std::string> labels;

  std::optional<std::size_t> index_of(std::string_view value) const;
  bool contains(std::string_view value) const { return index_of(value).has_value(); }
  const std::string& label(std::size_t i) const;

  friend bool operator==(const Fiber&, const Fiber&) = default;
};

/// A section over `domain`: values[i] is bound to domain.members()[i].
struct Assignment {
  Subset domain;
  std::vector<std::string> values;

  Assignment() = default;
  Assignment(Subset d, std::vector<std::string> v);
  // Builds from unordered (feature, value) pairs.
  static Assignment from_bindings(std::vector<std::pair<std::string, std::string>> bindings);

  const std::string& at(std::string_view feature) const;
  // "(a=x, b=y)"
  std::string str() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

Assignment restrict_assignment(const Assignment& a, const Subset& u);

/// Extensional presheaf over a cover family. Sections are stored per object as
/// tuples of fiber indices (members of the object in universe order); the
/// canonical listing order is lexicographic in fiber declaration order.
class AssignmentPresheaf {
 public:
  using Tuple = std::vector<std::uint16_t>;

  AssignmentPresheaf() = default;
  // `fibers` must cover exactly the family's universe (any order).
  AssignmentPresheaf(CoverFamily family, std::vector<Fiber> fibers);

  const CoverFamily& family() const noexcept { return family_; }
  // Aligned with family().universe().members().
  std::span<const Fiber> fibers() const noexcept { return fibers_; }
  const Fiber& fiber(std::string_view feature) const;

  std::vector<Assignment> sections(const Subset& u) const;
  std::size_t count(const Subset& u) const;
  bool contains(const Assignment& a) const;
  // Throws MalformedInput when the domain is not an object or a value lies
  // outside its fiber.
  void add(const Assignment& a);

  const std::set<Tuple>& tuples(std::size_t object) const { return sections_[object]; }
  void add_tuple(std::size_t object, Tuple t) { sections_[object].insert(std::move(t)); }
  Tuple encode(const Assignment& a) const;
  Assignment decode(std::size_t object, const Tuple& t) const;

  friend bool operator==(const AssignmentPresheaf&, const AssignmentPresheaf&) = default;

 private:
  CoverFamily family_;
  std::vector<Fiber> fibers_;
  std::vector<std::set<Tuple>> sections_;
};

// For masks inner ⊆ outer: positions in an `outer` tuple of each member of `inner`.
std::vector<std::size_t> projection_positions(Mask outer, Mask inner);
AssignmentPresheaf::Tuple project_tuple(const AssignmentPresheaf::Tuple& t,
                                        std::span<const std::size_t> positions);

/// Restriction closure over every inclusion pair, plus fiber membership.
LawReport validate_laws(const AssignmentPresheaf& p);

struct ClosureAdditions {
  Subset object;
  std::vector<Assignment> added;
};

/// Smallest restriction-closed superset of `p`, with the added sections.
std::pair<AssignmentPresheaf, std::vector<ClosureAdditions>> closure_complete(
    const AssignmentPresheaf& p);

std::vector<Assignment> global_sections(const AssignmentPresheaf& p);

/// Sections on `v` restricting to `a`. Empty result means `a` does not extend.
std::vector<Assignment> extensions(const AssignmentPresheaf& p, const Assignment& a,
                                   const Subset& v);

/// Inclusion-minimal objects W ⊇ domain(a) on which `a` has no extension.
std::vector<Subset> blocking_sets(const AssignmentPresheaf& p, const Assignment& a);

}  // namespace psh
