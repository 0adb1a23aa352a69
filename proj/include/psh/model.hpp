#pragma once

// Intensional models: fibers plus allow/forbid tables, compiled into
// assignment presheaves.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "psh/lattice.hpp"
#include "psh/presheaf.hpp"

namespace psh {

enum class Polarity { allow, forbid };

std::string_view to_string(Polarity p) noexcept;

/// Tuples are aligned with scope.members() (lexicographic feature order).
struct ConstraintTable {
  Subset scope;
  Polarity polarity = Polarity::allow;
  std::set<std::vector<std::string>> tuples;

  // `tuple` is aligned with scope.members().
  bool admits(const std::vector<std::string>& tuple) const {
    return (tuples.count(tuple) > 0) == (polarity == Polarity::allow);
  }

  friend bool operator==(const ConstraintTable&, const ConstraintTable&) = default;
  friend auto operator<=>(const ConstraintTable& a, const ConstraintTable& b) {
    if (auto c = a.scope <=> b.scope; c != 0) return c;
    if (auto c = a.polarity <=> b.polarity; c != 0) return c;
    return a.tuples <=> b.tuples;
  }
};

struct Model {
  std::string name;
  // Declaration order.
  std::vector<Fiber> fibers;
  // Kept sorted (see normalize).
  std::vector<ConstraintTable> tables;
  // Kept sorted and unique.
  std::vector<Subset> cover_seeds;

  Subset features() const;
  const Fiber& fiber(std::string_view feature) const;
  bool has_feature(std::string_view feature) const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Sorts tables and cover seeds into canonical order (in place).
void normalize(Model& m);

/// Throws MalformedInput on the first broken Model invariant.
void validate_model(const Model& m);

/// Family = closure of the cover seeds and all table scopes. Sections are
/// enumerated per object by backtracking over features in canonical order,
/// testing each table as soon as its last scope feature is bound.
AssignmentPresheaf compile(const Model& m);

/// A presheaf given extensionally. Listed objects hold exactly the listed
/// tuples (duplicate scopes are unioned); every other object holds the
/// projections of the listed objects above it. Nothing forces the listed
/// objects to be restriction-closed, so this is how broken or literal data
/// enters the system.
struct ListedPresheaf {
  std::string name;
  std::vector<Fiber> fibers;
  std::vector<ConstraintTable> listed;

  friend bool operator==(const ListedPresheaf&, const ListedPresheaf&) = default;
};

AssignmentPresheaf materialize(const ListedPresheaf& p);

inline constexpr std::uint64_t kMaxOracleProduct = 10'000'000;

/// Brute-force reference: the full product of fibers over `u`, filtered by
/// every table whose scope lies inside `u`.
std::set<Assignment> oracle_sections(const Model& m, const Subset& u,
                                     std::uint64_t max_product = kMaxOracleProduct);

struct RandomModelLimits {
  std::size_t max_features = 6;
  std::size_t max_fiber = 4;
  std::size_t max_tables = 4;
  std::size_t max_scope = 3;
};

/// Deterministic in `seed`; always satisfies the Model invariants.
Model random_model(std::uint64_t seed, const RandomModelLimits& limits = {});

}  // namespace psh
