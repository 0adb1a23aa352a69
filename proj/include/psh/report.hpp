#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace psh {

struct Violation {
  std::string law;
  std::string witness;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Outcome of an exhaustive law check. Violations are data, not errors.
struct LawReport {
  std::vector<Violation> violations;
  // Number of individual instances (pairs, chains, squares...) examined.
  std::size_t checked = 0;

  bool passed() const noexcept { return violations.empty(); }

  void fail(std::string law, std::string witness) {
    violations.push_back({std::move(law), std::move(witness)});
  }

  void merge(const LawReport& other) {
    violations.insert(violations.end(), other.violations.begin(),
                      other.violations.end());
    checked += other.checked;
  }
};

}  // namespace psh
