#pragma once

// Change operators on models: fiber and feature edits, guarded amalgamation,
// transfer along feature identifications, and the reports that explain them.

#include <string>
#include <utility>
#include <vector>

#include "psh/abstract.hpp"
#include "psh/model.hpp"
#include "psh/presheaf.hpp"
#include "psh/report.hpp"

namespace psh {

// ---------------------------------------------------------------------------
// Edits

Model extend_fiber(const Model& m, std::string_view feature,
                   const std::vector<std::string>& new_values);

Model add_feature(const Model& m, Fiber fiber);

struct RemovalResult {
  Model model;
  std::vector<std::string> notes;
};

/// Projects allow tables onto scope \ {x}; forbid tables mentioning x and
/// tables whose scope becomes empty are dropped. Every change is noted.
RemovalResult remove_feature(const Model& m, std::string_view feature);

// ---------------------------------------------------------------------------
// Amalgamation

enum class ValueOrigin { left, right, shared };

struct FeatureProvenance {
  FeatureId feature;
  std::vector<std::string> left_values;   // empty when absent from the left model
  std::vector<std::string> right_values;  // empty when absent from the right model
  // Parallel to the merged fiber.
  std::vector<ValueOrigin> origins;
};

struct TableProvenance {
  int source = 1;         // 1 = left, 2 = right
  std::size_t index = 0;  // position in the source model's table list
  // Whether some scope feature's fiber grew, so the guard can switch off.
  bool guarded = false;
  ConstraintTable imported;
};

struct MergedModel {
  Model result;
  std::vector<FeatureProvenance> features;
  std::vector<TableProvenance> tables;
  std::vector<std::string> warnings;
};

/// A table from a source model imported into a model whose fibers may be
/// larger: an assignment on the scope passes iff some value lies outside the
/// source fibers or the original table admits it. Forbid tables need no
/// rewriting; allow tables gain every tuple that leaves the source fibers.
ConstraintTable guard_table(const ConstraintTable& table, const Model& source,
                            const Model& merged);

/// Feature set union, fiber union on shared features (left values first),
/// every source table imported guarded.
MergedModel amalgamate(const Model& left, const Model& right, std::string name = {});

/// Whether `a` (binding every scope feature) stays inside the source fibers on
/// the scope while violating the source table.
bool violates_guarded(const ConstraintTable& table, const Model& source, const Assignment& a);

struct ObjectDiff {
  Subset object;
  std::vector<Assignment> only_in_left;
  std::vector<Assignment> only_in_right;
  std::vector<Assignment> common;
};

struct DiffReport {
  std::vector<ObjectDiff> objects;
  bool empty() const;
};

/// Objectwise comparison over the objects both presheaves share.
DiffReport diff(const AssignmentPresheaf& left, const AssignmentPresheaf& right);

/// For every object W inside both feature sets: left = literal union
/// Q1(W) ∪ Q2(W), right = sections of the amalgam on W. only_in_right lists
/// the cross-combinations the amalgam admits that neither source had.
DiffReport overlap_union_report(const Model& left, const Model& right);

/// Global sections of the merged model whose restriction to some source's
/// feature set is not a global section of that source.
std::vector<Assignment> emergent_sections(const MergedModel& merged, const Model& left,
                                          const Model& right);

// ---------------------------------------------------------------------------
// Identifications and transfer

struct FeatureCorrespondence {
  FeatureId target;
  FeatureId source;
  // Total on the target fiber, in target fiber order.
  std::vector<std::pair<std::string, std::string>> values;

  friend bool operator==(const FeatureCorrespondence&, const FeatureCorrespondence&) = default;
};

/// h: target features -> source features (injective), with per-feature value
/// maps from the target fiber into the source fiber.
struct FeatureIdentification {
  std::string name;
  std::string target_model;
  std::string source_model;
  std::vector<FeatureCorrespondence> features;

  std::vector<Fiber> target_fibers() const;
  Subset target_features() const;
  // Image of a set of target features.
  Subset image(const Subset& targets) const;
  const FeatureCorrespondence& for_target(std::string_view target) const;

  friend bool operator==(const FeatureIdentification&, const FeatureIdentification&) = default;
};

/// Checks injectivity, value-map totality and that every image lies in the
/// source model's fibers. When `target` is given, also checks its features
/// and fibers match the identification's target side.
void validate_identification(const FeatureIdentification& h, const Model& source,
                             const Model* target = nullptr);

FeatureIdentification identity_identification(const Model& m);

struct TransferResult {
  Model model;
  std::vector<std::string> notes;
};

/// Target model whose tables are the preimages of the source tables: a target
/// tuple is listed iff its value-mapped image is listed. Tables mentioning an
/// unmapped source feature are skipped and noted.
TransferResult transfer(const FeatureIdentification& h, const Model& source,
                        std::string name = {});

/// (h*Q)(C) = value-map preimage of Q(h(C)), over the family of the target
/// features.
AssignmentPresheaf pullback_presheaf(const FeatureIdentification& h, const AssignmentPresheaf& q);

/// Objectwise equality of compile(transfer(h, source)) and compile(target).
LawReport analogy_check(const FeatureIdentification& h, const Model& source, const Model& target);

/// Image under h of a target assignment (target features -> source features).
Assignment map_assignment(const FeatureIdentification& h, const Assignment& a);

}  // namespace psh
