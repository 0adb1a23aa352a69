#pragma once

// Executes a parsed workspace: compiles models, materializes listed
// presheaves and runs merge/transfer/check directives in order.

#include <optional>
#include <string>
#include <vector>

#include "psh/dsl.hpp"
#include "psh/ops.hpp"

namespace psh {

struct Artifact {
  enum class Kind { model, presheaf, merged, transferred };

  std::string name;
  Kind kind = Kind::model;
  // Absent for listed presheaves.
  std::optional<Model> model;
  AssignmentPresheaf presheaf;
  std::optional<MergedModel> merge;
  std::vector<std::string> notes;
  // Inputs of derived artifacts: merge operands, or (identification, operand).
  std::vector<std::string> inputs;
};

std::string_view to_string(Artifact::Kind k) noexcept;

struct CheckOutcome {
  std::string target;
  std::string identification;
  std::string operand;
  LawReport report;
};

class Session {
 public:
  /// Throws MalformedInput when a directive cannot be carried out.
  explicit Session(Workspace ws);

  const Workspace& workspace() const noexcept { return ws_; }
  const std::vector<Artifact>& artifacts() const noexcept { return artifacts_; }
  const std::vector<CheckOutcome>& checks() const noexcept { return checks_; }

  const Artifact* find(std::string_view name) const;
  /// Throws MalformedInput naming the available artifacts.
  const Artifact& get(std::string_view name) const;
  /// Throws MalformedInput when `name` has no model (listed presheaves).
  const Model& model(std::string_view name) const;
  const FeatureIdentification& identification(std::string_view name) const;

 private:
  void add(Artifact a);
  void run(const Directive& d);

  Workspace ws_;
  std::vector<Artifact> artifacts_;
  std::vector<CheckOutcome> checks_;
};

Session load_session(const std::string& path);

}  // namespace psh
