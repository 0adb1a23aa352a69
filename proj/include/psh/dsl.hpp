#pragma once

// Text format for models (.psh) and workspaces (.pshw).
//
//   format 1
//   model Org
//   feature size: l | s
//   feature levels: m label "many" | f label "few"
//   cover: {levels, size}
//   forbid (size, levels): (s, m)
//
//   presheaf Literal            # sections listed object by object
//   feature a: x | y
//   sections (a): (x)
//
//   include "other.psh"
//   identify h: Target -> Source {
//     feature t -> s { v1 -> w1, v2 -> w1 }
//   }
//   merge AB = A + B
//   transfer T = h of AB
//   check Target = h of AB
//
// Lines are independent statements except inside identify braces. `#` starts
// a comment. Names must be defined before they are referenced.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "psh/error.hpp"
#include "psh/model.hpp"
#include "psh/ops.hpp"

namespace psh {

struct Directive {
  enum class Kind { merge, transfer, check };

  Kind kind = Kind::merge;
  // merge/transfer: the name being defined; check: the model checked against.
  std::string result;
  std::string left, right;              // merge operands
  std::string identification, operand;  // transfer / check
  SourceSpan span;

  friend bool operator==(const Directive& a, const Directive& b) {
    return a.kind == b.kind && a.result == b.result && a.left == b.left &&
           a.right == b.right && a.identification == b.identification &&
           a.operand == b.operand;
  }
};

struct Workspace {
  enum class ItemKind { model, presheaf, identification, directive };

  std::vector<Model> models;
  std::vector<ListedPresheaf> presheaves;
  std::vector<FeatureIdentification> identifications;
  std::vector<Directive> directives;
  // Definition order across all kinds, as (kind, index into its vector).
  std::vector<std::pair<ItemKind, std::size_t>> order;

  friend bool operator==(const Workspace&, const Workspace&) = default;
};

// Returns the contents of `path`; throws Error when unreadable.
using IncludeLoader = std::function<std::string(const std::string& path)>;

std::string read_file(const std::string& path);

/// Exactly one model block (an optional `format 1` header is allowed).
Model parse_model(std::string_view text, const std::string& file = {});

/// `include` paths resolve relative to the directory of `file`.
Workspace parse_workspace(std::string_view text, const std::string& file = {},
                          const IncludeLoader& loader = read_file);

Workspace load_workspace(const std::string& path);

std::string serialize(const Model& m);
std::string serialize(const Workspace& w);

/// serialize(parse(text)); a workspace holding a single model serializes
/// exactly like that model.
std::string canonicalize(std::string_view text, const std::string& file = {});

}  // namespace psh
