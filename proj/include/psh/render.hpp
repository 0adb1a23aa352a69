#pragma once

// Batch renderings: DOT graphs and ASCII strategy canvases.

#include <string>
#include <vector>

#include "psh/presheaf.hpp"
#include "psh/workspace.hpp"

namespace psh {

/// Hasse diagram of the cover family, each node annotated with its number of
/// sections. Edges run from an object to the objects covering it.
std::string render_hasse_dot(const AssignmentPresheaf& p, const std::string& name);

/// One node per artifact; inclusion edges from merge operands, h* edges from
/// transfer operands, h edges from identification targets to sources.
std::string render_workspace_dot(const Session& s);

inline constexpr std::size_t kMaxCanvasLines = 26;

/// Features as columns (in the given order), fiber values as rows (first value
/// on top), one lettered polyline per section. At most kMaxCanvasLines are
/// drawn; the rest are counted.
std::string render_canvas(const std::vector<Fiber>& columns,
                          const std::vector<Assignment>& sections, const std::string& title);

}  // namespace psh
