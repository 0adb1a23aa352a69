#include "psh/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psh {

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

}  // namespace

std::string render_hasse_dot(const AssignmentPresheaf& p, const std::string& name) {
  const CoverFamily& f = p.family();
  std::ostringstream os;
  os << "digraph \"" << dot_escape(name) << "\" {\n"
     << "  rankdir=BT;\n"
     << "  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    os << "  n" << i << " [label=\"" << dot_escape(f.objects()[i].str()) << "\\n"
       << plural(p.tuples(i).size(), "section") << "\"];\n";
  const auto masks = f.masks();
  for (std::size_t u = 0; u < f.size(); ++u) {
    for (std::size_t v = 0; v < f.size(); ++v) {
      if (u == v || (masks[u] & masks[v]) != masks[u]) continue;
      bool covering = true;
      for (std::size_t w = 0; w < f.size() && covering; ++w) {
        if (w == u || w == v) continue;
        if ((masks[u] & masks[w]) == masks[u] && (masks[w] & masks[v]) == masks[w])
          covering = false;
      }
      if (covering) os << "  n" << u << " -> n" << v << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string render_workspace_dot(const Session& s) {
  std::ostringstream os;
  os << "digraph workspace {\n"
     << "  rankdir=BT;\n"
     << "  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& a : s.artifacts()) {
    const auto globals = global_sections(a.presheaf);
    os << "  \"" << dot_escape(a.name) << "\" [label=\"" << dot_escape(a.name) << "\\n"
       << dot_escape(a.presheaf.family().universe().str()) << "\\n"
       << plural(globals.size(), "global section") << "\""
       << (a.kind == Artifact::Kind::presheaf ? ", shape=ellipse" : "") << "];\n";
  }
  for (const auto& h : s.workspace().identifications)
    os << "  \"" << dot_escape(h.target_model) << "\" -> \"" << dot_escape(h.source_model)
       << "\" [label=\"" << dot_escape(h.name) << "\", style=dashed];\n";
  for (const auto& a : s.artifacts()) {
    if (a.kind == Artifact::Kind::merged) {
      for (const auto& in : a.inputs)
        os << "  \"" << dot_escape(in) << "\" -> \"" << dot_escape(a.name)
           << "\" [label=\"inclusion\"];\n";
    } else if (a.kind == Artifact::Kind::transferred) {
      os << "  \"" << dot_escape(a.inputs[1]) << "\" -> \"" << dot_escape(a.name)
         << "\" [label=\"" << dot_escape(a.inputs[0]) << "*\", style=dashed];\n";
    }
  }
  for (const auto& c : s.checks())
    os << "  \"" << dot_escape(c.target) << "\" -> \"" << dot_escape(c.operand)
       << "\" [label=\"check " << dot_escape(c.identification) << ": "
       << (c.report.passed() ? "commutes" : "fails") << "\", style=dotted];\n";
  os << "}\n";
  return os.str();
}

std::string render_canvas(const std::vector<Fiber>& columns,
                          const std::vector<Assignment>& sections, const std::string& title) {
  std::ostringstream os;
  os << title << ": " << plural(sections.size(), "section") << "\n";
  if (columns.empty()) return os.str();

  std::size_t width = 8;
  for (const auto& f : columns) width = std::max(width, f.feature.size() + 2);
  std::size_t rows = 1;
  for (const auto& f : columns) rows = std::max(rows, f.values.size());
  const std::size_t margin = 3;
  const std::size_t height = 2 * (rows - 1) + 1;
  const std::size_t grid_width = margin + width * (columns.size() - 1) + 1;
  std::vector<std::string> grid(height, std::string(grid_width, ' '));
  auto xcol = [&](std::size_t j) { return margin + j * width; };

  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t r = 0; r < columns[j].values.size(); ++r) grid[2 * r][xcol(j)] = '.';

  const std::size_t drawn = std::min(sections.size(), kMaxCanvasLines);
  for (std::size_t k = 0; k < drawn; ++k) {
    const char mark = static_cast<char>('A' + k);
    std::vector<std::size_t> ys;
    for (const auto& f : columns)
      ys.push_back(2 * *f.index_of(sections[k].at(f.feature)));
    for (std::size_t j = 0; j + 1 < columns.size(); ++j) {
      const auto x0 = static_cast<long>(xcol(j)), x1 = static_cast<long>(xcol(j + 1));
      const auto y0 = static_cast<long>(ys[j]), y1 = static_cast<long>(ys[j + 1]);
      for (long x = x0 + 1; x < x1; ++x) {
        const long y = y0 + std::lround(static_cast<double>((y1 - y0) * (x - x0)) / (x1 - x0));
        if (y1 != y0 && (y == y0 || y == y1)) continue;
        const char c = y1 == y0 ? '-' : (y1 < y0 ? '/' : '\\');
        char& cell = grid[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
        cell = (cell == ' ' || cell == c) ? c : 'x';
      }
    }
    for (std::size_t j = 0; j < columns.size(); ++j) {
      char& cell = grid[ys[j]][xcol(j)];
      cell = cell == '.' ? mark : '*';
    }
  }

  std::string header(grid_width + width, ' ');
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& name = columns[j].feature;
    const std::size_t start = xcol(j) >= name.size() / 2 ? xcol(j) - name.size() / 2 : 0;
    header.replace(start, name.size(), name);
  }
  header.erase(header.find_last_not_of(' ') + 1);
  os << header << "\n";
  for (std::size_t y = 0; y < height; ++y) {
    std::string line = grid[y];
    if (y % 2 == 0) line.replace(0, 2, (y / 2 < 10 ? " " : "") + std::to_string(y / 2));
    line.erase(line.find_last_not_of(' ') + 1);
    os << line << "\n";
  }
  os << "\nrows:\n";
  for (const auto& f : columns) {
    os << "  " << f.feature << ":";
    for (std::size_t r = 0; r < f.values.size(); ++r) os << " " << r << "=" << f.values[r];
    os << "\n";
  }
  os << "lines:\n";
  for (std::size_t k = 0; k < drawn; ++k)
    os << "  " << static_cast<char>('A' + k) << " " << sections[k].str() << "\n";
  if (sections.size() > drawn) os << "  (" << sections.size() - drawn << " more not drawn)\n";
  return os.str();
}

}  // namespace psh
