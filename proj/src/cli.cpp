#include "psh/cli.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "psh/abstract.hpp"
#include "psh/dsl.hpp"
#include "psh/error.hpp"
#include "psh/render.hpp"
#include "psh/workspace.hpp"

namespace psh {

namespace {

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

using json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string workspace;
  std::string format = "text";
  std::uint64_t seed = 1;
  std::uint64_t max_enum = kMaxNatCandidates;

  bool machine() const { return format == "machine"; }
};

// ---------------------------------------------------------------------------
// Shared helpers

json to_json(const Assignment& a) {
  json j = json::object();
  for (std::size_t i = 0; i < a.domain.size(); ++i) j[a.domain.members()[i]] = a.values[i];
  return j;
}

json to_json(const Subset& s) { return json(s.members()); }

json to_json(const std::vector<Assignment>& as) {
  json j = json::array();
  for (const auto& a : as) j.push_back(to_json(a));
  return j;
}

json to_json(const LawReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"law", x.law}, {"witness", x.witness}});
  return json{{"checked", r.checked}, {"violations", v}};
}

void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// Accepts "a,b", "{a,b}", "{}" and "".
Subset parse_object_spec(std::string spec) {
  spec = trim(spec);
  if (!spec.empty() && spec.front() == '{') {
    if (spec.back() != '}') throw UsageError("unbalanced braces in object '" + spec + "'");
    spec = spec.substr(1, spec.size() - 2);
  }
  std::vector<std::string> names;
  for (auto& n : split(spec, ','))
    if (!n.empty()) names.push_back(n);
  return Subset(std::move(names));
}

Subset resolve_object(const AssignmentPresheaf& p, const std::string& spec) {
  const Subset u = parse_object_spec(spec);
  if (p.family().contains(u)) return u;
  std::vector<std::pair<std::size_t, Subset>> ranked;
  for (const auto& o : p.family().objects()) {
    const std::size_t d = set_difference(o, u).size() + set_difference(u, o).size();
    ranked.emplace_back(d, o);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string near;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i)
    near += (i ? ", " : "") + ranked[i].second.str();
  throw UsageError("object " + u.str() + " is not in the cover family; nearest: " + near);
}

// "f=v,g=w"; the empty string is the empty assignment.
Assignment parse_assignment_literal(const AssignmentPresheaf& p, const std::string& text) {
  std::vector<std::pair<FeatureId, std::string>> bindings;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected feature=value, found '" + item + "'");
    const std::string f = trim(item.substr(0, eq)), v = trim(item.substr(eq + 1));
    if (!p.family().universe().contains(f)) throw UsageError("unknown feature '" + f + "'");
    if (!p.fiber(f).contains(v)) {
      std::string expected;
      for (const auto& x : p.fiber(f).values) expected += (expected.empty() ? "" : ", ") + x;
      throw UsageError("value '" + v + "' is not in the fiber of '" + f + "' (expected one of " +
                       expected + ")");
    }
    bindings.emplace_back(f, v);
  }
  try {
    return Assignment::from_bindings(std::move(bindings));
  } catch (const MalformedInput& e) {
    throw UsageError(e.what());
  }
}

struct Target {
  Session session;
  std::vector<std::string> rest;
};

Target open(const Globals& g, std::vector<std::string> positionals) {
  std::string path = g.workspace;
  if (path.empty()) {
    if (positionals.empty()) throw UsageError("missing workspace path (or --workspace)");
    path = positionals.front();
    positionals.erase(positionals.begin());
  }
  return Target{load_session(path), std::move(positionals)};
}

const Artifact& pick(const Session& s, const std::vector<std::string>& rest, std::size_t index) {
  if (index < rest.size()) return s.get(rest[index]);
  if (s.artifacts().size() == 1) return s.artifacts().front();
  std::string names;
  for (const auto& a : s.artifacts()) names += (names.empty() ? "" : ", ") + a.name;
  throw UsageError("name an artifact (available: " + names + ")");
}

void expect_at_most(const std::vector<std::string>& rest, std::size_t n, const char* usage) {
  if (rest.size() > n) throw UsageError(std::string("too many arguments; usage: ") + usage);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

// ---------------------------------------------------------------------------
// check

struct SuiteEntry {
  std::string subject;
  LawReport report;
  std::string detail;
  bool skipped = false;
};

struct Suite {
  std::string name;
  std::vector<SuiteEntry> entries;

  bool passed() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const SuiteEntry& e) { return e.report.passed(); });
  }
};

Suite closure_suite(const Session& s) {
  Suite suite{"closure", {}};
  for (const auto& a : s.artifacts()) {
    SuiteEntry e{a.name, validate_laws(a.presheaf), {}, false};
    if (e.report.passed()) {
      e.detail = std::to_string(e.report.checked) + " restriction pairs checked";
    } else {
      const auto [fixed, additions] = closure_complete(a.presheaf);
      std::size_t n = 0;
      for (const auto& add : additions) n += add.added.size();
      e.detail = "closure completion adds " + plural(n, "section");
      for (const auto& add : additions)
        for (const auto& x : add.added) e.detail += "\n    + " + add.object.str() + " " + x.str();
    }
    suite.entries.push_back(std::move(e));
  }
  return suite;
}

Suite analogy_suite(const Session& s) {
  Suite suite{"analogy", {}};
  for (const auto& c : s.checks())
    suite.entries.push_back({c.target + " = " + c.identification + " of " + c.operand, c.report,
                             c.report.passed() ? "square commutes objectwise" : "", false});
  return suite;
}

Suite yoneda_suite(const Session& s, std::uint64_t max_enum) {
  Suite suite{"yoneda", {}};
  for (const auto& a : s.artifacts()) {
    SuiteEntry e{a.name, {}, {}, false};
    if (!validate_laws(a.presheaf).passed()) {
      e.skipped = true;
      e.detail = "skipped: not a presheaf (see closure)";
      suite.entries.push_back(std::move(e));
      continue;
    }
    const AbstractPresheaf f = to_abstract(a.presheaf);
    e.report.merge(validate_laws(f));
    std::size_t verified = 0, skipped = 0;
    for (const auto& d : f.family().objects()) {
      try {
        e.report.merge(yoneda_check(f, d, max_enum).report);
        ++verified;
      } catch (const BoundRefusal&) {
        ++skipped;
      }
    }
    e.detail = std::to_string(verified) + " objects verified";
    if (skipped) e.detail += ", " + std::to_string(skipped) + " skipped (bound " +
                             std::to_string(max_enum) + ")";
    suite.entries.push_back(std::move(e));
  }
  return suite;
}

Suite adjunction_suite(const Session& s) {
  Suite suite{"adjunction", {}};
  std::set<Subset> seen;
  for (const auto& a : s.artifacts()) {
    const Subset universe = a.presheaf.family().universe();
    if (!seen.insert(universe).second) continue;
    SuiteEntry e{universe.str(), {}, {}, false};
    const auto& names = universe.members();
    const std::size_t n = names.size();
    std::size_t triples = 0;
    for (Mask m2 = 0; m2 < (Mask{1} << n); ++m2) {
      if (static_cast<std::size_t>(std::popcount(m2)) > kMaxAdjunctionFeatures) continue;
      std::vector<std::string> s2;
      for (std::size_t i = 0; i < n; ++i)
        if (m2 >> i & 1u) s2.push_back(names[i]);
      for (Mask m1 = m2;; m1 = (m1 - 1) & m2) {
        std::vector<std::string> s1;
        for (std::size_t i = 0; i < n; ++i)
          if (m1 >> i & 1u) s1.push_back(names[i]);
        e.report.merge(check_adjunction_triple(Subset(s1), Subset(s2)));
        ++triples;
        if (m1 == 0) break;
      }
    }
    e.detail = std::to_string(triples) + " pairs S1 ⊆ S2 with |S2| <= " +
               std::to_string(kMaxAdjunctionFeatures);
    suite.entries.push_back(std::move(e));
  }
  return suite;
}

Suite lattice_suite(const Session& s) {
  Suite suite{"lattice", {}};
  std::set<Subset> seen;
  for (const auto& a : s.artifacts()) {
    const CoverFamily& fam = a.presheaf.family();
    if (!seen.insert(fam.universe()).second) continue;
    SuiteEntry e{fam.universe().str(), {}, {}, false};
    try {
      e.report = check_lattice_laws(fam);
      e.detail = std::to_string(fam.size()) + " objects";
    } catch (const BoundRefusal& r) {
      e.skipped = true;
      e.detail = "skipped: " + std::to_string(r.required()) + " features exceed the sweep bound " +
                 std::to_string(r.limit());
    }
    suite.entries.push_back(std::move(e));
  }
  return suite;
}

constexpr std::size_t kMaxWitnessLines = 10;

int cmd_check(const Globals& g, const std::vector<std::string>& positionals,
              const std::string& laws, std::ostream& out) {
  Target t = open(g, positionals);
  expect_at_most(t.rest, 0, "psh check <workspace> [--laws LIST]");
  static const std::vector<std::string> kAll{"closure", "analogy", "yoneda", "adjunction",
                                             "lattice"};
  std::vector<std::string> selected;
  if (laws.empty() || laws == "all") {
    selected = kAll;
  } else {
    for (auto& l : split(laws, ',')) {
      if (std::find(kAll.begin(), kAll.end(), l) == kAll.end())
        throw UsageError("unknown law suite '" + l + "' (choose from closure, analogy, yoneda, "
                         "adjunction, lattice)");
      selected.push_back(l);
    }
  }
  std::vector<Suite> suites;
  for (const auto& name : kAll) {
    if (std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
    if (name == "closure") suites.push_back(closure_suite(t.session));
    if (name == "analogy") suites.push_back(analogy_suite(t.session));
    if (name == "yoneda") suites.push_back(yoneda_suite(t.session, g.max_enum));
    if (name == "adjunction") suites.push_back(adjunction_suite(t.session));
    if (name == "lattice") suites.push_back(lattice_suite(t.session));
  }
  const bool ok = std::all_of(suites.begin(), suites.end(), [](const Suite& s) { return s.passed(); });

  if (g.machine()) {
    json js = json::array();
    for (const auto& s : suites) {
      json entries = json::array();
      for (const auto& e : s.entries) {
        json je = to_json(e.report);
        je["subject"] = e.subject;
        je["skipped"] = e.skipped;
        je["detail"] = e.detail;
        entries.push_back(std::move(je));
      }
      js.push_back({{"suite", s.name}, {"passed", s.passed()}, {"entries", entries}});
    }
    emit_json(out, {{"passed", ok}, {"suites", js}});
  } else {
    for (const auto& s : suites) {
      out << s.name << ": " << (s.passed() ? "ok" : "FAIL") << "\n";
      for (const auto& e : s.entries) {
        out << "  " << e.subject << ": " << (e.report.passed() ? "" : "FAIL ") << e.detail << "\n";
        for (std::size_t i = 0; i < e.report.violations.size() && i < kMaxWitnessLines; ++i)
          out << "    " << e.report.violations[i].law << ": " << e.report.violations[i].witness
              << "\n";
        if (e.report.violations.size() > kMaxWitnessLines)
          out << "    (" << e.report.violations.size() - kMaxWitnessLines << " more)\n";
      }
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// sections / extend

int cmd_sections(const Globals& g, const std::vector<std::string>& positionals,
                 const std::string& object, bool count_only, std::ostream& out) {
  Target t = open(g, positionals);
  expect_at_most(t.rest, 1, "psh sections <workspace> [artifact] [--object OBJ] [--count]");
  const Artifact& a = pick(t.session, t.rest, 0);
  const Subset u =
      object.empty() ? a.presheaf.family().universe() : resolve_object(a.presheaf, object);
  const auto secs = a.presheaf.sections(u);
  if (g.machine()) {
    json j{{"artifact", a.name}, {"object", to_json(u)}, {"count", secs.size()}};
    if (!count_only) j["sections"] = to_json(secs);
    emit_json(out, j);
  } else if (count_only) {
    out << secs.size() << "\n";
  } else {
    for (const auto& s : secs) out << s.str() << "\n";
  }
  return kExitOk;
}

int cmd_extend(const Globals& g, const std::vector<std::string>& positionals,
               const std::string& object, std::ostream& out) {
  Target t = open(g, positionals);
  if (t.rest.empty()) throw UsageError("missing assignment literal (feature=value,...)");
  expect_at_most(t.rest, 2, "psh extend <workspace> [artifact] <f=v,...> [--object OBJ]");
  const std::string literal = t.rest.back();
  t.rest.pop_back();
  const Artifact& a = pick(t.session, t.rest, 0);
  const Assignment asg = parse_assignment_literal(a.presheaf, literal);
  const Subset target =
      object.empty() ? a.presheaf.family().universe() : resolve_object(a.presheaf, object);
  std::vector<Assignment> exts;
  try {
    exts = extensions(a.presheaf, asg, target);
  } catch (const MalformedInput& e) {
    throw UsageError(e.what());
  }
  std::vector<Subset> blocking;
  if (exts.empty()) blocking = blocking_sets(a.presheaf, asg);
  if (g.machine()) {
    json b = json::array();
    for (const auto& s : blocking) b.push_back(to_json(s));
    emit_json(out, {{"artifact", a.name},
                    {"assignment", to_json(asg)},
                    {"target", to_json(target)},
                    {"extensions", to_json(exts)},
                    {"blocking_sets", b}});
    return kExitOk;
  }
  if (exts.empty()) {
    out << "no extension of " << asg.str() << " to " << target.str() << "\n";
    out << "blocking sets:\n";
    for (const auto& s : blocking) out << "  " << s.str() << "\n";
  } else {
    for (const auto& e : exts) out << e.str() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// merge / transfer / diff

std::string origin_str(ValueOrigin o) {
  switch (o) {
    case ValueOrigin::left: return "left";
    case ValueOrigin::right: return "right";
    case ValueOrigin::shared: return "both";
  }
  return "?";
}

std::string table_header(const ConstraintTable& t) {
  std::string s = std::string(to_string(t.polarity)) + " (";
  for (std::size_t i = 0; i < t.scope.size(); ++i) s += (i ? ", " : "") + t.scope.members()[i];
  return s + ")";
}

void print_diff(std::ostream& out, const DiffReport& d, const std::string& left_label,
                const std::string& right_label) {
  for (const auto& o : d.objects) {
    if (o.only_in_left.empty() && o.only_in_right.empty()) continue;
    out << "  " << o.object.str() << ":\n";
    for (const auto& a : o.only_in_left) out << "    only in " << left_label << ": " << a.str() << "\n";
    for (const auto& a : o.only_in_right)
      out << "    only in " << right_label << ": " << a.str() << "\n";
  }
}

json diff_json(const DiffReport& d) {
  json j = json::array();
  for (const auto& o : d.objects)
    j.push_back({{"object", to_json(o.object)},
                 {"only_in_left", to_json(o.only_in_left)},
                 {"only_in_right", to_json(o.only_in_right)},
                 {"common", o.common.size()}});
  return j;
}

int cmd_merge(const Globals& g, const std::vector<std::string>& positionals,
              const std::string& name, const std::string& emit, std::ostream& out) {
  Target t = open(g, positionals);
  if (t.rest.size() != 2) throw UsageError("usage: psh merge <workspace> <left> <right>");
  const Model& left = t.session.model(t.rest[0]);
  const Model& right = t.session.model(t.rest[1]);
  const MergedModel merged = amalgamate(left, right, name);
  const AssignmentPresheaf pm = compile(merged.result);
  const auto globals = global_sections(pm);
  const auto emergent = emergent_sections(merged, left, right);
  const DiffReport overlap = overlap_union_report(left, right);
  if (!emit.empty()) write_file(emit, serialize(merged.result));

  if (g.machine()) {
    json feats = json::array();
    for (const auto& f : merged.features) {
      json origins = json::array();
      for (auto o : f.origins) origins.push_back(origin_str(o));
      feats.push_back({{"feature", f.feature},
                       {"values", merged.result.fiber(f.feature).values},
                       {"origins", origins}});
    }
    json tables = json::array();
    for (const auto& tp : merged.tables)
      tables.push_back({{"source", tp.source == 1 ? "left" : "right"},
                        {"index", tp.index},
                        {"guarded", tp.guarded},
                        {"table", table_header(tp.imported)},
                        {"tuples", tp.imported.tuples.size()}});
    emit_json(out, {{"name", merged.result.name},
                    {"features", feats},
                    {"tables", tables},
                    {"warnings", merged.warnings},
                    {"global_sections", to_json(globals)},
                    {"emergent_sections", to_json(emergent)},
                    {"overlap", diff_json(overlap)},
                    {"emitted", emit}});
    return kExitOk;
  }
  out << "merged " << left.name << " + " << right.name << " -> " << merged.result.name << ": "
      << plural(merged.result.fibers.size(), "feature") << ", "
      << plural(globals.size(), "global section") << "\n";
  out << "features:\n";
  for (const auto& f : merged.features) {
    const auto& values = merged.result.fiber(f.feature).values;
    out << "  " << f.feature << ":";
    for (std::size_t i = 0; i < values.size(); ++i)
      out << (i ? ", " : " ") << values[i] << " (" << origin_str(f.origins[i]) << ")";
    out << "\n";
  }
  out << "tables:\n";
  for (const auto& tp : merged.tables)
    out << "  " << (tp.source == 1 ? left.name : right.name) << "[" << tp.index << "] "
        << table_header(tp.imported) << (tp.guarded ? " guarded" : "") << ", "
        << plural(tp.imported.tuples.size(), "tuple") << "\n";
  for (const auto& w : merged.warnings) out << "warning: " << w << "\n";
  out << "emergent sections:\n";
  for (const auto& e : emergent) out << "  " << e.str() << "\n";
  if (emergent.empty()) out << "  (none)\n";
  out << "overlap (literal union vs amalgam):\n";
  bool any = false;
  for (const auto& o : overlap.objects) any = any || !o.only_in_left.empty() || !o.only_in_right.empty();
  if (any) {
    print_diff(out, overlap, "union", "amalgam");
  } else {
    out << "  identical on " << plural(overlap.objects.size(), "object") << "\n";
  }
  if (!emit.empty()) out << "wrote " << emit << "\n";
  return kExitOk;
}

int cmd_transfer(const Globals& g, const std::vector<std::string>& positionals,
                 const std::string& name, const std::string& emit, std::ostream& out) {
  Target t = open(g, positionals);
  if (t.rest.size() != 2) throw UsageError("usage: psh transfer <workspace> <identification> <model>");
  const FeatureIdentification& h = t.session.identification(t.rest[0]);
  const Model& source = t.session.model(t.rest[1]);
  const Artifact* target = t.session.find(h.target_model);
  const Model* target_model = target && target->model ? &*target->model : nullptr;
  validate_identification(h, source, target_model);
  const TransferResult tr = transfer(h, source, name);
  const auto globals = global_sections(compile(tr.model));
  std::optional<LawReport> analogy;
  if (target_model) analogy = analogy_check(h, source, *target_model);
  if (!emit.empty()) write_file(emit, serialize(tr.model));
  const bool ok = !analogy || analogy->passed();

  if (g.machine()) {
    json j{{"name", tr.model.name},
           {"identification", h.name},
           {"source", source.name},
           {"notes", tr.notes},
           {"global_sections", to_json(globals)}};
    if (analogy) {
      json a = to_json(*analogy);
      a["target"] = h.target_model;
      a["passed"] = analogy->passed();
      j["analogy"] = a;
    }
    j["emitted"] = emit;
    emit_json(out, j);
    return ok ? kExitOk : kExitCheckFailed;
  }
  out << "transferred " << source.name << " along " << h.name << " -> " << tr.model.name << ": "
      << plural(tr.model.tables.size(), "table") << ", "
      << plural(globals.size(), "global section") << "\n";
  for (const auto& n : tr.notes) out << "note: " << n << "\n";
  out << "global sections:\n";
  for (const auto& s : globals) out << "  " << s.str() << "\n";
  if (analogy) {
    out << "analogy against " << h.target_model << ": "
        << (analogy->passed() ? "commutes" : "FAIL") << "\n";
    for (std::size_t i = 0; i < analogy->violations.size() && i < kMaxWitnessLines; ++i)
      out << "  " << analogy->violations[i].law << ": " << analogy->violations[i].witness << "\n";
  }
  if (!emit.empty()) out << "wrote " << emit << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_diff(const Globals& g, const std::vector<std::string>& positionals, std::ostream& out) {
  Target t = open(g, positionals);
  if (t.rest.size() != 2) throw UsageError("usage: psh diff <workspace> <left> <right>");
  const Artifact& l = t.session.get(t.rest[0]);
  const Artifact& r = t.session.get(t.rest[1]);
  const DiffReport d = diff(l.presheaf, r.presheaf);
  if (g.machine()) {
    emit_json(out, {{"left", l.name}, {"right", r.name}, {"empty", d.empty()}, {"objects", diff_json(d)}});
    return kExitOk;
  }
  if (d.empty()) {
    out << "no differences on " << plural(d.objects.size(), "shared object") << "\n";
  } else {
    print_diff(out, d, l.name, r.name);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// render / random / fmt

int cmd_render(const Globals& g, const std::vector<std::string>& positionals, std::ostream& out) {
  Target t = open(g, positionals);
  if (t.rest.empty()) throw UsageError("missing render format (dot or canvas)");
  expect_at_most(t.rest, 2, "psh render <workspace> [artifact] dot|canvas");
  const std::string format = t.rest.back();
  t.rest.pop_back();
  if (format != "dot" && format != "canvas")
    throw UsageError("unknown render format '" + format + "' (expected dot or canvas)");
  std::string text;
  if (format == "dot" && t.rest.empty() && t.session.artifacts().size() != 1) {
    text = render_workspace_dot(t.session);
  } else {
    const Artifact& a = pick(t.session, t.rest, 0);
    if (format == "dot") {
      text = render_hasse_dot(a.presheaf, a.name);
    } else {
      std::vector<Fiber> columns;
      if (a.model) {
        columns = a.model->fibers;
      } else {
        columns.assign(a.presheaf.fibers().begin(), a.presheaf.fibers().end());
      }
      text = render_canvas(columns, global_sections(a.presheaf), a.name);
    }
  }
  if (g.machine()) {
    emit_json(out, {{"format", format}, {"text", text}});
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_random(const Globals& g, std::size_t max_features, std::ostream& out) {
  RandomModelLimits limits;
  if (max_features) limits.max_features = max_features;
  const std::string text = serialize(random_model(g.seed, limits));
  if (g.machine()) {
    emit_json(out, {{"seed", g.seed}, {"text", text}});
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_fmt(const Globals& g, const std::vector<std::string>& positionals, std::ostream& out) {
  std::string path = g.workspace;
  if (path.empty()) {
    if (positionals.size() != 1) throw UsageError("usage: psh fmt <file>");
    path = positionals.front();
  }
  const std::string text = canonicalize(read_file(path), path);
  if (g.machine()) {
    emit_json(out, {{"file", path}, {"text", text}});
  } else {
    out << text;
  }
  return kExitOk;
}

int report_error(const Globals& g, std::ostream& out, std::ostream& err, const std::string& kind,
                 const std::string& message, int code, const ParseError* pe = nullptr) {
  err << "psh: " << message << "\n";
  if (g.machine()) {
    json j{{"kind", kind}, {"message", message}, {"exit", code}};
    if (pe) {
      j["file"] = pe->file();
      j["line"] = pe->span().line;
      j["column"] = pe->span().column;
      j["length"] = pe->span().length;
    }
    emit_json(out, {{"error", j}});
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"Finite presheaf models: compile, query, merge, transfer and render.", "psh"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("-w,--workspace", g.workspace, "Workspace (.pshw) or model (.psh) file");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "machine"}));
  app.add_option("--seed", g.seed, "Seed for random models");
  app.add_option("--max-enum", g.max_enum, "Bound on enumerated candidates")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> pos;
  std::string laws, object, name, emit;
  bool count_only = false;
  std::size_t max_features = 0;

  auto* check = app.add_subcommand("check", "Validate presheaf, analogy and lattice laws");
  check->add_option("args", pos, "[workspace]");
  check->add_option("--laws", laws, "closure,analogy,yoneda,adjunction,lattice");

  auto* sections = app.add_subcommand("sections", "List sections on an object");
  sections->add_option("args", pos, "[workspace] [artifact]");
  sections->add_option("--object", object, "Object such as {a,b}; default: all features");
  sections->add_flag("--count", count_only, "Print the number of sections only");

  auto* extend = app.add_subcommand("extend", "Extend a local section, or explain why not");
  extend->add_option("args", pos, "[workspace] [artifact] f=v,...");
  extend->add_option("--object", object, "Target object; default: all features");

  auto* merge = app.add_subcommand("merge", "Amalgamate two models");
  merge->add_option("args", pos, "[workspace] left right");
  merge->add_option("--name", name, "Name of the merged model");
  merge->add_option("--emit", emit, "Write the merged model to this .psh file");

  auto* xfer = app.add_subcommand("transfer", "Transfer a model along an identification");
  xfer->add_option("args", pos, "[workspace] identification model");
  xfer->add_option("--name", name, "Name of the transferred model");
  xfer->add_option("--emit", emit, "Write the transferred model to this .psh file");

  auto* diffc = app.add_subcommand("diff", "Compare two artifacts objectwise");
  diffc->add_option("args", pos, "[workspace] left right");

  auto* render = app.add_subcommand("render", "Render a Hasse diagram, workspace graph or canvas");
  render->add_option("args", pos, "[workspace] [artifact] dot|canvas");

  auto* random = app.add_subcommand("random", "Print a seeded random model");
  random->add_option("--features", max_features, "Maximum number of features")
      ->check(CLI::Range(1, 12));

  auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a file");
  fmt->add_option("args", pos, "[file]");

  std::vector<std::string> argv_storage{"psh"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(g, out, err, "usage", e.what(), kExitUsage);
  }

  try {
    if (check->parsed()) return cmd_check(g, pos, laws, out);
    if (sections->parsed()) return cmd_sections(g, pos, object, count_only, out);
    if (extend->parsed()) return cmd_extend(g, pos, object, out);
    if (merge->parsed()) return cmd_merge(g, pos, name, emit, out);
    if (xfer->parsed()) return cmd_transfer(g, pos, name, emit, out);
    if (diffc->parsed()) return cmd_diff(g, pos, out);
    if (render->parsed()) return cmd_render(g, pos, out);
    if (random->parsed()) return cmd_random(g, max_features, out);
    if (fmt->parsed()) return cmd_fmt(g, pos, out);
  } catch (const ParseError& e) {
    return report_error(g, out, err, "parse", e.what(), kExitUsage, &e);
  } catch (const BoundRefusal& e) {
    return report_error(g, out, err, "refused", e.what(), kExitRefused);
  } catch (const UsageError& e) {
    return report_error(g, out, err, "usage", e.what(), kExitUsage);
  } catch (const MalformedInput& e) {
    return report_error(g, out, err, "input", e.what(), kExitUsage);
  } catch (const Error& e) {
    return report_error(g, out, err, "error", e.what(), kExitUsage);
  }
  return report_error(g, out, err, "usage", "no subcommand", kExitUsage);
}

}  // namespace psh
