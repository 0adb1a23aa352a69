#include "psh/ops.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "psh/error.hpp"

namespace psh {

namespace {

// Calls fn(tuple) for every element of the product of `ranges`, first
// coordinate varying slowest.
template <class Fn>
void for_each_tuple(const std::vector<const std::vector<std::string>*>& ranges, Fn&& fn) {
  for (const auto* r : ranges)
    if (r->empty()) return;
  std::vector<std::size_t> odo(ranges.size(), 0);
  std::vector<std::string> tuple(ranges.size());
  while (true) {
    for (std::size_t i = 0; i < ranges.size(); ++i) tuple[i] = (*ranges[i])[odo[i]];
    fn(tuple);
    std::size_t i = ranges.size();
    while (i > 0) {
      --i;
      if (++odo[i] < ranges[i]->size()) break;
      odo[i] = 0;
      if (i == 0) return;
    }
    if (ranges.empty()) return;
  }
}

Fiber* find_fiber(Model& m, std::string_view feature) {
  for (auto& f : m.fibers)
    if (f.feature == feature) return &f;
  return nullptr;
}

void append_value(Fiber& f, const std::string& value, const std::string& label) {
  if (!f.labels.empty() || !label.empty()) f.labels.resize(f.values.size());
  f.values.push_back(value);
  if (!f.labels.empty()) f.labels.push_back(label);
}

}  // namespace

// ---------------------------------------------------------------------------
// Edits

Model extend_fiber(const Model& m, std::string_view feature,
                   const std::vector<std::string>& new_values) {
  Model out = m;
  Fiber* f = find_fiber(out, feature);
  if (!f) throw MalformedInput("model '" + m.name + "' has no feature '" + std::string(feature) + "'");
  for (const auto& v : new_values) {
    if (f->contains(v))
      throw MalformedInput("value '" + v + "' already in the fiber of '" + f->feature + "'");
    append_value(*f, v, "");
  }
  return out;
}

Model add_feature(const Model& m, Fiber fiber) {
  if (m.has_feature(fiber.feature))
    throw MalformedInput("model '" + m.name + "' already has feature '" + fiber.feature + "'");
  Model out = m;
  out.fibers.push_back(std::move(fiber));
  validate_model(out);
  return out;
}

RemovalResult remove_feature(const Model& m, std::string_view feature) {
  if (!m.has_feature(feature))
    throw MalformedInput("model '" + m.name + "' has no feature '" + std::string(feature) + "'");
  RemovalResult r;
  r.model = m;
  auto& fibers = r.model.fibers;
  fibers.erase(std::remove_if(fibers.begin(), fibers.end(),
                              [&](const Fiber& f) { return f.feature == feature; }),
               fibers.end());
  r.model.tables.clear();
  for (const auto& t : m.tables) {
    if (!t.scope.contains(feature)) {
      r.model.tables.push_back(t);
      continue;
    }
    if (t.polarity == Polarity::forbid) {
      r.notes.push_back("dropped forbid table over " + t.scope.str() +
                        " (projection would not preserve its meaning)");
      continue;
    }
    const Subset rest = set_difference(t.scope, Subset{std::string(feature)});
    if (rest.empty()) {
      r.notes.push_back("dropped allow table over " + t.scope.str() + " (scope became empty)");
      continue;
    }
    ConstraintTable projected{rest, Polarity::allow, {}};
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < t.scope.size(); ++i)
      if (t.scope.members()[i] != feature) keep.push_back(i);
    for (const auto& tuple : t.tuples) {
      std::vector<std::string> p;
      for (auto i : keep) p.push_back(tuple[i]);
      projected.tuples.insert(std::move(p));
    }
    r.notes.push_back("projected allow table over " + t.scope.str() + " onto " + rest.str());
    r.model.tables.push_back(std::move(projected));
  }
  r.model.cover_seeds.clear();
  for (const auto& s : m.cover_seeds) {
    Subset rest = set_difference(s, Subset{std::string(feature)});
    if (!rest.empty()) r.model.cover_seeds.push_back(std::move(rest));
  }
  normalize(r.model);
  return r;
}

// ---------------------------------------------------------------------------
// Amalgamation

ConstraintTable guard_table(const ConstraintTable& table, const Model& source,
                            const Model& merged) {
  // A forbidden tuple only contains source values, so it can never match an
  // assignment that leaves the source fibers.
  if (table.polarity == Polarity::forbid) return table;
  ConstraintTable out = table;
  std::vector<const std::vector<std::string>*> ranges;
  std::vector<const Fiber*> src;
  for (const auto& x : table.scope) {
    ranges.push_back(&merged.fiber(x).values);
    src.push_back(&source.fiber(x));
  }
  for_each_tuple(ranges, [&](const std::vector<std::string>& tuple) {
    for (std::size_t i = 0; i < tuple.size(); ++i)
      if (!src[i]->contains(tuple[i])) {
        out.tuples.insert(tuple);
        return;
      }
  });
  return out;
}

bool violates_guarded(const ConstraintTable& table, const Model& source, const Assignment& a) {
  std::vector<std::string> tuple;
  for (const auto& x : table.scope) {
    const std::string& v = a.at(x);
    if (!source.fiber(x).contains(v)) return false;
    tuple.push_back(v);
  }
  return !table.admits(tuple);
}

MergedModel amalgamate(const Model& left, const Model& right, std::string name) {
  validate_model(left);
  validate_model(right);
  MergedModel out;
  out.result.name = name.empty() ? left.name + "_" + right.name : std::move(name);

  for (const auto& lf : left.fibers) {
    FeatureProvenance prov{lf.feature, lf.values, {}, {}};
    Fiber merged = lf;
    if (right.has_feature(lf.feature)) {
      const Fiber& rf = right.fiber(lf.feature);
      prov.right_values = rf.values;
      // Shared values must appear in the same relative order on both sides.
      std::vector<std::string> lcommon, rcommon;
      for (const auto& v : lf.values)
        if (rf.contains(v)) lcommon.push_back(v);
      for (const auto& v : rf.values)
        if (lf.contains(v)) rcommon.push_back(v);
      if (lcommon != rcommon)
        out.warnings.push_back("fiber of '" + lf.feature +
                               "' is ordered differently in the two models; using '" +
                               left.name + "' order");
      for (std::size_t i = 0; i < rf.values.size(); ++i)
        if (!merged.contains(rf.values[i]))
          append_value(merged, rf.values[i], i < rf.labels.size() ? rf.labels[i] : "");
    }
    for (const auto& v : merged.values) {
      const bool in_left = lf.contains(v);
      const bool in_right = !prov.right_values.empty() &&
                            std::find(prov.right_values.begin(), prov.right_values.end(), v) !=
                                prov.right_values.end();
      prov.origins.push_back(in_left && in_right ? ValueOrigin::shared
                             : in_left           ? ValueOrigin::left
                                                 : ValueOrigin::right);
    }
    out.result.fibers.push_back(std::move(merged));
    out.features.push_back(std::move(prov));
  }
  for (const auto& rf : right.fibers) {
    if (left.has_feature(rf.feature)) continue;
    out.result.fibers.push_back(rf);
    out.features.push_back({rf.feature, {}, rf.values,
                            std::vector<ValueOrigin>(rf.values.size(), ValueOrigin::right)});
  }

  auto import = [&](const Model& src, int which) {
    for (std::size_t i = 0; i < src.tables.size(); ++i) {
      const auto& t = src.tables[i];
      bool grown = false;
      for (const auto& x : t.scope)
        grown = grown || out.result.fiber(x).values.size() != src.fiber(x).values.size();
      ConstraintTable imported = grown ? guard_table(t, src, out.result) : t;
      out.tables.push_back({which, i, grown, imported});
      out.result.tables.push_back(std::move(imported));
    }
    for (const auto& s : src.cover_seeds) out.result.cover_seeds.push_back(s);
  };
  import(left, 1);
  import(right, 2);
  normalize(out.result);
  auto& tables = out.result.tables;
  tables.erase(std::unique(tables.begin(), tables.end()), tables.end());
  return out;
}

bool DiffReport::empty() const {
  return std::all_of(objects.begin(), objects.end(), [](const ObjectDiff& d) {
    return d.only_in_left.empty() && d.only_in_right.empty();
  });
}

namespace {

ObjectDiff compare_sets(const Subset& object, const std::set<Assignment>& l,
                        const std::set<Assignment>& r) {
  ObjectDiff d{object, {}, {}, {}};
  for (const auto& a : l) (r.count(a) ? d.common : d.only_in_left).push_back(a);
  for (const auto& a : r)
    if (!l.count(a)) d.only_in_right.push_back(a);
  return d;
}

std::set<Assignment> section_set(const AssignmentPresheaf& p, const Subset& u) {
  auto v = p.sections(u);
  return {v.begin(), v.end()};
}

}  // namespace

DiffReport diff(const AssignmentPresheaf& left, const AssignmentPresheaf& right) {
  DiffReport report;
  for (const auto& u : left.family().objects()) {
    if (!right.family().contains(u)) continue;
    report.objects.push_back(compare_sets(u, section_set(left, u), section_set(right, u)));
  }
  return report;
}

DiffReport overlap_union_report(const Model& left, const Model& right) {
  const MergedModel merged = amalgamate(left, right);
  const AssignmentPresheaf pl = compile(left), pr = compile(right), pm = compile(merged.result);
  const Subset overlap = set_intersection(left.features(), right.features());
  DiffReport report;
  for (const auto& w : pm.family().objects()) {
    if (w.empty() || !is_subobject(w, overlap)) continue;
    if (!pl.family().contains(w) || !pr.family().contains(w)) continue;
    std::set<Assignment> literal = section_set(pl, w);
    for (auto& a : pr.sections(w)) literal.insert(std::move(a));
    report.objects.push_back(compare_sets(w, literal, section_set(pm, w)));
  }
  return report;
}

std::vector<Assignment> emergent_sections(const MergedModel& merged, const Model& left,
                                          const Model& right) {
  const AssignmentPresheaf pm = compile(merged.result);
  const auto gl = global_sections(compile(left));
  const auto gr = global_sections(compile(right));
  const std::set<Assignment> sl(gl.begin(), gl.end()), sr(gr.begin(), gr.end());
  const Subset fl = left.features(), fr = right.features();
  std::vector<Assignment> out;
  for (const auto& g : global_sections(pm))
    if (!sl.count(restrict_assignment(g, fl)) || !sr.count(restrict_assignment(g, fr)))
      out.push_back(g);
  return out;
}

// ---------------------------------------------------------------------------
// Identifications and transfer

std::vector<Fiber> FeatureIdentification::target_fibers() const {
  std::vector<Fiber> out;
  for (const auto& c : features) {
    Fiber f{c.target, {}, {}};
    for (const auto& [tv, sv] : c.values) f.values.push_back(tv);
    out.push_back(std::move(f));
  }
  return out;
}

Subset FeatureIdentification::target_features() const {
  std::vector<std::string> names;
  for (const auto& c : features) names.push_back(c.target);
  return Subset(std::move(names));
}

const FeatureCorrespondence& FeatureIdentification::for_target(std::string_view target) const {
  for (const auto& c : features)
    if (c.target == target) return c;
  throw MalformedInput("identification '" + name + "' does not map '" + std::string(target) + "'");
}

Subset FeatureIdentification::image(const Subset& targets) const {
  std::vector<std::string> out;
  for (const auto& t : targets) out.push_back(for_target(t).source);
  return Subset(std::move(out));
}

namespace {

const std::string& map_value(const FeatureCorrespondence& c, const std::string& v) {
  for (const auto& [tv, sv] : c.values)
    if (tv == v) return sv;
  throw MalformedInput("value map " + c.target + " -> " + c.source + " is undefined on '" + v + "'");
}

}  // namespace

void validate_identification(const FeatureIdentification& h, const Model& source,
                             const Model* target) {
  std::set<std::string> targets, sources;
  for (const auto& c : h.features) {
    if (!is_valid_feature_name(c.target))
      throw MalformedInput("invalid feature name '" + c.target + "'");
    if (!targets.insert(c.target).second)
      throw MalformedInput("identification '" + h.name + "' maps '" + c.target + "' twice");
    if (!sources.insert(c.source).second)
      throw MalformedInput("identification '" + h.name + "' is not injective: '" + c.source +
                           "' is hit twice");
    const Fiber& sf = source.fiber(c.source);
    if (c.values.empty())
      throw MalformedInput("value map " + c.target + " -> " + c.source + " is empty");
    std::set<std::string> seen;
    for (const auto& [tv, sv] : c.values) {
      if (!seen.insert(tv).second)
        throw MalformedInput("value map " + c.target + " -> " + c.source + " lists '" + tv +
                             "' twice");
      if (!sf.contains(sv))
        throw MalformedInput("value '" + sv + "' is not in the fiber of '" + c.source +
                             "' in model '" + source.name + "'");
    }
  }
  if (!target) return;
  if (target->features() != h.target_features())
    throw MalformedInput("identification '" + h.name + "' maps " + h.target_features().str() +
                         " but model '" + target->name + "' has " + target->features().str());
  for (const auto& c : h.features) {
    const Fiber& tf = target->fiber(c.target);
    std::set<std::string> dom;
    for (const auto& [tv, sv] : c.values) dom.insert(tv);
    if (dom != std::set<std::string>(tf.values.begin(), tf.values.end()))
      throw MalformedInput("value map " + c.target + " -> " + c.source +
                           " is not total on the fiber of '" + c.target + "' in model '" +
                           target->name + "'");
  }
}

FeatureIdentification identity_identification(const Model& m) {
  FeatureIdentification h{"identity", m.name, m.name, {}};
  for (const auto& f : m.fibers) {
    FeatureCorrespondence c{f.feature, f.feature, {}};
    for (const auto& v : f.values) c.values.emplace_back(v, v);
    h.features.push_back(std::move(c));
  }
  return h;
}

Assignment map_assignment(const FeatureIdentification& h, const Assignment& a) {
  std::vector<std::pair<std::string, std::string>> bindings;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const auto& c = h.for_target(a.domain.members()[i]);
    bindings.emplace_back(c.source, map_value(c, a.values[i]));
  }
  return Assignment::from_bindings(std::move(bindings));
}

TransferResult transfer(const FeatureIdentification& h, const Model& source, std::string name) {
  validate_identification(h, source);
  TransferResult r;
  r.model.name = name.empty() ? source.name + "_via_" + h.name : std::move(name);
  r.model.fibers = h.target_fibers();

  std::map<std::string, const FeatureCorrespondence*> by_source;
  for (const auto& c : h.features) by_source[c.source] = &c;

  for (const auto& t : source.tables) {
    std::vector<std::string> preimage;
    std::string missing;
    for (const auto& x : t.scope) {
      auto it = by_source.find(x);
      if (it == by_source.end()) {
        missing = x;
        break;
      }
      preimage.push_back(it->second->target);
    }
    if (!missing.empty()) {
      r.notes.push_back("skipped " + std::string(to_string(t.polarity)) + " table over " +
                        t.scope.str() + ": '" + missing + "' is not identified");
      continue;
    }
    ConstraintTable out{Subset(std::move(preimage)), t.polarity, {}};
    std::vector<const std::vector<std::string>*> ranges;
    std::vector<const FeatureCorrespondence*> corr;
    for (const auto& tx : out.scope) {
      corr.push_back(&h.for_target(tx));
      ranges.push_back(nullptr);
    }
    const auto fibers = h.target_fibers();
    std::map<std::string, std::vector<std::string>> tvals;
    for (const auto& f : fibers) tvals[f.feature] = f.values;
    for (std::size_t i = 0; i < out.scope.size(); ++i) ranges[i] = &tvals[out.scope.members()[i]];
    for_each_tuple(ranges, [&](const std::vector<std::string>& tuple) {
      std::vector<std::pair<std::string, std::string>> image;
      for (std::size_t i = 0; i < tuple.size(); ++i)
        image.emplace_back(corr[i]->source, map_value(*corr[i], tuple[i]));
      const Assignment img = Assignment::from_bindings(std::move(image));
      if (t.tuples.count(img.values)) out.tuples.insert(tuple);
    });
    r.model.tables.push_back(std::move(out));
  }
  for (const auto& s : source.cover_seeds) {
    std::vector<std::string> pre;
    bool all = true;
    for (const auto& x : s) {
      auto it = by_source.find(x);
      if (it == by_source.end()) {
        all = false;
        break;
      }
      pre.push_back(it->second->target);
    }
    if (all) r.model.cover_seeds.push_back(Subset(std::move(pre)));
  }
  normalize(r.model);
  auto& tables = r.model.tables;
  tables.erase(std::unique(tables.begin(), tables.end()), tables.end());
  return r;
}

AssignmentPresheaf pullback_presheaf(const FeatureIdentification& h, const AssignmentPresheaf& q) {
  for (const auto& c : h.features) {
    const Fiber& sf = q.fiber(c.source);
    for (const auto& [tv, sv] : c.values)
      if (!sf.contains(sv))
        throw MalformedInput("value '" + sv + "' is not in the fiber of '" + c.source + "'");
  }
  const CoverFamily family = close_family(h.target_features());
  AssignmentPresheaf out(family, h.target_fibers());
  for (std::size_t obj = 0; obj < family.size(); ++obj) {
    const Subset& c = family.objects()[obj];
    std::vector<const std::vector<std::string>*> ranges;
    std::vector<std::vector<std::string>> vals;
    vals.reserve(c.size());
    for (const auto& x : c) {
      std::vector<std::string> v;
      for (const auto& [tv, sv] : h.for_target(x).values) v.push_back(tv);
      vals.push_back(std::move(v));
    }
    for (const auto& v : vals) ranges.push_back(&v);
    for_each_tuple(ranges, [&](const std::vector<std::string>& tuple) {
      Assignment a(c, tuple);
      if (q.contains(map_assignment(h, a))) out.add(a);
    });
  }
  return out;
}

LawReport analogy_check(const FeatureIdentification& h, const Model& source, const Model& target) {
  LawReport report;
  try {
    validate_identification(h, source, &target);
  } catch (const MalformedInput& e) {
    report.fail("identification", e.what());
    return report;
  }
  const AssignmentPresheaf moved = compile(transfer(h, source).model);
  const AssignmentPresheaf actual = compile(target);
  for (const auto& d : diff(moved, actual).objects) {
    ++report.checked;
    for (const auto& a : d.only_in_left)
      report.fail("missing-in-target", d.object.str() + ": " + a.str());
    for (const auto& a : d.only_in_right)
      report.fail("extra-in-target", d.object.str() + ": " + a.str());
  }
  return report;
}

}  // namespace psh
