#include "psh/presheaf.hpp"

#include <algorithm>
#include <bit>

#include "psh/error.hpp"

namespace psh {

std::optional<std::size_t> Fiber::index_of(std::string_view value) const {
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

const std::string& Fiber::label(std::size_t i) const {
  if (i < labels.size() && !labels[i].empty()) return labels[i];
  return values.at(i);
}

Assignment::Assignment(Subset d, std::vector<std::string> v)
    : domain(std::move(d)), values(std::move(v)) {
  if (domain.size() != values.size())
    throw MalformedInput("assignment over " + domain.str() + " needs " +
                         std::to_string(domain.size()) + " values, got " +
                         std::to_string(values.size()));
}

Assignment Assignment::from_bindings(
    std::vector<std::pair<std::string, std::string>> bindings) {
  std::sort(bindings.begin(), bindings.end());
  for (std::size_t i = 1; i < bindings.size(); ++i)
    if (bindings[i].first == bindings[i - 1].first)
      throw MalformedInput("feature '" + bindings[i].first + "' bound twice");
  std::vector<std::string> names, values;
  for (auto& [f, v] : bindings) {
    names.push_back(std::move(f));
    values.push_back(std::move(v));
  }
  return Assignment(Subset(std::move(names)), std::move(values));
}

const std::string& Assignment::at(std::string_view feature) const {
  const auto& m = domain.members();
  auto it = std::lower_bound(m.begin(), m.end(), feature);
  if (it == m.end() || *it != feature)
    throw MalformedInput("assignment does not bind '" + std::string(feature) + "'");
  return values[static_cast<std::size_t>(it - m.begin())];
}

std::string Assignment::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += domain.members()[i] + "=" + values[i];
  }
  return out + ")";
}

Assignment restrict_assignment(const Assignment& a, const Subset& u) {
  if (!is_subobject(u, a.domain))
    throw MalformedInput("cannot restrict " + a.str() + " to " + u.str() +
                         ": not contained in its domain");
  std::vector<std::string> values;
  values.reserve(u.size());
  for (const auto& x : u) values.push_back(a.at(x));
  return Assignment(u, std::move(values));
}

// ---------------------------------------------------------------------------

AssignmentPresheaf::AssignmentPresheaf(CoverFamily family, std::vector<Fiber> fibers)
    : family_(std::move(family)) {
  const auto& names = family_.universe().members();
  if (fibers.size() != names.size())
    throw MalformedInput("presheaf needs one fiber per feature of " +
                         family_.universe().str());
  std::sort(fibers.begin(), fibers.end(),
            [](const Fiber& a, const Fiber& b) { return a.feature < b.feature; });
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (fibers[i].feature != names[i])
      throw MalformedInput("fiber for '" + fibers[i].feature +
                           "' does not match the universe " + family_.universe().str());
    if (fibers[i].values.empty())
      throw MalformedInput("fiber of '" + names[i] + "' is empty");
  }
  fibers_ = std::move(fibers);
  sections_.resize(family_.size());
}

const Fiber& AssignmentPresheaf::fiber(std::string_view feature) const {
  return fibers_[family_.feature_index(feature)];
}

AssignmentPresheaf::Tuple AssignmentPresheaf::encode(const Assignment& a) const {
  Tuple t;
  t.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const Fiber& f = fiber(a.domain.members()[i]);
    auto idx = f.index_of(a.values[i]);
    if (!idx)
      throw MalformedInput("value '" + a.values[i] + "' is not in the fiber of '" +
                           f.feature + "'");
    t.push_back(static_cast<std::uint16_t>(*idx));
  }
  return t;
}

Assignment AssignmentPresheaf::decode(std::size_t object, const Tuple& t) const {
  const Subset& dom = family_.objects()[object];
  std::vector<std::string> values;
  values.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    values.push_back(fibers_[family_.feature_index(dom.members()[i])].values.at(t[i]));
  return Assignment(dom, std::move(values));
}

std::vector<Assignment> AssignmentPresheaf::sections(const Subset& u) const {
  const std::size_t obj = family_.index_of(u);
  std::vector<Assignment> out;
  out.reserve(sections_[obj].size());
  for (const auto& t : sections_[obj]) out.push_back(decode(obj, t));
  return out;
}

std::size_t AssignmentPresheaf::count(const Subset& u) const {
  return sections_[family_.index_of(u)].size();
}

bool AssignmentPresheaf::contains(const Assignment& a) const {
  auto obj = family_.find(a.domain);
  if (!obj) return false;
  Tuple t;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    auto idx = fibers_[family_.feature_index(a.domain.members()[i])].index_of(a.values[i]);
    if (!idx) return false;
    t.push_back(static_cast<std::uint16_t>(*idx));
  }
  return sections_[*obj].count(t) > 0;
}

void AssignmentPresheaf::add(const Assignment& a) {
  sections_[family_.index_of(a.domain)].insert(encode(a));
}

std::vector<std::size_t> projection_positions(Mask outer, Mask inner) {
  std::vector<std::size_t> pos;
  std::size_t rank = 0;
  for (unsigned bit = 0; bit < 32; ++bit) {
    const Mask b = Mask{1} << bit;
    if (!(outer & b)) continue;
    if (inner & b) pos.push_back(rank);
    ++rank;
  }
  return pos;
}

AssignmentPresheaf::Tuple project_tuple(const AssignmentPresheaf::Tuple& t,
                                        std::span<const std::size_t> positions) {
  AssignmentPresheaf::Tuple out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(t[p]);
  return out;
}

namespace {

// Calls fn(sub_index) for every family object strictly contained in masks[v].
template <class Fn>
void for_each_proper_subobject(const CoverFamily& family, std::size_t v, Fn&& fn) {
  const Mask outer = family.masks()[v];
  if (outer == 0) return;
  for (Mask sub = (outer - 1) & outer;; sub = (sub - 1) & outer) {
    if (auto u = family.find(sub)) fn(*u);
    if (sub == 0) break;
  }
}

}  // namespace

LawReport validate_laws(const AssignmentPresheaf& p) {
  LawReport report;
  const auto& family = p.family();
  for (std::size_t v = 0; v < family.size(); ++v) {
    const Mask outer = family.masks()[v];
    const auto width = static_cast<std::size_t>(std::popcount(outer));
    const Subset& dom = family.objects()[v];
    for (const auto& t : p.tuples(v)) {
      ++report.checked;
      bool ok = t.size() == width;
      for (std::size_t i = 0; ok && i < t.size(); ++i)
        ok = t[i] < p.fiber(dom.members()[i]).values.size();
      if (!ok) report.fail("fiber", "section over " + dom.str() + " is not well-typed");
    }
    for_each_proper_subobject(family, v, [&](std::size_t u) {
      const auto pos = projection_positions(outer, family.masks()[u]);
      const auto& below = p.tuples(u);
      for (const auto& t : p.tuples(v)) {
        ++report.checked;
        if (t.size() != width) continue;
        if (!below.count(project_tuple(t, pos)))
          report.fail("restriction-closure", family.objects()[u].str() + " ⊆ " + dom.str() +
                                                 ": " + p.decode(v, t).str());
      }
    });
  }
  return report;
}

std::pair<AssignmentPresheaf, std::vector<ClosureAdditions>> closure_complete(
    const AssignmentPresheaf& p) {
  AssignmentPresheaf out = p;
  const auto& family = p.family();
  std::vector<std::size_t> order(family.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(family.masks()[a]) > std::popcount(family.masks()[b]);
  });
  // Every superset of an object is final before the object itself is
  // projected further down.
  for (std::size_t v : order) {
    const Mask outer = family.masks()[v];
    for_each_proper_subobject(family, v, [&](std::size_t u) {
      const auto pos = projection_positions(outer, family.masks()[u]);
      for (const auto& t : out.tuples(v)) out.add_tuple(u, project_tuple(t, pos));
    });
  }
  std::vector<ClosureAdditions> report;
  for (std::size_t i = 0; i < family.size(); ++i) {
    ClosureAdditions add{family.objects()[i], {}};
    for (const auto& t : out.tuples(i))
      if (!p.tuples(i).count(t)) add.added.push_back(out.decode(i, t));
    if (!add.added.empty()) report.push_back(std::move(add));
  }
  return {std::move(out), std::move(report)};
}

std::vector<Assignment> global_sections(const AssignmentPresheaf& p) {
  return p.sections(p.family().universe());
}

namespace {

void require_local_section(const AssignmentPresheaf& p, const Assignment& a) {
  if (!p.family().contains(a.domain))
    throw MalformedInput("domain " + a.domain.str() + " of " + a.str() +
                         " is not an object of the cover family");
  (void)p.encode(a);
  if (!p.contains(a)) throw MalformedInput(a.str() + " is not a local section");
}

}  // namespace

std::vector<Assignment> extensions(const AssignmentPresheaf& p, const Assignment& a,
                                   const Subset& v) {
  require_local_section(p, a);
  const std::size_t target = p.family().index_of(v);
  if (!is_subobject(a.domain, v))
    throw MalformedInput("target " + v.str() + " does not contain the domain " +
                         a.domain.str());
  const auto pos = projection_positions(p.family().masks()[target], p.family().mask_of(a.domain));
  const auto key = p.encode(a);
  std::vector<Assignment> out;
  for (const auto& t : p.tuples(target))
    if (project_tuple(t, pos) == key) out.push_back(p.decode(target, t));
  return out;
}

std::vector<Subset> blocking_sets(const AssignmentPresheaf& p, const Assignment& a) {
  require_local_section(p, a);
  const auto& family = p.family();
  const Mask dom = family.mask_of(a.domain);
  const auto key = p.encode(a);
  std::vector<Mask> blocked;
  for (std::size_t w = 0; w < family.size(); ++w) {
    const Mask m = family.masks()[w];
    if ((m & dom) != dom) continue;
    const auto pos = projection_positions(m, dom);
    const auto& secs = p.tuples(w);
    bool extends = std::any_of(secs.begin(), secs.end(),
                               [&](const auto& t) { return project_tuple(t, pos) == key; });
    if (!extends) blocked.push_back(m);
  }
  std::vector<Subset> minimal;
  for (Mask m : blocked) {
    bool has_smaller = std::any_of(blocked.begin(), blocked.end(), [&](Mask o) {
      return o != m && (o & m) == o;
    });
    if (!has_smaller) minimal.push_back(family.subset_of(m));
  }
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

}  // namespace psh
