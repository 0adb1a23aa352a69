#include "psh/workspace.hpp"

#include "psh/error.hpp"

namespace psh {

std::string_view to_string(Artifact::Kind k) noexcept {
  switch (k) {
    case Artifact::Kind::model: return "model";
    case Artifact::Kind::presheaf: return "presheaf";
    case Artifact::Kind::merged: return "merged";
    case Artifact::Kind::transferred: return "transferred";
  }
  return "?";
}

Session::Session(Workspace ws) : ws_(std::move(ws)) {
  for (const auto& [kind, idx] : ws_.order) {
    switch (kind) {
      case Workspace::ItemKind::model: {
        const Model& m = ws_.models[idx];
        Artifact a;
        a.name = m.name;
        a.kind = Artifact::Kind::model;
        a.model = m;
        a.presheaf = compile(m);
        add(std::move(a));
        break;
      }
      case Workspace::ItemKind::presheaf: {
        const ListedPresheaf& p = ws_.presheaves[idx];
        Artifact a;
        a.name = p.name;
        a.kind = Artifact::Kind::presheaf;
        a.presheaf = materialize(p);
        add(std::move(a));
        break;
      }
      case Workspace::ItemKind::identification:
        break;
      case Workspace::ItemKind::directive:
        run(ws_.directives[idx]);
        break;
    }
  }
}

void Session::add(Artifact a) { artifacts_.push_back(std::move(a)); }

const Artifact* Session::find(std::string_view name) const {
  for (const auto& a : artifacts_)
    if (a.name == name) return &a;
  return nullptr;
}

const Artifact& Session::get(std::string_view name) const {
  if (const Artifact* a = find(name)) return *a;
  std::string known;
  for (const auto& a : artifacts_) known += (known.empty() ? "" : ", ") + a.name;
  throw MalformedInput("no artifact named '" + std::string(name) + "' (available: " +
                       (known.empty() ? "none" : known) + ")");
}

const Model& Session::model(std::string_view name) const {
  const Artifact& a = get(name);
  if (!a.model)
    throw MalformedInput("'" + a.name + "' is a listed presheaf and has no constraint model");
  return *a.model;
}

const FeatureIdentification& Session::identification(std::string_view name) const {
  for (const auto& h : ws_.identifications)
    if (h.name == name) return h;
  throw MalformedInput("no identification named '" + std::string(name) + "'");
}

void Session::run(const Directive& d) {
  const std::string where = "line " + std::to_string(d.span.line) + ": ";
  try {
    switch (d.kind) {
      case Directive::Kind::merge: {
        MergedModel merged = amalgamate(model(d.left), model(d.right), d.result);
        Artifact a;
        a.name = d.result;
        a.kind = Artifact::Kind::merged;
        a.model = merged.result;
        a.presheaf = compile(merged.result);
        a.notes = merged.warnings;
        a.merge = std::move(merged);
        a.inputs = {d.left, d.right};
        add(std::move(a));
        break;
      }
      case Directive::Kind::transfer: {
        const FeatureIdentification& h = identification(d.identification);
        const Model& source = model(d.operand);
        const Artifact* target = find(h.target_model);
        validate_identification(h, source, target && target->model ? &*target->model : nullptr);
        TransferResult t = transfer(h, source, d.result);
        Artifact a;
        a.name = d.result;
        a.kind = Artifact::Kind::transferred;
        a.model = t.model;
        a.presheaf = compile(t.model);
        a.notes = std::move(t.notes);
        a.inputs = {d.identification, d.operand};
        add(std::move(a));
        break;
      }
      case Directive::Kind::check: {
        const FeatureIdentification& h = identification(d.identification);
        const Model& source = model(d.operand);
        const Model& target = model(d.result);
        validate_identification(h, source, &target);
        checks_.push_back({d.result, d.identification, d.operand, analogy_check(h, source, target)});
        break;
      }
    }
  } catch (const BoundRefusal&) {
    throw;
  } catch (const MalformedInput& e) {
    throw MalformedInput(where + e.what());
  }
}

Session load_session(const std::string& path) { return Session(load_workspace(path)); }

}  // namespace psh
