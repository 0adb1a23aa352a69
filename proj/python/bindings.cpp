#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "psh/abstract.hpp"
#include "psh/cli.hpp"
#include "psh/dsl.hpp"
#include "psh/error.hpp"
#include "psh/model.hpp"
#include "psh/ops.hpp"
#include "psh/render.hpp"
#include "psh/workspace.hpp"

namespace py = pybind11;
using namespace psh;

namespace {

using Bindings = std::map<std::string, std::string>;

Bindings to_dict(const Assignment& a) {
  Bindings out;
  for (std::size_t i = 0; i < a.values.size(); ++i) out[a.domain.members()[i]] = a.values[i];
  return out;
}

std::vector<Bindings> to_dicts(const std::vector<Assignment>& v) {
  std::vector<Bindings> out;
  for (const auto& a : v) out.push_back(to_dict(a));
  return out;
}

Assignment from_dict(const Bindings& b) { return Assignment::from_bindings({b.begin(), b.end()}); }

Subset subset(const std::vector<std::string>& xs) { return Subset(xs); }

}  // namespace

PYBIND11_MODULE(_presheaf, m) {
  m.doc() = "Finite presheaf models of feature spaces";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<BoundRefusal>(m, "BoundRefusal", error.ptr());
  py::register_exception<MalformedInput>(m, "MalformedInput", error.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", error.ptr());

  py::class_<Violation>(m, "Violation")
      .def_readonly("law", &Violation::law)
      .def_readonly("witness", &Violation::witness)
      .def("__repr__", [](const Violation& v) { return v.law + ": " + v.witness; });

  py::class_<LawReport>(m, "LawReport")
      .def_readonly("violations", &LawReport::violations)
      .def_readonly("checked", &LawReport::checked)
      .def_property_readonly("passed", &LawReport::passed)
      .def("__bool__", &LawReport::passed);

  py::class_<Model>(m, "Model")
      .def_readonly("name", &Model::name)
      .def_property_readonly("features", [](const Model& x) { return x.features().members(); })
      .def_property_readonly("fibers",
                             [](const Model& x) {
                               std::map<std::string, std::vector<std::string>> out;
                               for (const auto& f : x.fibers) out[f.feature] = f.values;
                               return out;
                             })
      .def("__str__", [](const Model& x) { return serialize(x); })
      .def("__eq__", [](const Model& a, const Model& b) { return a == b; });

  py::class_<AssignmentPresheaf>(m, "Presheaf")
      .def_property_readonly("objects",
                             [](const AssignmentPresheaf& p) {
                               std::vector<std::vector<std::string>> out;
                               for (const auto& o : p.family().objects()) out.push_back(o.members());
                               return out;
                             })
      .def("sections",
           [](const AssignmentPresheaf& p, const std::vector<std::string>& u) {
             return to_dicts(p.sections(subset(u)));
           })
      .def("count", [](const AssignmentPresheaf& p,
                       const std::vector<std::string>& u) { return p.count(subset(u)); })
      .def("contains", [](const AssignmentPresheaf& p, const Bindings& b) {
        return p.contains(from_dict(b));
      });

  py::class_<MergedModel>(m, "MergedModel")
      .def_readonly("model", &MergedModel::result)
      .def_readonly("warnings", &MergedModel::warnings);

  py::class_<FeatureIdentification>(m, "Identification")
      .def_readonly("name", &FeatureIdentification::name)
      .def_readonly("target_model", &FeatureIdentification::target_model)
      .def_readonly("source_model", &FeatureIdentification::source_model);

  py::class_<Session>(m, "Session")
      .def_property_readonly("artifacts",
                             [](const Session& s) {
                               std::vector<std::string> out;
                               for (const auto& a : s.artifacts()) out.push_back(a.name);
                               return out;
                             })
      .def("presheaf", [](const Session& s, const std::string& n) { return s.get(n).presheaf; })
      .def("model", [](const Session& s, const std::string& n) { return s.model(n); })
      .def("identification",
           [](const Session& s, const std::string& n) { return s.identification(n); })
      .def_property_readonly("checks", [](const Session& s) {
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& c : s.checks()) out.emplace_back(c.target, c.report.passed());
        return out;
      });

  m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"));
  m.def("load_model", [](const std::string& path) { return parse_model(read_file(path), path); },
        py::arg("path"));
  m.def("load_session", &load_session, py::arg("path"));
  m.def("canonicalize", [](const std::string& text) { return canonicalize(text); }, py::arg("text"));
  m.def("random_model", [](std::uint64_t seed) { return random_model(seed); }, py::arg("seed"));

  m.def("compile", &compile, py::arg("model"));
  m.def("global_sections",
        [](const AssignmentPresheaf& p) { return to_dicts(global_sections(p)); });
  m.def("validate_laws", py::overload_cast<const AssignmentPresheaf&>(&validate_laws));
  m.def("oracle_sections", [](const Model& x, const std::vector<std::string>& u) {
    const auto s = oracle_sections(x, subset(u));
    return to_dicts({s.begin(), s.end()});
  });
  m.def("extensions", [](const AssignmentPresheaf& p, const Bindings& a,
                         const std::vector<std::string>& v) {
    return to_dicts(extensions(p, from_dict(a), subset(v)));
  });
  m.def("blocking_sets", [](const AssignmentPresheaf& p, const Bindings& a) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : blocking_sets(p, from_dict(a))) out.push_back(s.members());
    return out;
  });

  m.def("amalgamate", &amalgamate, py::arg("left"), py::arg("right"), py::arg("name") = "");
  m.def("emergent_sections", [](const MergedModel& mm, const Model& l, const Model& r) {
    return to_dicts(emergent_sections(mm, l, r));
  });
  m.def("transfer",
        [](const FeatureIdentification& h, const Model& src, const std::string& name) {
          return transfer(h, src, name).model;
        },
        py::arg("h"), py::arg("source"), py::arg("name") = "");
  m.def("analogy_check", &analogy_check);

  m.def("check_adjunction_triple",
        [](const std::vector<std::string>& s1, const std::vector<std::string>& s2) {
          return check_adjunction_triple(subset(s1), subset(s2));
        });
  m.def("yoneda_count", [](std::size_t n, std::uint64_t seed, const std::vector<std::string>& d) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    const AbstractPresheaf f = random_abstract_presheaf(close_family(Subset(names)), seed);
    const YonedaResult r = yoneda_check(f, subset(d));
    return py::make_tuple(r.report.passed(), r.transformations, f.count(subset(d)));
  });

  m.def("render_canvas", [](const Model& x) {
    return render_canvas(x.fibers, global_sections(compile(x)), x.name);
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
