#include <doctest.h>

#include "psh/dsl.hpp"
#include "psh/error.hpp"
#include "psh/render.hpp"
#include "psh/workspace.hpp"
#include "support/support.hpp"

using namespace psh;
namespace ps = psh::support;

TEST_CASE("hub session") {
  const Session s = load_session(ps::model_path("hub.pshw"));
  REQUIRE(s.artifacts().size() == 6);
  CHECK(s.get("IMovieHub").kind == Artifact::Kind::merged);
  CHECK(s.get("IMovieHub").inputs == std::vector<std::string>{"PC", "Camcorder"});
  CHECK(s.get("ITunesHub").kind == Artifact::Kind::transferred);
  CHECK(s.get("ITunesHub").inputs == std::vector<std::string>{"h", "IMovieHub"});
  REQUIRE(s.checks().size() == 1);
  CHECK(s.checks()[0].report.passed());
  CHECK(global_sections(s.get("DigitalHub").presheaf).size() == 18);
  CHECK(s.find("Nope") == nullptr);
  try {
    (void)s.get("Nope");
    FAIL("expected MalformedInput");
  } catch (const MalformedInput& e) {
    CHECK(std::string(e.what()).find("IMovieHub") != std::string::npos);
  }
}

TEST_CASE("listed presheaves have no model") {
  const Session s = load_session(ps::model_path("camcorder_literal.pshw"));
  const Artifact& a = s.get("CamcorderLiteral");
  CHECK(a.kind == Artifact::Kind::presheaf);
  CHECK_FALSE(a.model.has_value());
  CHECK_FALSE(validate_laws(a.presheaf).passed());
  CHECK_THROWS_AS((void)s.model("CamcorderLiteral"), MalformedInput);
}

TEST_CASE("directive failures name their line") {
  const std::string text =
      "model A\nfeature x: 1\nmodel B\nfeature y: 2\n"
      "identify h: A -> B {\n  feature x -> y { 1 -> 2 }\n}\n"
      "check B = h of B\n";
  try {
    Session s(parse_workspace(text));
    FAIL("expected MalformedInput");
  } catch (const MalformedInput& e) {
    CHECK(std::string(e.what()).rfind("line 8: ", 0) == 0);
  }
}

TEST_CASE("hasse diagram covers") {
  const AssignmentPresheaf p = compile(ps::load_model("org.psh"));
  const std::string dot = render_hasse_dot(p, "Org");
  CHECK(dot.find("n0 -> n1;") != std::string::npos);
  CHECK(dot.find("n0 -> n3;") == std::string::npos);
  CHECK(dot.find("3 sections") != std::string::npos);
}

TEST_CASE("canvas marks conflicts") {
  const Model org = ps::load_model("org.psh");
  const AssignmentPresheaf p = compile(org);
  const std::string c = render_canvas(org.fibers, global_sections(p), "Org");
  CHECK(c.rfind("Org: 3 sections", 0) == 0);
  CHECK(c.find("A") != std::string::npos);
  CHECK(c.find("C") != std::string::npos);
  const Model cross = parse_model("model X\nfeature a: p | q\nfeature b: p | q\nforbid (a, b): (p, p), (q, q)\n");
  const std::string xc = render_canvas(cross.fibers, global_sections(compile(cross)), "X");
  CHECK(xc.find("\n     xxxx\n") != std::string::npos);
  const std::string wine = render_canvas(ps::load_model("wine.psh").fibers,
                                         global_sections(compile(ps::load_model("wine.psh"))), "Wine");
  const auto first = wine.find('\n', wine.find('\n') + 1);
  const std::string drawing = wine.substr(first, wine.find("rows:") - first);
  CHECK(drawing.find('x') == std::string::npos);
  CHECK(drawing.find('A') != std::string::npos);
}
