#include <doctest.h>

#include <map>

#include "psh/dsl.hpp"
#include "psh/error.hpp"
#include "support/support.hpp"

using namespace psh;
namespace ps = psh::support;

namespace {

ParseError parse_error(std::string_view text) {
  try {
    parse_workspace(text, "t.psh");
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for:\n" << text);
  return ParseError("", {}, "");
}

struct Bad {
  const char* text;
  SourceSpan span;
  const char* needle;
};

}  // namespace

TEST_CASE("parse org") {
  const Model m = parse_model(read_file(ps::model_path("org.psh")));
  CHECK(m.name == "Org");
  REQUIRE(m.fibers.size() == 2);
  CHECK(m.fibers[0].feature == "size");
  CHECK(m.fibers[0].values == std::vector<std::string>{"l", "s"});
  CHECK(m.fibers[1].labels[0] == "many hierarchical levels");
  REQUIRE(m.tables.size() == 1);
  // scopes are stored sorted, tuples permuted to match
  CHECK(m.tables[0].scope == Subset{"levels", "size"});
  CHECK(m.tables[0].polarity == Polarity::forbid);
  CHECK(m.tables[0].tuples == std::set<std::vector<std::string>>{{"m", "s"}});
}

TEST_CASE("features-only model and cover lines") {
  const Model m = parse_model("model M\nfeature a: x\nfeature b: y | z\ncover: {a, b}, {a}\n");
  CHECK(m.tables.empty());
  CHECK(m.cover_seeds == std::vector<Subset>{{"a"}, {"a", "b"}});
  CHECK(compile(m).count(m.features()) == 2);
}

TEST_CASE("value outside its fiber") {
  const ParseError e = parse_error("model M\nfeature size: l | s\nallow (size): (xl)\n");
  CHECK(e.span() == SourceSpan{3, 16, 2});
  CHECK(e.message().find("'xl'") != std::string::npos);
  CHECK(e.message().find("l, s") != std::string::npos);
  CHECK(std::string(e.what()).rfind("t.psh:3:16:", 0) == 0);
}

TEST_CASE("malformed inputs report exact spans") {
  const std::vector<Bad> corpus{
      {"model M\nfeature a: x | x\n", {2, 16, 1}, "duplicate value"},
      {"model M\nfeature a: x\nfeature a: y\n", {3, 9, 1}, "declared twice"},
      {"model M\nfeature a: x\nallow (b): (x)\n", {3, 8, 1}, "unknown feature 'b'"},
      {"model M\nfeature a: x\nfeature b: y\nallow (a, b): (x)\n", {4, 15, 1}, "arity"},
      {"model M\nfeature a: x\nallow (a): (x)\nfeature b: y\n", {4, 1, 7}, "before"},
      {"model M\n", {1, 7, 1}, "no features"},
      {"model M\nfeature a: x\nbogus\n", {3, 1, 5}, "unknown statement"},
      {"model M\nfeature a: x\nmodel M\nfeature b: y\n", {3, 7, 1}, "duplicate name"},
      {"merge C = A + B\n", {1, 11, 1}, "undefined"},
      {"format 2\n", {1, 8, 1}, "unsupported format"},
      {"model M\nfeature a: \"x\n", {2, 12, 2}, "unterminated"},
      {"model M\nfeature a: x $\n", {2, 14, 1}, "unexpected character"},
      {"model M\nfeature 1a: x\n", {2, 9, 2}, "invalid"},
      {"model M\nfeature a: x\nallow (a, a): (x, x)\n", {3, 11, 1}, "repeated"},
  };
  for (const auto& b : corpus) {
    CAPTURE(b.text);
    const ParseError e = parse_error(b.text);
    CHECK(e.span() == b.span);
    CHECK(e.message().find(b.needle) != std::string::npos);
  }
}

TEST_CASE("duplicate name mentions the first definition") {
  const ParseError e = parse_error("model A\nfeature x: 1\n\nmodel A\nfeature y: 2\n");
  CHECK(e.message().find("line 1") != std::string::npos);
}

TEST_CASE("workspace with directives") {
  const Workspace w = load_workspace(ps::model_path("hub.pshw"));
  CHECK(w.models.size() == 3);
  REQUIRE(w.identifications.size() == 1);
  CHECK(w.identifications[0].target_model == "ITunes");
  CHECK(w.identifications[0].features.size() == 4);
  REQUIRE(w.directives.size() == 4);
  CHECK(w.directives[0].kind == Directive::Kind::merge);
  CHECK(w.directives[1].kind == Directive::Kind::transfer);
  CHECK(w.directives[2].kind == Directive::Kind::check);
  CHECK(w.directives[3].right == "ITunesHub");
  CHECK(w.order.size() == 8);
}

TEST_CASE("workspace references must already exist") {
  const ParseError e = parse_error("merge C = A + B\nmodel A\nfeature x: 1\nmodel B\nfeature y: 2\n");
  CHECK(e.message().find("'A'") != std::string::npos);
  const ParseError f =
      parse_error("model A\nfeature x: 1\nmerge C = A + B\nmodel B\nfeature y: 2\n");
  CHECK(f.message().find("'B'") != std::string::npos);
  CHECK(f.span().line == 3);
  const Workspace only_models = parse_workspace("model A\nfeature x: 1\nmodel B\nfeature y: 2\n");
  CHECK(only_models.models.size() == 2);
  CHECK(only_models.directives.empty());
}

TEST_CASE("include cycles") {
  const std::map<std::string, std::string> files{
      {"a.pshw", "include \"b.pshw\"\n"},
      {"b.pshw", "model B\nfeature x: 1\ninclude \"a.pshw\"\n"},
  };
  const IncludeLoader loader = [&](const std::string& p) {
    const auto it = files.find(p);
    if (it == files.end()) throw Error("no such file " + p);
    return it->second;
  };
  try {
    parse_workspace(files.at("a.pshw"), "a.pshw", loader);
    FAIL("expected an include cycle");
  } catch (const ParseError& e) {
    CHECK(e.message().find("cycle") != std::string::npos);
    CHECK(e.file() == "b.pshw");
    CHECK(e.span().line == 3);
  }
  CHECK_THROWS_AS(parse_workspace("include \"zz.psh\"\n", "a.pshw", loader), ParseError);
}

TEST_CASE("round trip on the pinned models") {
  for (const char* f : {"org.psh", "wine.psh", "pc.psh", "camcorder.psh", "itunes.psh"}) {
    CAPTURE(f);
    const Model m = parse_model(read_file(ps::model_path(f)));
    const std::string text = serialize(m);
    CHECK(parse_model(text) == m);
    CHECK(serialize(parse_model(text)) == text);
  }
  const Workspace w = load_workspace(ps::model_path("hub.pshw"));
  CHECK(parse_workspace(serialize(w)) == w);
}

TEST_CASE("round trip on random models") {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    Model m = random_model(seed);
    m.name = "R" + std::to_string(seed);
    const std::string text = serialize(m);
    const Model back = parse_model(text);
    CHECK(back == m);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("canonicalize") {
  const std::string a =
      "model M\nfeature a: x | y\nfeature b: p | q\n"
      "allow (a, b): (x, p), (y, q)\nforbid (b): (q)\n";
  const std::string b =
      "# a comment\n\nmodel   M\nfeature a : x|y   # inline\nfeature b: p | q\n"
      "forbid (b): (q)\n\nallow (b, a): (q, y), (p, x)\n";
  CHECK(canonicalize(a) == canonicalize(b));
  CHECK(canonicalize(a).rfind("format 1\n", 0) == 0);
  for (const char* f : {"org.psh", "wine.psh", "pc.psh", "camcorder.psh", "itunes.psh"}) {
    const std::string once = canonicalize(read_file(ps::model_path(f)));
    CHECK(canonicalize(once) == once);
  }
}

TEST_CASE("labels with escapes survive") {
  Model m{"Q", {{"a", {"x", "y"}, {"say \"hi\"", "back\\slash"}}}, {}, {}};
  CHECK(parse_model(serialize(m)) == m);
}

TEST_CASE("parse_model wants exactly one model") {
  CHECK_THROWS_AS(parse_model("model A\nfeature x: 1\nmodel B\nfeature y: 1\n"), ParseError);
  CHECK_THROWS_AS(parse_model("# nothing\n"), ParseError);
}
