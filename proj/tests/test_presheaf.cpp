#include <doctest.h>

#include "psh/error.hpp"
#include "psh/model.hpp"
#include "psh/presheaf.hpp"
#include "support/support.hpp"

using namespace psh;
namespace ps = psh::support;

namespace {

AssignmentPresheaf org() { return compile(ps::load_model("org.psh")); }

Assignment A(std::vector<std::pair<std::string, std::string>> b) {
  return Assignment::from_bindings(std::move(b));
}

}  // namespace

TEST_CASE("assignment basics") {
  const Assignment a = A({{"size", "l"}, {"levels", "m"}});
  CHECK(a.domain == Subset{"levels", "size"});
  CHECK(a.at("size") == "l");
  CHECK(a.str() == "(levels=m, size=l)");
  CHECK_THROWS_AS(a.at("x"), MalformedInput);
  CHECK_THROWS_AS(A({{"a", "x"}, {"a", "y"}}), MalformedInput);
  CHECK_THROWS_AS(Assignment(Subset{"a", "b"}, {"x"}), MalformedInput);
}

TEST_CASE("restrict_assignment") {
  const Assignment a = A({{"size", "l"}, {"levels", "m"}});
  CHECK(restrict_assignment(a, {"size"}) == A({{"size", "l"}}));
  CHECK(restrict_assignment(a, {}) == Assignment{});
  CHECK(restrict_assignment(a, a.domain) == a);
  CHECK_THROWS_AS(restrict_assignment(a, {"other"}), MalformedInput);

  // chains: restricting through V equals restricting directly
  const AssignmentPresheaf p = compile(random_model(17));
  for (const auto& w : p.family().objects())
    for (const auto& b : p.sections(w))
      for (const auto& v : ps::power_set(w))
        for (const auto& u : ps::power_set(v))
          CHECK(restrict_assignment(restrict_assignment(b, v), u) == restrict_assignment(b, u));
}

TEST_CASE("global sections") {
  CHECK(ps::as_set(global_sections(org())) ==
        std::set<Assignment>{A({{"size", "l"}, {"levels", "m"}}),
                             A({{"size", "l"}, {"levels", "f"}}),
                             A({{"size", "s"}, {"levels", "f"}})});
  const auto wine = global_sections(compile(ps::load_model("wine.psh")));
  REQUIRE(wine.size() == 2);
  for (const auto& s : wine) {
    const std::set<std::string> vals(s.values.begin(), s.values.end());
    CHECK(vals.size() == 1);
  }
  Model free{"Free", {{"x", {"1", "2"}, {}}, {"y", {"p", "q", "r"}, {}}}, {}, {}};
  CHECK(global_sections(compile(free)).size() == 6);
}

TEST_CASE("validate_laws finds a missing projection") {
  std::vector<Fiber> fibers{{"a", {"l", "s"}, {}}, {"b", {"m", "f"}, {}}};
  AssignmentPresheaf p(close_family({"a", "b"}), fibers);
  p.add(A({{"a", "l"}, {"b", "m"}}));
  p.add(A({{"b", "m"}}));
  p.add(Assignment{});
  const LawReport r = validate_laws(p);
  REQUIRE_FALSE(r.passed());
  CHECK(r.violations.front().law == "restriction-closure");
  CHECK(r.violations.front().witness.find("{a} ⊆ {a,b}") != std::string::npos);
  CHECK(r.violations.front().witness.find("(a=l, b=m)") != std::string::npos);
}

TEST_CASE("add rejects ill-typed sections") {
  AssignmentPresheaf p(close_family({"a"}), {{"a", {"x"}, {}}});
  CHECK_THROWS_AS(p.add(A({{"a", "y"}})), MalformedInput);
  CHECK_THROWS_AS(p.add(A({{"b", "x"}})), MalformedInput);
}

TEST_CASE("closure_complete on the literal camcorder data") {
  std::vector<Fiber> fibers{{"film", {"prof_and_amateur"}, {}},
                            {"screen", {"small"}, {}},
                            {"edit", {"difficult_and_inconvenient_editing", "quick_and_easy_editing"}, {}}};
  AssignmentPresheaf p(close_family({"film", "screen", "edit"}), fibers);
  p.add(A({{"film", "prof_and_amateur"}, {"screen", "small"},
           {"edit", "difficult_and_inconvenient_editing"}}));
  const auto [closed, additions] = closure_complete(p);
  CHECK(validate_laws(closed).passed());
  CHECK(closed.contains(A({{"film", "prof_and_amateur"}, {"edit", "difficult_and_inconvenient_editing"}})));
  std::size_t added = 0;
  for (const auto& a : additions) added += a.added.size();
  CHECK(added == 7);  // every proper subobject of a 3-set gets one projection
  CHECK(closure_complete(closed).second.empty());
}

TEST_CASE("closure_complete equals saturation, is idempotent and monotone") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const AssignmentPresheaf p = ps::random_fragment(seed);
    const auto [closed, additions] = closure_complete(p);
    CHECK(ps::sections_of(closed) == ps::brute_closure(p));
    CHECK(validate_laws(closed).passed());
    CHECK(closure_complete(closed).first == closed);
    for (const auto& u : p.family().objects())
      for (const auto& s : p.sections(u)) CHECK(closed.contains(s));
    std::size_t listed = 0, grown = 0;
    for (const auto& a : additions) listed += a.added.size();
    for (std::size_t o = 0; o < p.family().size(); ++o)
      grown += closed.tuples(o).size() - p.tuples(o).size();
    CHECK(listed == grown);
  }
}

TEST_CASE("extensions") {
  const AssignmentPresheaf cam = compile(ps::load_model("camcorder.psh"));
  const Assignment a = A({{"film", "prof_and_amateur"}, {"edit", "quick_and_easy_editing"}});
  CHECK(extensions(cam, a, cam.family().universe()).empty());

  const AssignmentPresheaf p = org();
  for (const auto& g : global_sections(p)) {
    const auto ext = extensions(p, restrict_assignment(g, {"size"}), p.family().universe());
    CHECK(std::find(ext.begin(), ext.end(), g) != ext.end());
    CHECK(extensions(p, g, g.domain) == std::vector<Assignment>{g});
  }
  CHECK_THROWS_AS(extensions(p, A({{"size", "l"}}), {"levels"}), MalformedInput);
  // (s, m) is not a local section on {levels,size}
  CHECK_THROWS_AS(extensions(p, A({{"size", "s"}, {"levels", "m"}}), p.family().universe()),
                  MalformedInput);
}

TEST_CASE("extensions match the filter oracle and contain every lift") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const AssignmentPresheaf p = compile(random_model(seed, {4, 3, 3, 3}));
    for (const auto& v : p.family().objects())
      for (const auto& b : p.sections(v))
        for (const auto& u : ps::power_set(v)) {
          const Assignment a = restrict_assignment(b, u);
          const auto ext = extensions(p, a, v);
          CHECK(ps::as_set(ext) == ps::brute_extensions(p, a, v));
          CHECK(std::find(ext.begin(), ext.end(), b) != ext.end());
        }
  }
}

TEST_CASE("blocking sets") {
  const AssignmentPresheaf cam = compile(ps::load_model("camcorder.psh"));
  const Assignment a = A({{"film", "prof_and_amateur"}, {"edit", "quick_and_easy_editing"}});
  CHECK(blocking_sets(cam, a) == std::vector<Subset>{{"edit", "film", "screen"}});
  for (const auto& g : global_sections(cam)) CHECK(blocking_sets(cam, g).empty());

  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const AssignmentPresheaf p = compile(random_model(seed, {4, 3, 4, 3}));
    for (const auto& u : p.family().objects())
      for (const auto& s : p.sections(u)) {
        const auto bs = blocking_sets(p, s);
        CHECK(bs == ps::brute_blocking(p, s));
        for (const auto& x : bs)
          for (const auto& y : bs)
            if (x != y) CHECK_FALSE(is_subobject(x, y));
      }
  }
}

TEST_CASE("singleton sections and global projections") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const AssignmentPresheaf p = compile(random_model(seed));
    for (const auto& x : p.family().universe())
      for (const auto& s : p.sections({x})) CHECK(p.fiber(x).contains(s.at(x)));
    for (const auto& g : global_sections(p))
      for (const auto& u : p.family().objects()) CHECK(p.contains(restrict_assignment(g, u)));
  }
}

TEST_CASE("encode and decode are inverse") {
  const AssignmentPresheaf p = org();
  for (std::size_t o = 0; o < p.family().size(); ++o)
    for (const auto& t : p.tuples(o)) CHECK(p.encode(p.decode(o, t)) == t);
}
