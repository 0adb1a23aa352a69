#include <doctest.h>

#include "psh/abstract.hpp"
#include "psh/error.hpp"
#include "psh/model.hpp"
#include "support/support.hpp"

using namespace psh;
namespace ps = psh::support;

TEST_CASE("representables") {
  const CoverFamily f = close_family(ps::letters(3));
  const AbstractPresheaf top = representable(f, f.universe());
  for (std::size_t o = 0; o < f.size(); ++o) CHECK(top.count(o) == 1);
  const AbstractPresheaf bottom = representable(f, {});
  for (std::size_t o = 0; o < f.size(); ++o) CHECK(bottom.count(o) == (o == 0 ? 1u : 0u));
  for (const auto& c : f.objects()) {
    const AbstractPresheaf y = representable(f, c);
    CHECK(validate_laws(y).passed());
    for (const auto& d : f.objects()) CHECK((y.count(d) == 1) == is_subobject(d, c));
  }
  CHECK_THROWS_AS(representable(f, {"z"}), MalformedInput);
}

TEST_CASE("validate_laws catches broken maps") {
  const CoverFamily f = close_family({"a", "b"});
  AbstractPresheaf p(f);
  for (std::size_t o = 0; o < f.size(); ++o) p.set_count(o, 2);
  for (std::size_t u = 0; u < f.size(); ++u)
    for (std::size_t v = 0; v < f.size(); ++v)
      if (is_subobject(f.objects()[u], f.objects()[v])) p.set_restriction(u, v, {0, 1});
  CHECK(validate_laws(p).passed());

  AbstractPresheaf broken = p;
  const std::size_t e = 0, a = *f.find(Subset{"a"}), ab = *f.find(Subset{"a", "b"});
  broken.set_restriction(e, ab, {1, 0});  // no longer the composite through {a}
  const LawReport r = validate_laws(broken);
  REQUIRE_FALSE(r.passed());
  CHECK(r.violations.front().law == "functoriality");
  CHECK(r.violations.front().witness.find("{a,b}") != std::string::npos);

  AbstractPresheaf not_identity = p;
  not_identity.set_restriction(a, a, {1, 1});
  CHECK_FALSE(validate_laws(not_identity).passed());

  AbstractPresheaf missing(f);
  CHECK_FALSE(validate_laws(missing).passed());
  CHECK_THROWS_AS(p.set_restriction(ab, a, {0, 1}), MalformedInput);
}

TEST_CASE("random abstract presheaves satisfy the laws") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const CoverFamily f = close_family(ps::letters(seed % 4 + 1));
    const AbstractPresheaf p = random_abstract_presheaf(f, seed);
    CHECK(validate_laws(p).passed());
    CHECK(random_abstract_presheaf(f, seed) == p);
  }
}

TEST_CASE("nat_transformations match exhaustive enumeration") {
  std::size_t compared = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const CoverFamily f = close_family(ps::letters(seed % 3 + 1));
    const AbstractPresheaf src = random_abstract_presheaf(f, seed, 1);
    const AbstractPresheaf tgt = random_abstract_presheaf(f, seed + 5000, 1);
    if (nat_candidate_bound(src, tgt) > 200'000) continue;
    const auto fast = nat_transformations(src, tgt);
    CHECK(fast == ps::brute_nat(src, tgt));
    for (const auto& t : fast) CHECK(check_naturality(src, tgt, t).passed());
    ++compared;
  }
  CHECK(compared >= 80);
}

TEST_CASE("nat_transformations edge cases") {
  const CoverFamily f = close_family({"a", "b"});
  const AbstractPresheaf y = representable(f, {"a"});
  const auto id = nat_transformations(y, y);
  CHECK(id.size() == 1);

  AbstractPresheaf empty(f);
  for (std::size_t u = 0; u < f.size(); ++u)
    for (std::size_t v = 0; v < f.size(); ++v)
      if (is_subobject(f.objects()[u], f.objects()[v])) empty.set_restriction(u, v, {});
  CHECK(nat_transformations(y, empty).empty());

  const AbstractPresheaf wide = random_abstract_presheaf(close_family(ps::letters(3)), 9, 6);
  CHECK(nat_candidate_bound(wide, wide) > 10);
  CHECK_THROWS_AS(nat_transformations(wide, wide, 10), BoundRefusal);
  try {
    nat_transformations(wide, wide, 10);
  } catch (const BoundRefusal& e) {
    CHECK(e.required() == nat_candidate_bound(wide, wide));
    CHECK(e.limit() == 10);
  }
}

TEST_CASE("yoneda on representables") {
  const CoverFamily f = close_family(ps::letters(3));
  for (const auto& c : f.objects()) {
    const AbstractPresheaf yc = representable(f, c);
    for (const auto& d : f.objects()) {
      const YonedaResult r = yoneda_check(yc, d);
      CHECK(r.report.passed());
      CHECK(r.transformations == (is_subobject(d, c) ? 1u : 0u));
    }
  }
}

TEST_CASE("yoneda bijection on random presheaves") {
  for (std::size_t n = 0; n <= 3; ++n) {
    const CoverFamily f = close_family(ps::letters(n));
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const AbstractPresheaf p = random_abstract_presheaf(f, seed * 31 + n);
      for (const auto& d : f.objects()) {
        const YonedaResult r = yoneda_check(p, d);
        CHECK(r.report.passed());
        CHECK(r.transformations == p.count(d));
        CHECK(r.elements == p.count(d));
      }
    }
  }
}

TEST_CASE("pullback along family maps") {
  const CoverFamily f = close_family(ps::letters(3));
  const AbstractPresheaf q = random_abstract_presheaf(f, 77);
  const AbstractPresheaf same = pullback_presheaf(f, [](const Subset& s) { return s; }, q);
  CHECK(same == q);

  const AbstractPresheaf constant = pullback_presheaf(f, [](const Subset&) { return Subset{}; }, q);
  CHECK(validate_laws(constant).passed());
  for (std::size_t o = 0; o < f.size(); ++o) CHECK(constant.count(o) == q.count(Subset{}));

  // rename a <-> c on a 2-feature source family
  const CoverFamily g = close_family({"a", "b"});
  const AbstractPresheaf renamed = pullback_presheaf(
      g,
      [](const Subset& s) {
        std::vector<std::string> out;
        for (const auto& x : s) out.push_back(x == "a" ? "c" : x);
        return Subset(out);
      },
      q);
  CHECK(validate_laws(renamed).passed());
  CHECK(renamed.count(Subset{"a"}) == q.count(Subset{"c"}));

  try {
    pullback_presheaf(g, [](const Subset& s) { return s.size() == 1 ? Subset{"a"} : Subset{}; }, q);
    FAIL("expected MalformedInput");
  } catch (const MalformedInput& e) {
    CHECK(std::string(e.what()).find("monotone") != std::string::npos);
  }
  CHECK_THROWS_AS(pullback_presheaf(g, [](const Subset&) { return Subset{"zz"}; }, q),
                  MalformedInput);
}

TEST_CASE("to_abstract") {
  const AssignmentPresheaf p = compile(ps::load_model("org.psh"));
  const AbstractPresheaf a = to_abstract(p);
  CHECK(validate_laws(a).passed());
  for (std::size_t o = 0; o < p.family().size(); ++o) CHECK(a.count(o) == p.tuples(o).size());
  CHECK_THROWS_AS(to_abstract(ps::random_fragment(4)), InvariantViolation);
}
