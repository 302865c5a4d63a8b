#include <doctest.h>

#include "cfr/errors.hpp"
#include "cfr/guard.hpp"

using namespace cfr;

namespace {

struct fixture {
  monoid_spec spec = monoid_spec::make({
      {"dist", component_kind::counter, 0, {}, "m"},
      {"zones", component_kind::finite_set, 0, {"156", "233", "H"}, ""},
      {"flag", component_kind::indicator, 0, {}, ""},
  });
  event_table events;

  fixture() {
    events.add("tra");
    events.add("city");
  }

  monoid_value value(std::uint64_t dist, std::vector<std::string> zones,
                     std::uint64_t flag = 0) {
    auto v = monoid_zero(spec);
    set_scalar(spec, v, 0, dist);
    for (auto const& z : zones) {
      set_insert_atom(spec, v, 1, *spec.atom_index(1, z));
    }
    set_scalar(spec, v, 2, flag);
    return v;
  }
};

}  // namespace

TEST_CASE("set components compare by cardinality") {
  fixture f;
  auto const g = parse_guard("(= zones 2)", f.spec, f.events);
  CHECK(eval_guard(g, f.spec, f.value(0, {"233", "156"}), 0));
  CHECK(!eval_guard(g, f.spec, f.value(0, {"233"}), 0));
}

TEST_CASE("event atoms") {
  fixture f;
  auto const g = parse_guard("(= event tra)", f.spec, f.events);
  CHECK(!eval_guard(g, f.spec, f.value(0, {}), f.events.require("s0")));
  CHECK(eval_guard(g, f.spec, f.value(0, {}), f.events.require("tra")));
  auto const ne = parse_guard("(!= event tra)", f.spec, f.events);
  CHECK(eval_guard(ne, f.spec, f.value(0, {}), f.events.require("city")));
}

TEST_CASE("boolean combinations") {
  fixture f;
  auto const g =
      parse_guard("(or (> dist 4) (= event tra))", f.spec, f.events);
  CHECK(eval_guard(g, f.spec, f.value(3, {}), f.events.require("tra")));
  CHECK(eval_guard(g, f.spec, f.value(5, {}), 0));
  CHECK(!eval_guard(g, f.spec, f.value(3, {}), 0));

  auto const n = parse_guard("(not (= flag 1))", f.spec, f.events);
  CHECK(eval_guard(n, f.spec, f.value(0, {}, 0), 0));
  CHECK(!eval_guard(n, f.spec, f.value(0, {}, 1), 0));

  auto const lit = parse_guard("(and (true) (not (false)))", f.spec, f.events);
  CHECK(eval_guard(lit, f.spec, f.value(0, {}), 0));
}

TEST_CASE("printing round-trips") {
  fixture f;
  for (auto const text :
       {"(and (>= zones 2) (or (> dist 4000) (= event tra)))",
        "(not (= flag 1))", "(!= event city)", "(true)"}) {
    auto const g = parse_guard(text, f.spec, f.events);
    CHECK(to_string(g, f.spec, f.events) == text);
    CHECK(parse_guard(to_string(g, f.spec, f.events), f.spec, f.events) == g);
  }
}

TEST_CASE("referenced components") {
  fixture f;
  CHECK(referenced_components(
            parse_guard("(= event tra)", f.spec, f.events)) == 0);
  CHECK(referenced_components(parse_guard("(and (> dist 1) (= zones 1))",
                                          f.spec, f.events)) == 0b011);
  CHECK(!references_weight(parse_guard("(!= event tra)", f.spec, f.events)));
}

TEST_CASE("malformed guards are rejected") {
  fixture f;
  CHECK_THROWS_AS(parse_guard("(= bogus 1)", f.spec, f.events), parse_error);
  CHECK_THROWS_AS(parse_guard("(= event nope)", f.spec, f.events),
                  parse_error);
  CHECK_THROWS_AS(parse_guard("(!= dist 4)", f.spec, f.events), parse_error);
  CHECK_THROWS_AS(parse_guard("(= flag 0)", f.spec, f.events), parse_error);
  CHECK_THROWS_AS(parse_guard("(> dist 4) junk", f.spec, f.events),
                  parse_error);
  CHECK_THROWS_AS(parse_guard("(frobnicate 1 2)", f.spec, f.events),
                  parse_error);
}
