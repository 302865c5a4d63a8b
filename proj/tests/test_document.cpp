#include <doctest.h>

#include "cfr/errors.hpp"
#include "cfr/fare_document.hpp"
#include "helpers.hpp"

using namespace cfr;
using cfr::test::data_dir;
using cfr::test::slurp;

TEST_CASE("documents round-trip losslessly through the writer") {
  for (auto const name : {"mdv", "fig4b", "fig4c"}) {
    auto const text = slurp(data_dir() / name / "fares.cfn");
    auto const once = write_cfn(parse_cfn(text));
    auto const twice = write_cfn(parse_cfn(once));
    CHECK(once == twice);
  }
}

TEST_CASE("syntax errors carry line information") {
  CHECK_THROWS_AS(parse_cfn("not a document"), parse_error);
  CHECK_THROWS_WITH_AS(parse_cfn("cfn 1\nticket X\n"),
                       doctest::Contains("line 2"), parse_error);
  CHECK_THROWS_AS(parse_cfn("cfn 1\nwhatever A B\n"), parse_error);
  CHECK_THROWS_AS(
      parse_cfn("cfn 1\ncomponent z set universe=\nticket T price=1\n"),
      parse_error);
}

TEST_CASE("dangling references surface in the report, not as exceptions") {
  auto const c = parse_cfn(
      "cfn 1\n"
      "component d counter\n"
      "ticket T0 price=1.00 fss_ignore=bogus\n"
      "edge T0 T9 prio=0 guard=(true)\n"
      "start ticket=T9\n");
  CHECK(!c.parse_issues.empty());
  auto const rep = validate_cfn(c);
  CHECK(!rep.valid());
  CHECK(rep.error_count() >= 3);
}

TEST_CASE("the MDV document validates; warnings only") {
  auto const c = load_cfn(data_dir() / "mdv" / "fares.cfn");
  auto const rep = validate_cfn(c);
  CHECK(rep.valid());
  // the discount tickets have deliberately overlapping guard cases
  bool overlap_warning = false;
  for (auto const& i : rep.issues) {
    overlap_warning =
        overlap_warning || (!i.error && i.code == "overlapping_guards");
  }
  CHECK(overlap_warning);
}

TEST_CASE("price decreases along an edge are reported") {
  auto text = slurp(data_dir() / "mdv" / "fares.cfn");
  text += "edge M Z1 prio=9 guard=(true)\n";
  auto const rep = validate_cfn(parse_cfn(text));
  CHECK(!rep.valid());
  bool price_issue = false, cycle_issue = false;
  for (auto const& i : rep.issues) {
    price_issue = price_issue || i.code == "price_monotonicity";
    cycle_issue = cycle_issue || i.code == "cycle";
  }
  CHECK(price_issue);
  // M -> Z1 -> ... -> M is also a cycle now
  CHECK(cycle_issue);
}

TEST_CASE("an empty ticket set is invalid") {
  auto const rep = validate_cfn(parse_cfn("cfn 1\ncomponent d counter\n"));
  CHECK(!rep.valid());
  CHECK(rep.issues.front().code == "no_tickets");
}

TEST_CASE("duplicate edge priorities are reported") {
  auto const rep = validate_cfn(parse_cfn(
      "cfn 1\n"
      "component d counter\n"
      "ticket A price=1.00\n"
      "ticket B price=2.00\n"
      "ticket C price=2.00\n"
      "edge A B prio=0 guard=(> d 1)\n"
      "edge A C prio=0 guard=(> d 2)\n"
      "start ticket=A\n"));
  CHECK(!rep.valid());
  CHECK(rep.issues.front().code == "duplicate_priority");
}

TEST_CASE("FSS masks over components that reachable guards use are invalid") {
  auto const rep = validate_cfn(parse_cfn(
      "cfn 1\n"
      "component d counter\n"
      "ticket A price=1.00 fss_ignore=d\n"
      "ticket B price=2.00\n"
      "edge A B prio=0 guard=(> d 100)\n"
      "start ticket=A\n"));
  CHECK(!rep.valid());
  bool fss_issue = false;
  for (auto const& i : rep.issues) {
    fss_issue = fss_issue || i.code == "fss_mask";
  }
  CHECK(fss_issue);
}

TEST_CASE("prices parse as exact hundredths") {
  auto const c = parse_cfn(
      "cfn 1\n"
      "ticket A price=2.40\n"
      "ticket B price=3\n"
      "ticket C price=0.5\n"
      "start ticket=A\n");
  CHECK(c.graph.tickets[0].price == 240);
  CHECK(c.graph.tickets[1].price == 300);
  CHECK(c.graph.tickets[2].price == 50);
  CHECK(format_price(240) == "2.40");
  CHECK(format_price(50) == "0.50");
  CHECK_THROWS_AS(parse_cfn("cfn 1\nticket A price=1.234\n"), parse_error);
}

TEST_CASE("partition assertions parse and write back") {
  auto const text =
      "cfn 1\n"
      "component d counter\n"
      "ticket A price=1.00\n"
      "ticket B price=2.00\n"
      "edge A B prio=0 guard=(> d 100)\n"
      "start ticket=A\n"
      "assert_partition A none\n";
  auto const c = parse_cfn(text);
  REQUIRE(c.assertions.size() == 1);
  CHECK(c.assertions[0].cls == comp_class::none);
  CHECK(write_cfn(parse_cfn(write_cfn(c))) == write_cfn(c));
}
