#include <doctest.h>

#include "cfr/errors.hpp"
#include "cfr/fare_document.hpp"
#include "cfr/rng.hpp"
#include "cfr/ticket_graph.hpp"
#include "helpers.hpp"

using namespace cfr;
using cfr::test::data_dir;
using cfr::test::finite_variant;
using cfr::test::make_state;

namespace {

std::vector<std::string> ids_of(cfn const& c,
                                std::vector<std::uint32_t> const& ts) {
  std::vector<std::string> out;
  for (auto const t : ts) {
    out.push_back(c.graph.tickets[t].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

monoid_value scalar(cfn const& c, std::uint64_t x) {
  auto v = monoid_zero(c.spec);
  set_scalar(c.spec, v, 0, x);
  return v;
}

}  // namespace

TEST_CASE("transition picks the first satisfied guard and else stays") {
  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  auto h = monoid_zero(mdv.spec);
  auto const zc = mdv.spec.require("zones");
  set_insert_atom(mdv.spec, h, zc, *mdv.spec.atom_index(zc, "H"));
  set_insert_atom(mdv.spec, h, zc, *mdv.spec.atom_index(zc, "225"));
  for (std::uint32_t s = 0; s < mdv.events.size(); ++s) {
    CHECK(mdv.graph.tickets[transition(mdv.graph, mdv.spec,
                                       mdv.graph.require("Z1"), h, s)]
              .id == "Z2");
    // M is a sink
    CHECK(transition(mdv.graph, mdv.spec, mdv.graph.require("M"), h, s) ==
          mdv.graph.require("M"));
  }
  // nothing fires with a single zone and no trigger
  auto one = monoid_zero(mdv.spec);
  set_insert_atom(mdv.spec, one, zc, 0);
  CHECK(transition(mdv.graph, mdv.spec, mdv.graph.require("Z1"), one, 0) ==
        mdv.graph.require("Z1"));
}

TEST_CASE("fare updates see the post-addition weight") {
  auto const c = load_cfn(data_dir() / "fig4b" / "fares.cfn");
  auto const s1 = c.events.require("s1");
  auto const s2 = c.events.require("s2");
  auto const s3 = c.events.require("s3");

  // upper branch: weight 1 with s1, then weight 2 with s3
  auto f = make_state(c, "A");
  f = fare_update(c.graph, c.spec, f, scalar(c, 1), s1);
  CHECK(c.graph.tickets[f.ticket].id == "B");
  CHECK(get_scalar(c.spec, f.weight, 0) == 1);
  f = fare_update(c.graph, c.spec, f, scalar(c, 2), s3);
  CHECK(c.graph.tickets[f.ticket].id == "C");
  CHECK(get_scalar(c.spec, f.weight, 0) == 3);

  // lower branch
  auto g = make_state(c, "A");
  g = fare_update(c.graph, c.spec, g, scalar(c, 2), s2);
  CHECK(c.graph.tickets[g.ticket].id == "D");
  g = fare_update(c.graph, c.spec, g, scalar(c, 2), s3);
  CHECK(c.graph.tickets[g.ticket].id == "E");
  CHECK(get_scalar(c.spec, g.weight, 0) == 4);

  // a zero weight with the no-op event never changes anything
  auto const before = make_state(c, "B", {5});
  CHECK(fare_update(c.graph, c.spec, before, monoid_zero(c.spec), 0) ==
        before);
}

TEST_CASE("prices are table lookups") {
  auto const c = load_cfn(data_dir() / "fig4b" / "fares.cfn");
  CHECK(c.graph.price(c.graph.require("A")) == 0);
  CHECK(c.graph.price(c.graph.require("D")) == 100);
  CHECK(c.graph.price(c.graph.require("E")) == 500);
  for (std::uint32_t t = 0; t < c.graph.size(); ++t) {
    CHECK(c.graph.price(t) >= 0);
  }
  CHECK_THROWS_AS(c.graph.price(99), structural_error);
}

TEST_CASE("reach is the forward closure including the start") {
  auto const c = load_cfn(data_dir() / "fig4b" / "fares.cfn");
  CHECK(ids_of(c, compute_reach(c.graph, c.graph.require("B"))) ==
        std::vector<std::string>{"B", "C"});
  CHECK(ids_of(c, compute_reach(c.graph, c.graph.require("E"))) ==
        std::vector<std::string>{"E"});
  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  CHECK(ids_of(mdv, compute_reach(mdv.graph, mdv.graph.require("M"))) ==
        std::vector<std::string>{"M"});
}

TEST_CASE("traceable means a forced topological order") {
  auto const c = load_cfn(data_dir() / "fig4b" / "fares.cfn");
  CHECK(!check_traceable(c.graph, compute_reach(c.graph, c.graph.require("A"))));
  CHECK(check_traceable(c.graph, {c.graph.require("C")}));
  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  CHECK(check_traceable(mdv.graph,
                        compute_reach(mdv.graph, mdv.graph.require("Z1"))));
  CHECK(check_traceable(mdv.graph,
                        compute_reach(mdv.graph, mdv.graph.require("C_m"))));
}

TEST_CASE("no-overtaking: exhaustive verdicts and witnesses") {
  auto const b = finite_variant(data_dir() / "fig4b" / "fares.cfn", 2);
  overtaking_mode mode;
  mode.exhaustive = true;
  auto const res =
      check_no_overtaking(b.graph, b.spec, b.events, b.graph.require("B"), mode);
  CHECK(res.verdict == overtaking_verdict::holds);
  CHECK(res.checked > 0);

  // sinks hold trivially
  CHECK(check_no_overtaking(b.graph, b.spec, b.events, b.graph.require("E"),
                            mode)
            .verdict == overtaking_verdict::holds);

  auto const cdoc = finite_variant(data_dir() / "fig4c" / "fares.cfn", 5);
  auto const bad = check_no_overtaking(cdoc.graph, cdoc.spec, cdoc.events,
                                       cdoc.graph.require("A"), mode);
  REQUIRE(bad.verdict == overtaking_verdict::violated);
  REQUIRE(bad.witness.has_value());
  // any witness must be a genuine divergence under comparable weights
  auto const& w = *bad.witness;
  CHECK(monoid_leq(cdoc.spec, w.h, w.h_bar));
  auto const g1 = transition(cdoc.graph, cdoc.spec, w.from_ticket, w.h, w.event);
  auto const g2 =
      transition(cdoc.graph, cdoc.spec, w.to_ticket, w.h_bar, w.event);
  CHECK(!cdoc.graph.reaches(g1, g2));
  // the canonical pitfall: weight 3 still reaches B, weight 4 jumps to C,
  // and there is no B,C-path
  auto const a = cdoc.graph.require("A");
  auto const s3 = cdoc.events.require("s3");
  auto h3 = monoid_zero(cdoc.spec);
  set_scalar(cdoc.spec, h3, 0, 3);
  auto h4 = monoid_zero(cdoc.spec);
  set_scalar(cdoc.spec, h4, 0, 4);
  CHECK(cdoc.graph.tickets[transition(cdoc.graph, cdoc.spec, a, h3, s3)].id ==
        "B");
  CHECK(cdoc.graph.tickets[transition(cdoc.graph, cdoc.spec, a, h4, s3)].id ==
        "C");
  CHECK(!cdoc.graph.reaches(cdoc.graph.require("B"), cdoc.graph.require("C")));

  // exhaustive mode needs a finite domain
  auto const unbounded = load_cfn(data_dir() / "fig4c" / "fares.cfn");
  CHECK_THROWS_AS(check_no_overtaking(unbounded.graph, unbounded.spec,
                                      unbounded.events, 0, mode),
                  capability_error);
}

TEST_CASE("comparability partitions of the figure networks") {
  overtaking_mode exhaustive;
  exhaustive.exhaustive = true;

  auto const b = finite_variant(data_dir() / "fig4b" / "fares.cfn", 2);
  auto const pb = compute_partition(b.graph, b.spec, b.events, exhaustive);
  CHECK(ids_of(b, pb.members(comp_class::full)) ==
        std::vector<std::string>{"B", "C", "D", "E"});
  CHECK(ids_of(b, pb.members(comp_class::partial)) ==
        std::vector<std::string>{"A"});
  CHECK(pb.members(comp_class::none).empty());
  CHECK(pb.provenance[b.graph.require("B")] ==
        partition_provenance::proved_exhaustive);

  auto const c = finite_variant(data_dir() / "fig4c" / "fares.cfn", 5);
  auto const pc = compute_partition(c.graph, c.spec, c.events, exhaustive);
  CHECK(ids_of(c, pc.members(comp_class::full)) ==
        std::vector<std::string>{"B", "C"});
  CHECK(pc.members(comp_class::partial).empty());
  CHECK(ids_of(c, pc.members(comp_class::none)) ==
        std::vector<std::string>{"A"});

  // the unbounded originals, sampled, land in the same classes
  overtaking_mode sampled;
  sampled.exhaustive = false;
  sampled.trials = 20000;
  auto const b0 = load_cfn(data_dir() / "fig4b" / "fares.cfn");
  auto const pb0 = compute_partition(b0.graph, b0.spec, b0.events, sampled);
  CHECK(ids_of(b0, pb0.members(comp_class::partial)) ==
        std::vector<std::string>{"A"});
  CHECK(pb0.members(comp_class::full).size() == 4);
}

TEST_CASE("MDV partition: everything fully comparable") {
  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  overtaking_mode sampled;
  sampled.exhaustive = false;
  sampled.trials = 30000;
  auto const part =
      compute_partition(mdv.graph, mdv.spec, mdv.events, sampled);
  CHECK(part.members(comp_class::full).size() == mdv.graph.size());
  for (std::uint32_t t = 0; t < mdv.graph.size(); ++t) {
    CHECK(part.provenance[t] == partition_provenance::proved_sampled);
    CHECK(part.trials[t] >= sampled.trials);
  }
}

TEST_CASE("config assertions override with provenance and get re-checked") {
  auto const b = finite_variant(data_dir() / "fig4b" / "fares.cfn", 2);
  overtaking_mode mode;
  auto const part =
      compute_partition(b.graph, b.spec, b.events, mode,
                        {{b.graph.require("A"), comp_class::none}});
  CHECK(part.cls[b.graph.require("A")] == comp_class::none);
  CHECK(part.provenance[b.graph.require("A")] ==
        partition_provenance::asserted_by_config);

  // asserting full comparability for A while demoting B breaks closure
  CHECK_THROWS_AS(
      compute_partition(b.graph, b.spec, b.events, mode,
                        {{b.graph.require("A"), comp_class::full},
                         {b.graph.require("B"), comp_class::none}}),
      structural_error);
}

TEST_CASE("dominance between fare states") {
  auto const b = finite_variant(data_dir() / "fig4b" / "fares.cfn", 2);
  overtaking_mode mode;
  auto const part = compute_partition(b.graph, b.spec, b.events, mode);

  auto const fb = make_state(b, "B", {1});
  auto const fd = make_state(b, "D", {2});
  CHECK(compare_states(b.graph, b.spec, part, fb, fd, false) ==
        dominance::incomparable);
  CHECK(compare_states(b.graph, b.spec, part, fd, fb, false) ==
        dominance::incomparable);
  CHECK(compare_states(b.graph, b.spec, part, fb, fb, false) ==
        dominance::dominates_or_equal);

  // partial comparability: equal tickets only
  auto const fa1 = make_state(b, "A", {0});
  auto const fa2 = make_state(b, "A", {1});
  CHECK(compare_states(b.graph, b.spec, part, fa1, fa2, false) ==
        dominance::dominates_strictly);
  CHECK(compare_states(b.graph, b.spec, part, fa1, fb, false) ==
        dominance::incomparable);

  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  overtaking_mode sampled;
  sampled.exhaustive = false;
  sampled.trials = 10000;
  auto const mp = compute_partition(mdv.graph, mdv.spec, mdv.events, sampled);
  auto z1 = make_state(mdv, "Z1");
  auto z2 = make_state(mdv, "Z2");
  auto const zc = mdv.spec.require("zones");
  set_insert_atom(mdv.spec, z1.weight, zc, *mdv.spec.atom_index(zc, "233"));
  set_insert_atom(mdv.spec, z2.weight, zc, *mdv.spec.atom_index(zc, "233"));
  set_insert_atom(mdv.spec, z2.weight, zc, *mdv.spec.atom_index(zc, "156"));
  CHECK(compare_states(mdv.graph, mdv.spec, mp, z1, z2, false) ==
        dominance::dominates_strictly);
  CHECK(compare_states(mdv.graph, mdv.spec, mp, z2, z1, false) ==
        dominance::incomparable);

  // a ticket in C_N is never dominated and never dominates
  auto const c = finite_variant(data_dir() / "fig4c" / "fares.cfn", 5);
  auto const pc = compute_partition(c.graph, c.spec, c.events, mode);
  auto const ca = make_state(c, "A", {0});
  CHECK(compare_states(c.graph, c.spec, pc, ca, ca, false) ==
        dominance::incomparable);
}

TEST_CASE("FSS masks make ignored components equal") {
  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  overtaking_mode sampled;
  sampled.exhaustive = false;
  sampled.trials = 5000;
  auto const part =
      compute_partition(mdv.graph, mdv.spec, mdv.events, sampled);
  auto a = make_state(mdv, "Z1", {900, 1});
  auto b = make_state(mdv, "Z1", {500, 7});
  auto const zc = mdv.spec.require("zones");
  set_insert_atom(mdv.spec, a.weight, zc, 0);
  set_insert_atom(mdv.spec, b.weight, zc, 0);
  // dist and stops disagree in both directions
  CHECK(compare_states(mdv.graph, mdv.spec, part, a, b, false) ==
        dominance::incomparable);
  CHECK(compare_states(mdv.graph, mdv.spec, part, a, b, true) ==
        dominance::dominates_or_equal);
  // masks only apply between equal tickets
  auto c = make_state(mdv, "Z2", {0, 0});
  set_insert_atom(mdv.spec, c.weight, zc, 0);
  CHECK(compare_states(mdv.graph, mdv.spec, part, a, c, true) ==
        dominance::incomparable);
}

TEST_CASE("update monotonicity on the finite branch network") {
  // Exhaustive sweep: comparable states stay comparable after any update
  // that can occur on the embedded routing graph.
  auto const b = finite_variant(data_dir() / "fig4b" / "fares.cfn", 4);
  overtaking_mode mode;
  auto const part = compute_partition(b.graph, b.spec, b.events, mode);
  auto const values = enumerate_values(b.spec);
  std::vector<std::pair<monoid_value, std::uint32_t>> arcs;
  for (std::uint64_t w : {0ull, 1ull, 2ull}) {
    for (std::uint32_t s = 0; s < b.events.size(); ++s) {
      arcs.emplace_back(scalar(b, w), s);
    }
  }
  std::uint64_t checked = 0;
  for (std::uint32_t t1 = 0; t1 < b.graph.size(); ++t1) {
    for (std::uint32_t t2 = 0; t2 < b.graph.size(); ++t2) {
      for (auto const& h1 : values) {
        for (auto const& h2 : values) {
          fare_state const f1{t1, h1};
          fare_state const f2{t2, h2};
          if (compare_states(b.graph, b.spec, part, f1, f2, false) ==
              dominance::incomparable) {
            continue;
          }
          for (auto const& [w, s] : arcs) {
            auto const g1 = fare_update(b.graph, b.spec, f1, w, s);
            auto const g2 = fare_update(b.graph, b.spec, f2, w, s);
            ++checked;
            CHECK(compare_states(b.graph, b.spec, part, g1, g2, false) !=
                  dominance::incomparable);
          }
        }
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("prices never decrease along random update walks") {
  auto const mdv = load_cfn(data_dir() / "mdv" / "fares.cfn");
  rng r{31};
  for (int walk = 0; walk < 2000; ++walk) {
    fare_state f;
    f.ticket = static_cast<std::uint32_t>(r.below(mdv.graph.size()));
    f.weight = monoid_zero(mdv.spec);
    auto last_price = mdv.graph.price(f.ticket);
    for (int step = 0; step < 8; ++step) {
      auto w = monoid_zero(mdv.spec);
      set_scalar(mdv.spec, w, 0, r.below(3000));
      set_scalar(mdv.spec, w, 1, r.below(3));
      if (r.chance(0.7)) {
        set_insert_atom(mdv.spec, w, 2, static_cast<std::uint32_t>(r.below(6)));
      }
      f = fare_update(mdv.graph, mdv.spec, f, w,
                      static_cast<std::uint32_t>(r.below(mdv.events.size())));
      CHECK(mdv.graph.price(f.ticket) >= last_price);
      last_price = mdv.graph.price(f.ticket);
    }
  }
}
