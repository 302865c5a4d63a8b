#include <doctest.h>

#include <set>

#include "cfr/errors.hpp"

#include "cfr/corpus.hpp"
#include "cfr/instance_gen.hpp"
#include "cfr/oracles.hpp"
#include "helpers.hpp"

using namespace cfr;
using cfr::test::data_dir;
using cfr::test::scratch_dir;

namespace {

std::string const fig6_doc =
    "cfn 1\n"
    "component w saturating cap=2\n"
    "event s1\n"
    "event s2\n"
    "ticket t1 price=1.00\n"
    "ticket t2 price=2.00\n"
    "ticket t3 price=3.00\n"
    "edge t1 t2 prio=0 guard=(and (= event s1) (>= w 1))\n"
    "edge t1 t3 prio=1 guard=(and (= event s2) (>= w 1))\n"
    "edge t2 t3 prio=0 guard=(= event s2)\n"
    "start ticket=t1\n";

monoid_value wv(cfn const& c, std::uint64_t x) {
  auto v = monoid_zero(c.spec);
  set_scalar(c.spec, v, 0, x);
  return v;
}

}  // namespace

TEST_CASE("enumeration finds the lone journey of a one-trip network") {
  scratch_dir dir{"one_trip"};
  dir.write("stops.csv",
            "stop_id,name,lat,lon,zone_id,overlap_id,city_id,transfer_time_s\n"
            "a,a,51.0,12.0,z,,,0\nb,b,51.1,12.1,z,,,0\n");
  dir.write("trips.csv", "trip_id,route_hint\nt1,\n");
  dir.write("stop_times.csv",
            "trip_id,seq,stop_id,arr_s,dep_s\nt1,0,a,100,100\nt1,1,b,200,200\n");
  dir.write("footpaths.csv", "from,to,duration_s\n");
  dir.write("fares.cfn",
            "cfn 1\ncomponent d counter\nticket T price=1.00\n"
            "start ticket=T\nweight_rule kind=ride d=dist_m\n");
  auto const data = load_dataset(dir.path);
  enumerate_options opt;
  auto const js = enumerate_pareto(data.ftt, data.fares, 0, 1, 0, opt);
  REQUIRE(js.size() == 1);
  CHECK(js[0].arrival == 200);
  CHECK(js[0].trips == 1);
  CHECK(js[0].price == 100);
}

TEST_CASE("enumeration of the branch network sees both tickets") {
  auto const data = load_dataset(data_dir() / "fig4b");
  auto const from = data.ftt.tt.require_stop("v1");
  auto const to = data.ftt.tt.require_stop("v5");
  enumerate_options opt;
  auto const all = enumerate_journeys(data.ftt, data.fares, from, to, 0, opt);
  std::set<std::pair<std::string, price_t>> outcomes;
  for (auto const& j : all) {
    outcomes.insert(
        {data.fares.graph.tickets[j.final_state.ticket].id, j.price});
  }
  CHECK(outcomes.count({"C", 300}) == 1);
  CHECK(outcomes.count({"E", 500}) == 1);
  auto const front = enumerate_pareto(data.ftt, data.fares, from, to, 0, opt);
  for (auto const& j : front) {
    CHECK(j.price == 300);  // the expensive branch never survives
  }
  // the budget guard reports instances that are too big
  enumerate_options strangled;
  strangled.node_budget = 3;
  CHECK_THROWS_AS(
      enumerate_journeys(data.ftt, data.fares, from, to, 0, strangled),
      capability_error);
}

TEST_CASE("DFA states are the ticket-weight pairs") {
  auto const c = parse_cfn(fig6_doc);
  std::vector<std::pair<monoid_value, std::uint32_t>> alphabet;
  for (std::uint64_t w : {0ull, 1ull, 2ull}) {
    for (auto const ev : {"s1", "s2"}) {
      alphabet.emplace_back(wv(c, w), c.events.require(ev));
    }
  }
  fare_state q0{c.graph.require("t1"), monoid_zero(c.spec)};
  auto const dfa = build_dfa(c, q0, alphabet);
  CHECK(dfa.num_states() == 9);
  CHECK(dfa.states[dfa.q0] == q0);

  auto state_of = [&](std::string const& t, std::uint64_t w) {
    return dfa.state_index({c.graph.require(t), wv(c, w)});
  };
  auto letter = [&](std::uint64_t w, std::string const& e) -> std::uint32_t {
    for (std::uint32_t i = 0; i < alphabet.size(); ++i) {
      if (alphabet[i].first == wv(c, w) &&
          alphabet[i].second == c.events.require(e)) {
        return i;
      }
    }
    REQUIRE(false);
    return 0;
  };

  // no letter moves (t1,0) to (t2,0): the transition needs weight >= 1
  for (std::uint32_t a = 0; a < alphabet.size(); ++a) {
    CHECK(dfa.step(state_of("t1", 0), a) != state_of("t2", 0));
  }
  // picking up weight 1 with s1 does move to (t2,1)
  CHECK(dfa.step(state_of("t1", 0), letter(1, "s1")) == state_of("t2", 1));
  // and weight saturates at the cap
  CHECK(dfa.step(state_of("t2", 2), letter(2, "s1")) == state_of("t2", 2));
  CHECK(dfa.step(state_of("t1", 1), letter(0, "s2")) == state_of("t3", 1));

  // a trivial weight domain leaves exactly the tickets
  auto const flat = parse_cfn(
      "cfn 1\nticket A price=1.00\nticket B price=2.00\n"
      "edge A B prio=0 guard=(= event go)\nevent go\nstart ticket=A\n");
  auto const d2 = build_dfa(flat, {0, monoid_zero(flat.spec)},
                            {{monoid_zero(flat.spec), 1}});
  CHECK(d2.num_states() == 2);

  // infinite weight domains are out of reach
  auto const inf = load_cfn(data_dir() / "fig4b" / "fares.cfn");
  CHECK_THROWS_AS(build_dfa(inf, {0, monoid_zero(inf.spec)}, {}),
                  capability_error);
}

TEST_CASE("the full figure fare structure fits in |T| x |H| states") {
  auto text = cfr::test::slurp(data_dir() / "mdv" / "fares.cfn");
  auto cap = [&](std::string const& from, std::string const& to) {
    auto const pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
  };
  cap("component dist counter unit=meters",
      "component dist saturating cap=2");
  cap("component stops counter unit=stops",
      "component stops saturating cap=2");
  auto const c = parse_cfn(text);
  auto const dfa =
      build_dfa(c, {c.graph.require("D"), monoid_zero(c.spec)},
                {{monoid_zero(c.spec), 0}});
  CHECK(c.spec.domain_size() == 3 * 3 * 64);
  CHECK(dfa.num_states() == 13 * 3 * 3 * 64);
}

TEST_CASE("product dijkstra agrees with enumeration on the grid network") {
  instance_params p;
  p.seed = 4242;
  p.constant_mode = true;
  p.n_stops = 7;
  p.n_routes = 4;
  scratch_dir dir{"const"};
  auto const inst = gen_random_instance(p);
  auto const data = materialize_instance(inst, dir.path);
  enumerate_options opt;
  opt.max_trips = 4;
  for (auto const& q : inst.queries) {
    auto const from = data.ftt.tt.require_stop(q.from);
    auto const to = data.ftt.tt.require_stop(q.to);
    auto const res =
        dfa_product_dijkstra(data.ftt, data.fares, from, to, q.dep, 4);
    auto const oracle =
        enumerate_pareto(data.ftt, data.fares, from, to, q.dep, opt);
    std::vector<pareto_point> pts;
    for (auto const& j : oracle) {
      pts.push_back({j.arrival, j.price});
    }
    CHECK(res.pareto == pareto_2d(std::move(pts)));
    CHECK(res.product_edges <= res.product_edge_bound);
    // staying put is the whole answer for a self-query
    auto const self =
        dfa_product_dijkstra(data.ftt, data.fares, from, from, q.dep, 4);
    REQUIRE(!self.pareto.empty());
    CHECK(self.pareto[0].arrival == q.dep);
  }
}

TEST_CASE("product dijkstra refuses time-dependent instances") {
  instance_params p;
  p.seed = 17;
  p.constant_mode = false;
  scratch_dir dir{"timedep"};
  auto const data = materialize_instance(gen_random_instance(p), dir.path);
  CHECK_THROWS_AS(dfa_product_dijkstra(data.ftt, data.fares, 0, 1, 0, 4),
                  capability_error);
}

TEST_CASE("the branch network on its unit-time grid agrees across oracles") {
  auto const data = load_dataset(data_dir() / "fig4b");
  // replace the weight component with a finite one for the DFA
  auto finite = cfr::test::finite_variant(data_dir() / "fig4b" / "fares.cfn", 6);
  auto ftt = annotate_fares(data.ftt.tt, finite);
  auto const v1 = ftt.tt.require_stop("v1");
  auto const v5 = ftt.tt.require_stop("v5");
  auto const res = dfa_product_dijkstra(ftt, finite, v1, v5, 0, 4);
  enumerate_options opt;
  auto const oracle = enumerate_pareto(ftt, finite, v1, v5, 0, opt);
  std::vector<pareto_point> pts;
  for (auto const& j : oracle) {
    pts.push_back({j.arrival, j.price});
  }
  CHECK(res.pareto == pareto_2d(std::move(pts)));
  REQUIRE(res.pareto.size() == 1);
  CHECK(res.pareto[0].price == 300);
  CHECK(res.product_edges <= res.product_edge_bound);

  // unreachable in the opposite direction: the front is empty
  CHECK(dfa_product_dijkstra(ftt, finite, v5, v1, 0, 4).pareto.empty());
}
