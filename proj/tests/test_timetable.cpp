#include <doctest.h>

#include <set>
#include "cfr/errors.hpp"
#include "cfr/router.hpp"
#include "cfr/timetable.hpp"
#include "helpers.hpp"

using namespace cfr;
using cfr::test::data_dir;
using cfr::test::scratch_dir;

namespace {

std::string const tiny_fares =
    "cfn 1\n"
    "component d counter\n"
    "ticket T price=1.00\n"
    "start ticket=T\n"
    "weight_rule kind=ride d=dist_m\n";

void write_minimal(scratch_dir const& dir, std::string const& stop_times,
                   std::string const& trips =
                       "trip_id,route_hint\nt1,\nt2,\n") {
  dir.write("stops.csv",
            "stop_id,name,lat,lon,zone_id,overlap_id,city_id,transfer_time_s\n"
            "a,a,51.0,12.0,z,,,0\n"
            "b,b,51.1,12.1,z,,,0\n"
            "c,c,51.2,12.2,z,,,0\n");
  dir.write("trips.csv", trips);
  dir.write("stop_times.csv", stop_times);
  dir.write("footpaths.csv", "from,to,duration_s\n");
  dir.write("fares.cfn", tiny_fares);
}

}  // namespace

TEST_CASE("the figure dataset loads and groups routes") {
  auto const tt = load_timetable(data_dir() / "mdv");
  CHECK(tt.stops.size() == 13);
  CHECK(tt.routes.size() >= 2);
  CHECK(tt.routes.size() == 4);  // two lines, both directions
  for (auto const& r : tt.routes) {
    for (std::size_t i = 1; i < r.trips.size(); ++i) {
      // trips sorted and FIFO within a route
      for (std::size_t p = 0; p < r.stops.size(); ++p) {
        CHECK(tt.trips[r.trips[i - 1]].dep[p] <= tt.trips[r.trips[i]].dep[p]);
      }
    }
  }
}

TEST_CASE("empty stop_times gives a valid, route-less timetable") {
  scratch_dir dir{"empty"};
  write_minimal(dir, "trip_id,seq,stop_id,arr_s,dep_s\n",
                "trip_id,route_hint\n");
  auto const tt = load_timetable(dir.path);
  CHECK(tt.routes.empty());
  CHECK(tt.stops.size() == 3);
}

TEST_CASE("time travel is rejected with file and line") {
  scratch_dir dir{"backwards"};
  write_minimal(dir,
                "trip_id,seq,stop_id,arr_s,dep_s\n"
                "t1,0,a,100,100\n"
                "t1,1,b,90,90\n",
                "trip_id,route_hint\nt1,\n");
  CHECK_THROWS_WITH_AS(load_timetable(dir.path),
                       doctest::Contains("stop_times.csv:3"), parse_error);
}

TEST_CASE("missing files and dangling references are load errors") {
  scratch_dir dir{"missing"};
  CHECK_THROWS_AS(load_timetable(dir.path), parse_error);
  write_minimal(dir,
                "trip_id,seq,stop_id,arr_s,dep_s\n"
                "t1,0,a,0,0\n"
                "t1,1,nosuch,60,60\n",
                "trip_id,route_hint\nt1,\n");
  CHECK_THROWS_WITH_AS(load_timetable(dir.path), doctest::Contains("nosuch"),
                       parse_error);
}

TEST_CASE("overtaking trips split into separate routes") {
  scratch_dir dir{"overtake"};
  // t2 departs later but arrives earlier
  write_minimal(dir,
                "trip_id,seq,stop_id,arr_s,dep_s\n"
                "t1,0,a,0,0\n"
                "t1,1,b,300,300\n"
                "t2,0,a,60,60\n"
                "t2,1,b,240,240\n");
  auto const tt = load_timetable(dir.path);
  CHECK(tt.routes.size() == 2);
}

TEST_CASE("footpath closure composes shortest durations") {
  auto const closed = close_footpaths({{0, 1, 2}, {1, 2, 3}}, 3);
  REQUIRE(closed.size() == 3);
  bool found = false;
  for (auto const& f : closed) {
    if (f.from == 0 && f.to == 2) {
      found = true;
      CHECK(f.duration == 5);
    }
  }
  CHECK(found);
  // closing again changes nothing
  auto const twice = close_footpaths(closed, 3);
  CHECK(twice.size() == closed.size());
  // self-loops never appear
  auto const loops = close_footpaths({{0, 1, 2}, {1, 0, 2}}, 2);
  for (auto const& f : loops) {
    CHECK(f.from != f.to);
  }
  // parallel duplicates collapse to the cheapest
  auto const dup = close_footpaths({{0, 1, 9}, {0, 1, 4}}, 2);
  REQUIRE(dup.size() == 1);
  CHECK(dup[0].duration == 4);
}

TEST_CASE("overlap blocks multiply routes per zone choice") {
  scratch_dir dir{"overlap"};
  dir.write("stops.csv",
            "stop_id,name,lat,lon,zone_id,overlap_id,city_id,transfer_time_s\n"
            "a,a,51.0,12.0,z1,,,0\n"
            "b,b,51.1,12.1,z1,ov1,,0\n"
            "c,c,51.2,12.2,z2,,,0\n"
            "d,d,51.3,12.3,z2,ov2,,0\n"
            "e,e,51.4,12.4,z2,,,0\n");
  dir.write("trips.csv", "trip_id,route_hint\nt1,\n");
  dir.write("stop_times.csv",
            "trip_id,seq,stop_id,arr_s,dep_s\n"
            "t1,0,a,0,0\nt1,1,b,60,60\nt1,2,c,120,120\nt1,3,d,180,180\n"
            "t1,4,e,240,240\n");
  dir.write("footpaths.csv", "from,to,duration_s\n");
  auto const tt = load_timetable(dir.path);
  overlap_map ov{{"ov1", {"z1", "z2"}}, {"ov2", {"z2", "z3"}}};

  // one block of one stop -> two copies
  {
    overlap_map only1{{"ov1", {"z1", "z2"}}};
    auto base = tt;
    for (auto& s : base.stops) {
      if (s.id == "d") {
        s.overlap.clear();
      }
    }
    auto const dup = duplicate_overlap_routes(base, only1);
    CHECK(dup.routes.size() == 2);
    CHECK(dup.effective_zone(0, 1) == "z1");
    CHECK(dup.effective_zone(1, 1) == "z2");
  }
  // two disjoint blocks -> the product of the choices
  {
    auto const dup = duplicate_overlap_routes(tt, ov);
    CHECK(dup.routes.size() == 4);
    std::set<std::pair<std::string, std::string>> combos;
    for (std::uint32_t r = 0; r < dup.routes.size(); ++r) {
      combos.insert({dup.effective_zone(r, 1), dup.effective_zone(r, 3)});
    }
    CHECK(combos == std::set<std::pair<std::string, std::string>>{
                        {"z1", "z2"}, {"z1", "z3"}, {"z2", "z2"}, {"z2", "z3"}});
    // feasible (stop sequence, time) journeys are untouched
    for (auto const& r : dup.routes) {
      CHECK(r.stops == tt.routes[0].stops);
      CHECK(r.trips.size() == 1);
    }
  }
  // a route without overlap stops stays identical
  {
    auto base = tt;
    for (auto& s : base.stops) {
      s.overlap.clear();
    }
    auto const dup = duplicate_overlap_routes(base, ov);
    CHECK(dup.routes.size() == 1);
    CHECK(dup.routes[0].zone_override.empty());
  }
}

TEST_CASE("fare annotation matches the running example") {
  auto const data = load_dataset(data_dir() / "mdv");
  auto const& ftt = data.ftt;
  auto const& spec = data.fares.spec;

  // initial state at the stop just outside the small city: discount
  // ticket, zero distance and stops, the stop's own zone
  auto const g = ftt.tt.require_stop("G");
  auto const& mu = ftt.initial_state[g];
  CHECK(data.fares.graph.tickets[mu.ticket].id == "D");
  CHECK(get_scalar(spec, mu.weight, 0) == 0);
  CHECK(get_scalar(spec, mu.weight, 1) == 0);
  auto const zc = spec.require("zones");
  CHECK(set_cardinality(spec, mu.weight, zc) == 1);
  CHECK(set_contains_atom(spec, mu.weight, zc, *spec.atom_index(zc, "156")));

  // the city-exit arc into G: 231 m, one stop, the tail stop's zone, and
  // the city event
  bool found = false;
  for (std::uint32_t r = 0; r < ftt.tt.routes.size(); ++r) {
    auto const& route = ftt.tt.routes[r];
    for (std::uint32_t pos = 1; pos < route.stops.size(); ++pos) {
      if (route.stops[pos] != g ||
          ftt.tt.stops[route.stops[pos - 1]].id != "F") {
        continue;
      }
      found = true;
      auto const& ann = ftt.at(r, pos);
      CHECK(get_scalar(spec, ann.ride_weight, 0) == 231);
      CHECK(get_scalar(spec, ann.ride_weight, 1) == 1);
      CHECK(set_cardinality(spec, ann.ride_weight, zc) == 1);
      CHECK(set_contains_atom(spec, ann.ride_weight, zc,
                              *spec.atom_index(zc, "233")));
      CHECK(data.fares.events.names[ann.ride_event] == "city");
      // boarding pays nothing but triggers the transfer event
      CHECK(ann.board_weight == monoid_zero(spec));
      CHECK(data.fares.events.names[ann.board_event] == "tra");
    }
  }
  CHECK(found);

  // annotations agree across all trips of each route by construction
  for (std::uint32_t r = 0; r < ftt.tt.routes.size(); ++r) {
    CHECK(ftt.annot[r].size() == ftt.tt.routes[r].stops.size());
  }
}

TEST_CASE("routes re-split when per-trip distances disagree") {
  scratch_dir dir{"resplit"};
  write_minimal(dir,
                "trip_id,seq,stop_id,arr_s,dep_s,dist_m\n"
                "t1,0,a,0,0,0\n"
                "t1,1,b,300,300,1000\n"
                "t2,0,a,600,600,0\n"
                "t2,1,b,900,900,2000\n");
  auto const data = load_dataset(dir.path);
  CHECK(data.ftt.tt.routes.size() == 2);
  for (std::uint32_t r = 0; r < 2; ++r) {
    auto const d = get_scalar(data.fares.spec, data.ftt.at(r, 1).ride_weight,
                              0);
    CHECK((d == 1000 || d == 2000));
  }
}

TEST_CASE("distance falls back to haversine on coordinates") {
  scratch_dir dir{"haversine"};
  write_minimal(dir,
                "trip_id,seq,stop_id,arr_s,dep_s\n"
                "t1,0,a,0,0\n"
                "t1,1,b,300,300\n",
                "trip_id,route_hint\nt1,\n");
  auto const data = load_dataset(dir.path);
  auto const d = get_scalar(data.fares.spec, data.ftt.at(0, 1).ride_weight, 0);
  auto const expect = haversine_m(51.0, 12.0, 51.1, 12.1);
  CHECK(d == static_cast<std::uint64_t>(expect));
  CHECK(expect > 10000);
  CHECK(expect < 15000);
  CHECK(haversine_m(51.1, 12.1, 51.0, 12.0) == expect);
  CHECK(haversine_m(51.0, 12.0, 51.0, 12.0) == 0);
}

TEST_CASE("route duplication leaves reachability and times untouched") {
  auto tt = load_timetable(data_dir() / "mdv");
  tt.footpaths = close_footpaths(std::move(tt.footpaths), tt.stops.size());
  tt.build_indices();
  auto const dup = duplicate_overlap_routes(tt, load_overlaps(data_dir() / "mdv"));
  for (auto const& [from, to] :
       std::vector<std::pair<char const*, char const*>>{
           {"A", "L"}, {"E", "M"}, {"J", "B"}, {"L", "A"}}) {
    auto const before = run_raptor(tt, tt.require_stop(from),
                                   tt.require_stop(to), 28800, 0);
    auto const after = run_raptor(dup, dup.require_stop(from),
                                  dup.require_stop(to), 28800, 0);
    CHECK(before.anchors == after.anchors);
  }
}
