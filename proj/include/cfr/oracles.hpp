#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cfr/fare_document.hpp"
#include "cfr/router.hpp"
#include "cfr/timetable.hpp"

namespace cfr {

// Ground-truth references for the routing engine. Everything here works by
// brute force and never consults the comparability partition, so it stays
// valid when the dominance machinery is wrong.

struct enum_journey {
  time_t_s arrival{0};
  int trips{0};
  price_t price{0};
  fare_state final_state;
};

struct enumerate_options {
  int max_trips{4};
  std::uint64_t node_budget{2'000'000};
};

// Depth-first enumeration of every feasible journey (rides and footpaths,
// earliest-boarding per route, no consecutive walks, revisits allowed up
// to the trip cap). Fare states are evaluated forward; no pruning.
// Throws capability_error when the node budget is exhausted.
std::vector<enum_journey> enumerate_journeys(fare_timetable const& ftt,
                                             cfn const& fares,
                                             std::uint32_t from,
                                             std::uint32_t to, time_t_s dep,
                                             enumerate_options const& opt);

// The same, Pareto-filtered on (arrival, trips, price).
std::vector<enum_journey> enumerate_pareto(fare_timetable const& ftt,
                                           cfn const& fares,
                                           std::uint32_t from,
                                           std::uint32_t to, time_t_s dep,
                                           enumerate_options const& opt);

// --- DFA product-graph oracle -------------------------------------------

// Fare evaluation recast as a finite automaton: states are (ticket, weight)
// pairs, letters are the (weight, event) pairs that actually occur on arcs.
struct fare_dfa {
  std::vector<fare_state> states;
  std::vector<std::pair<monoid_value, std::uint32_t>> alphabet;
  std::vector<std::uint32_t> delta;  // [state * alphabet + letter]
  std::uint32_t q0{0};

  std::size_t num_states() const { return states.size(); }
  std::uint32_t step(std::uint32_t q, std::uint32_t letter) const {
    return delta[q * alphabet.size() + letter];
  }
  std::uint32_t state_index(fare_state const& f) const;
};

// Requires a finite weight domain.
fare_dfa build_dfa(cfn const& fares, fare_state const& q0,
                   std::vector<std::pair<monoid_value, std::uint32_t>>
                       alphabet);

struct pareto_point {
  time_t_s arrival{0};
  price_t price{0};
  bool operator==(pareto_point const&) const = default;
  auto operator<=>(pareto_point const&) const = default;
};

struct product_dijkstra_result {
  std::vector<pareto_point> pareto;  // over (arrival, price)
  std::uint64_t graph_arcs{0};
  std::uint64_t product_edges{0};
  std::uint64_t product_edge_bound{0};  // |A| * |T| * |H|
};

// Dijkstra over the product of the event-expanded routing graph with the
// fare DFA. Only valid for constant-travel-time instances: every route
// must run on an aligned fixed-headway grid so waiting vanishes; anything
// else raises capability_error. A positive max_trips adds a trip-count
// layer to the product so the result ranges over the same journey universe
// as a capped enumeration.
product_dijkstra_result dfa_product_dijkstra(fare_timetable const& ftt,
                                             cfn const& fares,
                                             std::uint32_t from,
                                             std::uint32_t to, time_t_s dep,
                                             int max_trips = 0);

// Pareto filter over (arrival, price), sorted ascending by arrival.
std::vector<pareto_point> pareto_2d(std::vector<pareto_point> points);

}  // namespace cfr
