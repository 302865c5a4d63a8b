#include "cfr/oracles.hpp"

#include <algorithm>
#include <queue>

#include <fmt/format.h>

#include "cfr/errors.hpp"

namespace cfr {

namespace {

struct enumerator {
  fare_timetable const& ftt;
  cfn const& fares;
  std::uint32_t to;
  enumerate_options const& opt;
  std::uint64_t nodes{0};
  std::vector<enum_journey> found;

  void visit(std::uint32_t stop, time_t_s t, fare_state const& f, bool virgin,
             int trips, bool last_was_walk) {
    if (++nodes > opt.node_budget) {
      throw capability_error{
          "journey enumeration budget exhausted; shrink the instance"};
    }
    if (stop == to) {
      found.push_back({t, trips, fares.graph.price(f.ticket), f});
    }
    auto const& tt = ftt.tt;
    if (!last_was_walk) {
      for (auto fi = tt.foot_out[stop].first; fi < tt.foot_out[stop].second;
           ++fi) {
        auto const& fp = tt.footpaths[fi];
        visit(fp.to, t + fp.duration, f, false, trips, true);
      }
    }
    if (trips >= opt.max_trips) {
      return;
    }
    auto const ready = t + tt.stops[stop].transfer_time;
    for (auto const& [r, pos] : tt.routes_at_stop[stop]) {
      if (pos + 1 >= tt.routes[r].stops.size()) {
        continue;  // nothing to ride
      }
      auto const trip = tt.earliest_trip(r, pos, ready);
      if (!trip.has_value()) {
        continue;
      }
      auto state = f;
      if (!virgin) {
        auto const& ann = ftt.at(r, pos);
        state = fare_update(fares.graph, fares.spec, state, ann.board_weight,
                            ann.board_event);
      }
      for (auto alight = pos + 1; alight < tt.routes[r].stops.size();
           ++alight) {
        auto const& ann = ftt.at(r, alight);
        state = fare_update(fares.graph, fares.spec, state, ann.ride_weight,
                            ann.ride_event);
        visit(tt.routes[r].stops[alight], tt.trips[*trip].arr[alight], state,
              false, trips + 1, false);
      }
    }
  }
};

bool enum_dominates(enum_journey const& a, enum_journey const& b) {
  return a.arrival <= b.arrival && a.trips <= b.trips && a.price <= b.price &&
         (a.arrival < b.arrival || a.trips < b.trips || a.price < b.price);
}

}  // namespace

std::vector<enum_journey> enumerate_journeys(fare_timetable const& ftt,
                                             cfn const& fares,
                                             std::uint32_t from,
                                             std::uint32_t to, time_t_s dep,
                                             enumerate_options const& opt) {
  enumerator e{ftt, fares, to, opt, 0, {}};
  e.visit(from, dep, ftt.initial_state[from], true, 0, false);
  return std::move(e.found);
}

std::vector<enum_journey> enumerate_pareto(fare_timetable const& ftt,
                                           cfn const& fares,
                                           std::uint32_t from,
                                           std::uint32_t to, time_t_s dep,
                                           enumerate_options const& opt) {
  auto const all = enumerate_journeys(ftt, fares, from, to, dep, opt);
  std::vector<enum_journey> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < all.size() && !drop; ++j) {
      if (i == j) {
        continue;
      }
      drop = enum_dominates(all[j], all[i]) ||
             (all[j].arrival == all[i].arrival &&
              all[j].trips == all[i].trips && all[j].price == all[i].price &&
              j < i);
    }
    if (!drop) {
      out.push_back(all[i]);
    }
  }
  std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
    return std::tie(a.arrival, a.trips, a.price) <
           std::tie(b.arrival, b.trips, b.price);
  });
  return out;
}

// --- DFA ------------------------------------------------------------------

std::uint32_t fare_dfa::state_index(fare_state const& f) const {
  for (std::uint32_t i = 0; i < states.size(); ++i) {
    if (states[i] == f) {
      return i;
    }
  }
  throw structural_error{"fare state is not part of the DFA state set"};
}

fare_dfa build_dfa(cfn const& fares, fare_state const& q0,
                   std::vector<std::pair<monoid_value, std::uint32_t>>
                       alphabet) {
  if (!fares.spec.finite()) {
    throw capability_error{
        "the DFA construction needs a finite weight domain"};
  }
  fare_dfa d;
  d.alphabet = std::move(alphabet);
  auto const values = enumerate_values(fares.spec);
  d.states.reserve(fares.graph.size() * values.size());
  std::map<std::pair<std::uint32_t, std::vector<std::uint64_t>>, std::uint32_t>
      index;
  for (std::uint32_t t = 0; t < fares.graph.size(); ++t) {
    for (auto const& v : values) {
      index[{t, v.words}] = static_cast<std::uint32_t>(d.states.size());
      d.states.push_back({t, v});
    }
  }
  d.delta.resize(d.states.size() * d.alphabet.size());
  for (std::uint32_t q = 0; q < d.states.size(); ++q) {
    for (std::uint32_t a = 0; a < d.alphabet.size(); ++a) {
      auto const next = fare_update(fares.graph, fares.spec, d.states[q],
                                    d.alphabet[a].first, d.alphabet[a].second);
      d.delta[q * d.alphabet.size() + a] = index.at({next.ticket,
                                                     next.weight.words});
    }
  }
  d.q0 = index.at({q0.ticket, q0.weight.words});
  return d;
}

std::vector<pareto_point> pareto_2d(std::vector<pareto_point> points) {
  std::sort(points.begin(), points.end());
  std::vector<pareto_point> out;
  auto best = std::numeric_limits<price_t>::max();
  for (auto const& p : points) {
    if (p.price < best) {
      out.push_back(p);
      best = p.price;
    }
  }
  return out;
}

namespace {

struct expanded_graph {
  // Node layout: 0 = origin (still virgin at the source stop), then one
  // node per stop, then per (route, position) a boarding node and a riding
  // node. Alighting is only possible from riding nodes, so a label cannot
  // board and leave without moving, mirroring the route-bag semantics.
  struct arc {
    std::uint32_t from, to;
    time_t_s dur;
    std::int64_t letter;  // index into the alphabet, -1 for fare-free arcs
    bool boards;          // counts a trip when capped
  };
  std::size_t n_nodes{0};
  std::vector<arc> arcs;
  std::vector<std::pair<monoid_value, std::uint32_t>> alphabet;
  std::uint32_t origin{0};
  std::vector<std::uint32_t> station;   // per stop
  time_t_s last_departure{0};           // grid end, for the horizon check
};

expanded_graph build_expanded(fare_timetable const& ftt, std::uint32_t from,
                              time_t_s dep) {
  auto const& tt = ftt.tt;
  expanded_graph g;
  g.origin = 0;
  g.station.resize(tt.stops.size());
  for (std::uint32_t p = 0; p < tt.stops.size(); ++p) {
    g.station[p] = 1 + p;
  }
  g.n_nodes = 1 + tt.stops.size();
  std::vector<std::uint32_t> board_base(tt.routes.size());
  std::vector<std::uint32_t> ride_base(tt.routes.size());
  for (std::uint32_t r = 0; r < tt.routes.size(); ++r) {
    board_base[r] = static_cast<std::uint32_t>(g.n_nodes);
    g.n_nodes += tt.routes[r].stops.size();
    ride_base[r] = static_cast<std::uint32_t>(g.n_nodes);
    g.n_nodes += tt.routes[r].stops.size();
  }

  std::map<std::pair<std::vector<std::uint64_t>, std::uint32_t>, std::int64_t>
      letter_index;
  auto letter_of = [&](monoid_value const& w, std::uint32_t e) {
    auto const key = std::make_pair(w.words, e);
    auto const it = letter_index.find(key);
    if (it != letter_index.end()) {
      return it->second;
    }
    auto const idx = static_cast<std::int64_t>(g.alphabet.size());
    letter_index[key] = idx;
    g.alphabet.emplace_back(w, e);
    return idx;
  };

  // The instance must behave like a constant-travel-time graph: identical
  // trip profiles on an aligned fixed-headway grid, with every duration a
  // multiple of the headway. Anything else is time-dependent.
  auto reject = [](std::string const& why) {
    throw capability_error{fmt::format(
        "instance is time-dependent ({}); the product-graph oracle only "
        "covers constant travel times",
        why)};
  };
  time_t_s grid = 0;
  g.last_departure = kNever;
  for (std::uint32_t r = 0; r < tt.routes.size(); ++r) {
    auto const& route = tt.routes[r];
    if (route.trips.size() < 2) {
      reject("route with fewer than two trips");
    }
    auto const& first = tt.trips[route.trips[0]];
    auto const headway =
        tt.trips[route.trips[1]].dep[0] - first.dep[0];
    if (headway <= 0) {
      reject("non-positive headway");
    }
    if (grid == 0) {
      grid = headway;
    } else if (grid != headway) {
      reject("mixed headways");
    }
    for (std::size_t i = 0; i < route.trips.size(); ++i) {
      auto const& trip = tt.trips[route.trips[i]];
      auto const shift = trip.dep[0] - first.dep[0];
      if (shift != static_cast<time_t_s>(i) * headway) {
        reject("departures off the grid");
      }
      for (std::size_t p = 0; p < route.stops.size(); ++p) {
        if (trip.dep[p] - trip.arr[p] != first.dep[p] - first.arr[p] ||
            trip.arr[p] - trip.dep[0] != first.arr[p] - first.dep[0]) {
          reject("trips with different profiles");
        }
      }
    }
    if (first.dep[0] % headway != 0) {
      reject("grid not aligned at zero");
    }
    g.last_departure = std::min(
        g.last_departure, tt.trips[route.trips.back()].dep[0]);
  }
  if (dep % grid != 0) {
    reject("query departure off the grid");
  }
  for (auto const& s : tt.stops) {
    if (s.transfer_time % grid != 0) {
      reject("transfer time off the grid");
    }
  }
  for (auto const& fp : tt.footpaths) {
    if (fp.duration % grid != 0) {
      reject("footpath duration off the grid");
    }
  }

  for (std::uint32_t r = 0; r < tt.routes.size(); ++r) {
    auto const& route = tt.routes[r];
    auto const& first = tt.trips[route.trips[0]];
    for (std::uint32_t pos = 0; pos < route.stops.size(); ++pos) {
      auto const p = route.stops[pos];
      auto const& ann = ftt.at(r, pos);
      if (pos + 1 < route.stops.size()) {
        auto const ride = first.arr[pos + 1] - first.dep[pos];
        if (ride % grid != 0 || ride <= 0) {
          reject("ride duration off the grid");
        }
        auto const& next_ann = ftt.at(r, pos + 1);
        auto const letter =
            letter_of(next_ann.ride_weight, next_ann.ride_event);
        g.arcs.push_back({board_base[r] + pos, ride_base[r] + pos + 1, ride,
                          letter, false});
        g.arcs.push_back({ride_base[r] + pos, ride_base[r] + pos + 1, ride,
                          letter, false});
        // Boarding pays the transfer time; from the origin node the fare
        // pair is skipped (a journey's first boarding is not a transfer).
        g.arcs.push_back({g.station[p], board_base[r] + pos,
                          tt.stops[p].transfer_time,
                          letter_of(ann.board_weight, ann.board_event), true});
        if (p == from) {
          g.arcs.push_back({g.origin, board_base[r] + pos,
                            tt.stops[p].transfer_time, -1, true});
        }
      }
      if (pos > 0) {
        g.arcs.push_back({ride_base[r] + pos, g.station[p], 0, -1, false});
      }
    }
  }
  for (auto const& fp : tt.footpaths) {
    g.arcs.push_back({g.station[fp.from], g.station[fp.to], fp.duration, -1,
                      false});
    if (fp.from == from) {
      g.arcs.push_back({g.origin, g.station[fp.to], fp.duration, -1, false});
    }
  }
  return g;
}

}  // namespace

product_dijkstra_result dfa_product_dijkstra(fare_timetable const& ftt,
                                             cfn const& fares,
                                             std::uint32_t from,
                                             std::uint32_t to, time_t_s dep,
                                             int max_trips) {
  auto const g = build_expanded(ftt, from, dep);
  auto const dfa = build_dfa(fares, ftt.initial_state[from], g.alphabet);
  auto const n_q = dfa.num_states();
  auto const n_layers =
      static_cast<std::size_t>(max_trips > 0 ? max_trips + 1 : 1);

  product_dijkstra_result res;
  res.graph_arcs = g.arcs.size();
  res.product_edges = g.arcs.size() * n_q;
  res.product_edge_bound =
      g.arcs.size() * fares.graph.size() * fares.spec.domain_size();

  std::vector<std::vector<std::uint32_t>> out(g.n_nodes);
  for (std::uint32_t a = 0; a < g.arcs.size(); ++a) {
    out[g.arcs[a].from].push_back(a);
  }

  auto const idx = [&](std::uint32_t node, std::uint32_t q, std::size_t k) {
    return (static_cast<std::size_t>(node) * n_q + q) * n_layers + k;
  };
  std::vector<time_t_s> dist(g.n_nodes * n_q * n_layers, kNever);
  using pq_item = std::pair<time_t_s, std::size_t>;
  std::priority_queue<pq_item, std::vector<pq_item>, std::greater<>> pq;
  auto const start = idx(g.origin, dfa.q0, 0);
  dist[start] = dep;
  pq.push({dep, start});
  while (!pq.empty()) {
    auto const [t, cur] = pq.top();
    pq.pop();
    if (t > dist[cur]) {
      continue;
    }
    auto const k = cur % n_layers;
    auto const node = static_cast<std::uint32_t>(cur / n_layers / n_q);
    auto const q = static_cast<std::uint32_t>(cur / n_layers % n_q);
    for (auto const ai : out[node]) {
      auto const& arc = g.arcs[ai];
      auto nk = k;
      if (arc.boards && n_layers > 1) {
        if (k + 1 >= n_layers) {
          continue;  // trip budget exhausted
        }
        nk = k + 1;
      }
      auto const nq =
          arc.letter < 0
              ? q
              : dfa.step(q, static_cast<std::uint32_t>(arc.letter));
      auto const nt = t + arc.dur;
      auto const ni = idx(arc.to, nq, nk);
      if (nt < dist[ni]) {
        dist[ni] = nt;
        pq.push({nt, ni});
      }
    }
  }

  // Every settled vehicle state must still have a grid departure left,
  // otherwise the instance horizon was too short for this query.
  for (std::uint32_t node = 1 + static_cast<std::uint32_t>(
                               ftt.tt.stops.size());
       node < g.n_nodes; ++node) {
    for (std::uint32_t q = 0; q < n_q; ++q) {
      for (std::size_t k = 0; k < n_layers; ++k) {
        auto const t = dist[idx(node, q, k)];
        if (t < kNever && t > g.last_departure) {
          throw capability_error{
              "instance horizon too short for the product-graph oracle"};
        }
      }
    }
  }

  std::vector<pareto_point> pts;
  for (std::uint32_t q = 0; q < n_q; ++q) {
    for (std::size_t k = 0; k < n_layers; ++k) {
      auto const t = dist[idx(g.station[to], q, k)];
      if (t < kNever) {
        pts.push_back({t, fares.graph.price(dfa.states[q].ticket)});
      }
    }
  }
  if (from == to) {
    pts.push_back({dep, fares.graph.price(ftt.initial_state[from].ticket)});
  }
  res.pareto = pareto_2d(std::move(pts));
  return res;
}

}  // namespace cfr
