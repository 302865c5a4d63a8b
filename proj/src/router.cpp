#include "cfr/router.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "cfr/errors.hpp"

namespace cfr {

// --- plain RAPTOR -------------------------------------------------------

raptor_result run_raptor(timetable const& tt, std::uint32_t from,
                         std::uint32_t to, time_t_s dep, int max_rounds) {
  auto const n = tt.stops.size();
  int const cap = max_rounds > 0 ? std::min(max_rounds, kHardRoundCap)
                                 : kHardRoundCap;
  raptor_result res;
  std::vector<time_t_s> best(n, kNever);
  std::vector<time_t_s> prev(n, kNever);
  std::vector<bool> marked(n, false);

  best[from] = dep;
  marked[from] = true;
  for (auto f = tt.foot_out[from].first; f < tt.foot_out[from].second; ++f) {
    auto const& fp = tt.footpaths[f];
    if (dep + fp.duration < best[fp.to]) {
      best[fp.to] = dep + fp.duration;
      marked[fp.to] = true;
    }
  }
  res.target_eta.push_back(best[to]);
  if (best[to] < kNever) {
    res.anchors.emplace_back(0, best[to]);
  }

  for (int k = 1; k <= cap; ++k) {
    prev = best;
    // Collect each touched route once, with its earliest marked position.
    std::map<std::uint32_t, std::uint32_t> queue;
    for (std::uint32_t p = 0; p < n; ++p) {
      if (!marked[p]) {
        continue;
      }
      for (auto const& [r, pos] : tt.routes_at_stop[p]) {
        auto const it = queue.find(r);
        if (it == queue.end() || it->second > pos) {
          queue[r] = pos;
        }
      }
      marked[p] = false;
    }
    if (queue.empty()) {
      break;
    }
    res.rounds = k;
    bool any_marked = false;
    for (auto const& [r, first_pos] : queue) {
      ++res.scans;
      auto const& route = tt.routes[r];
      std::optional<std::uint32_t> trip;
      for (std::uint32_t pos = first_pos; pos < route.stops.size(); ++pos) {
        auto const p = route.stops[pos];
        if (trip.has_value()) {
          auto const arr = tt.trips[*trip].arr[pos];
          if (arr < best[p] && arr < best[to]) {
            best[p] = arr;
            marked[p] = true;
            any_marked = true;
          }
        }
        if (prev[p] < kNever) {
          auto const cand = tt.earliest_trip(
              r, pos, prev[p] + tt.stops[p].transfer_time);
          if (cand.has_value() &&
              (!trip.has_value() ||
               tt.trips[*cand].dep[pos] < tt.trips[*trip].dep[pos])) {
            trip = cand;
          }
        }
      }
    }
    // Footpath phase from stops improved by the route phase.
    std::vector<std::uint32_t> improved;
    for (std::uint32_t p = 0; p < n; ++p) {
      if (marked[p]) {
        improved.push_back(p);
      }
    }
    for (auto const p : improved) {
      for (auto f = tt.foot_out[p].first; f < tt.foot_out[p].second; ++f) {
        auto const& fp = tt.footpaths[f];
        auto const arr = best[p] + fp.duration;
        if (arr < best[fp.to] && arr < best[to]) {
          best[fp.to] = arr;
          marked[fp.to] = true;
          any_marked = true;
        }
      }
    }
    res.target_eta.push_back(best[to]);
    if (best[to] < res.target_eta[k - 1]) {
      res.anchors.emplace_back(k, best[to]);
    }
    if (!any_marked) {
      break;
    }
  }
  return res;
}

// --- backward RAPTOR ----------------------------------------------------

std::vector<std::vector<time_t_s>> run_backward_raptor(
    timetable const& tt, std::uint32_t target, time_t_s latest, int rounds,
    std::uint64_t* scans) {
  auto const n = tt.stops.size();
  std::vector<std::vector<time_t_s>> bound(
      static_cast<std::size_t>(rounds) + 1,
      std::vector<time_t_s>(n, kNeverDepart));
  bound[0][target] = latest;
  // Walking straight to the target; the closed footpath set makes one hop
  // enough.
  for (auto const& fp : tt.footpaths) {
    if (fp.to == target) {
      bound[0][fp.from] =
          std::max(bound[0][fp.from], latest - fp.duration);
    }
  }
  for (int k = 1; k <= rounds; ++k) {
    bound[k] = bound[k - 1];
    for (std::uint32_t r = 0; r < tt.routes.size(); ++r) {
      if (scans != nullptr) {
        ++*scans;
      }
      auto const& route = tt.routes[r];
      // Reverse sweep. `ride` is the latest trip (by departure order) that
      // still reaches some later stop in time to continue.
      std::int64_t ride = -1;
      for (std::int64_t pos = static_cast<std::int64_t>(route.stops.size()) - 1;
           pos >= 0; --pos) {
        auto const p = route.stops[pos];
        if (ride >= 0) {
          auto const d = route.trips[static_cast<std::size_t>(ride)];
          bound[k][p] =
              std::max(bound[k][p],
                       tt.trips[d].dep[pos] - tt.stops[p].transfer_time);
        }
        if (bound[k - 1][p] > kNeverDepart) {
          // Latest trip arriving here no later than the onward bound.
          auto const limit = bound[k - 1][p];
          auto lo = std::int64_t{0};
          auto hi = static_cast<std::int64_t>(route.trips.size()) - 1;
          std::int64_t found = -1;
          while (lo <= hi) {
            auto const mid = (lo + hi) / 2;
            if (tt.trips[route.trips[mid]].arr[pos] <= limit) {
              found = mid;
              lo = mid + 1;
            } else {
              hi = mid - 1;
            }
          }
          ride = std::max(ride, found);
        }
      }
    }
    for (auto const& fp : tt.footpaths) {
      if (bound[k][fp.to] > kNeverDepart) {
        bound[k][fp.from] =
            std::max(bound[k][fp.from], bound[k][fp.to] - fp.duration);
      }
    }
  }
  return bound;
}

departure_bounds overlap_dep_bounds(
    std::vector<std::pair<int, time_t_s>> const& anchors,
    std::vector<std::vector<std::vector<time_t_s>>> const& tables,
    int sigma_tr, std::size_t n_stops) {
  verify(anchors.size() == tables.size(),
         "one backward table per anchor expected");
  departure_bounds out;
  int max_trips = 0;
  for (auto const& [tr, arr] : anchors) {
    max_trips = std::max(max_trips, tr);
  }
  out.m = max_trips + sigma_tr;
  out.dep.assign(static_cast<std::size_t>(out.m) + 1,
                 std::vector<time_t_s>(n_stops, kNeverDepart));
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    auto const n_j = anchors[j].first + sigma_tr;
    verify(static_cast<int>(tables[j].size()) == n_j + 1,
           "backward table for anchor {} has {} rounds, expected {}", j,
           tables[j].size() - 1, n_j);
    for (int k = 0; k <= out.m; ++k) {
      auto const idx = k - out.m + n_j;
      if (idx < 0) {
        continue;
      }
      for (std::size_t p = 0; p < n_stops; ++p) {
        out.dep[k][p] = std::max(out.dep[k][p], tables[j][idx][p]);
      }
    }
  }
  return out;
}

// --- bags ---------------------------------------------------------------

bool label_dominates(dominance_ctx const& ctx, label const& a,
                     label const& b) {
  if (a.arr > b.arr) {
    return false;
  }
  return compare_states(ctx.tg, ctx.spec, ctx.part, a.state, b.state,
                        ctx.fss) != dominance::incomparable;
}

insert_outcome bag_insert(bag& b, label l, dominance_ctx const& ctx) {
  for (auto const& e : b.labels) {
    if (label_dominates(ctx, e, l)) {
      return insert_outcome::rejected;
    }
  }
  std::erase_if(b.labels,
                [&](label const& e) { return label_dominates(ctx, l, e); });
  b.labels.push_back(std::move(l));
  return insert_outcome::inserted;
}

// --- multicriteria engine -------------------------------------------------

namespace {

struct mc_options {
  // Target-bounded pruning (stage 2 of the two-stage scheme): labels of
  // round k die when they arrive later than target_eta[k] + sigma_arr.
  std::vector<time_t_s> const* target_eta{nullptr};
  time_t_s sigma_arr{kNever};
  // Tight per-stop departure bounds; also fixes the round count to m.
  departure_bounds const* bounds{nullptr};
};

struct arena_node {
  time_t_s arr{0};
  fare_state state;
  int round{0};
  std::uint32_t stop{0};
  // back-pointer
  enum class kind : std::uint8_t { origin, ride, walk } k{kind::origin};
  std::uint32_t pred{0};
  std::uint32_t route{0}, trip{0};
  std::uint32_t board_pos{0}, alight_pos{0};
  bool virgin{true};  // nothing ridden or walked yet
};

struct mc_engine {
  fare_timetable const& ftt;
  cfn const& fares;
  comparability_partition const& part;
  query const& q;
  mc_options const& opt;
  dominance_ctx ctx;

  std::vector<arena_node> arena;
  std::vector<std::vector<std::vector<std::uint32_t>>> bags;  // [k][stop]
  std::vector<bool> marked;
  // Settled (arrival, price) incumbents at the target for PTP.
  std::vector<std::pair<time_t_s, price_t>> incumbents;
  router_stats stats;

  mc_engine(fare_timetable const& ftt_, cfn const& fares_,
            comparability_partition const& part_, query const& q_,
            mc_options const& opt_)
      : ftt{ftt_},
        fares{fares_},
        part{part_},
        q{q_},
        opt{opt_},
        ctx{fares_.graph, fares_.spec, part_, q_.fss} {}

  bool ptp_pruned(time_t_s arr, std::uint32_t ticket) const {
    if (!q.ptp) {
      return false;
    }
    auto const price = fares.graph.price(ticket);
    for (auto const& [a, p] : incumbents) {
      if (a <= arr && ptp_filter(price, p)) {
        return true;
      }
    }
    return false;
  }

  void note_incumbent(time_t_s arr, std::uint32_t ticket) {
    if (!q.ptp) {
      return;
    }
    auto const price = fares.graph.price(ticket);
    for (auto const& [a, p] : incumbents) {
      if (a <= arr && p <= price) {
        return;
      }
    }
    std::erase_if(incumbents, [&](auto const& ip) {
      return arr <= ip.first && price <= ip.second;
    });
    incumbents.emplace_back(arr, price);
  }

  time_t_s dep_bound(int k, std::uint32_t p) const {
    if (opt.bounds == nullptr) {
      return kNever;
    }
    auto const idx = opt.bounds->m - k;
    if (idx < 0 || idx > opt.bounds->m) {
      return kNeverDepart;
    }
    return opt.bounds->dep[static_cast<std::size_t>(idx)][p];
  }

  bool round_eta_pruned(int k, time_t_s arr) const {
    if (opt.target_eta == nullptr || opt.sigma_arr >= kNever) {
      return false;
    }
    auto const idx =
        std::min<std::size_t>(static_cast<std::size_t>(k),
                              opt.target_eta->size() - 1);
    auto const eta = (*opt.target_eta)[idx];
    return eta < kNever && arr > eta + opt.sigma_arr;
  }

  // Merge a candidate into B_k(p); dominance is checked against all bags
  // of rounds <= k at p (fewer trips always weakly dominates on the round
  // axis). Returns true when the label was added.
  bool merge(int k, std::uint32_t p, arena_node cand) {
    if (cand.arr > dep_bound(k, p)) {
      return false;  // cannot reach the target within the slack
    }
    if (round_eta_pruned(k, cand.arr)) {
      return false;
    }
    if (ptp_pruned(cand.arr, cand.state.ticket)) {
      return false;
    }
    label const cl{cand.arr, cand.state};
    for (int j = 0; j <= k; ++j) {
      for (auto const id : bags[j][p]) {
        if (label_dominates(ctx, label{arena[id].arr, arena[id].state}, cl)) {
          return false;
        }
      }
    }
    std::erase_if(bags[k][p], [&](std::uint32_t id) {
      return label_dominates(ctx, cl,
                             label{arena[id].arr, arena[id].state});
    });
    auto const id = static_cast<std::uint32_t>(arena.size());
    cand.stop = p;
    arena.push_back(std::move(cand));
    bags[k][p].push_back(id);
    marked[p] = true;
    if (p == q.to) {
      note_incumbent(arena[id].arr, arena[id].state.ticket);
    }
    return true;
  }

  void footpath_phase(int k, std::vector<std::uint32_t> const& sources) {
    auto const& tt = ftt.tt;
    for (auto const p : sources) {
      for (auto f = tt.foot_out[p].first; f < tt.foot_out[p].second; ++f) {
        auto const& fp = tt.footpaths[f];
        for (auto const id :
             std::vector<std::uint32_t>{bags[k][p]}) {  // snapshot
          arena_node cand;
          cand.arr = arena[id].arr + fp.duration;
          cand.state = arena[id].state;
          cand.round = k;
          cand.k = arena_node::kind::walk;
          cand.pred = id;
          cand.virgin = false;
          merge(k, fp.to, std::move(cand));
        }
      }
    }
  }

  void run() {
    auto const& tt = ftt.tt;
    auto const n = tt.stops.size();
    int cap = q.max_rounds > 0 ? std::min(q.max_rounds, kHardRoundCap)
                               : kHardRoundCap;
    if (opt.bounds != nullptr) {
      cap = opt.bounds->m;
    }
    bags.assign(static_cast<std::size_t>(cap) + 1,
                std::vector<std::vector<std::uint32_t>>(n));
    marked.assign(n, false);

    arena_node origin;
    origin.arr = q.dep;
    origin.state = ftt.initial_state[q.from];
    origin.round = 0;
    origin.k = arena_node::kind::origin;
    origin.virgin = true;
    merge(0, q.from, std::move(origin));
    std::vector<std::uint32_t> sources;
    for (std::uint32_t p = 0; p < n; ++p) {
      if (marked[p]) {
        sources.push_back(p);
      }
    }
    footpath_phase(0, sources);

    struct route_label {
      std::uint32_t trip_ord;  // index into route.trips, fixes the vehicle
      fare_state state;
      time_t_s at;  // time at the current stop (arrival, or ready when
                    // freshly boarded)
      std::uint32_t pred;
      std::uint32_t board_pos;
    };

    for (int k = 1; k <= cap; ++k) {
      std::map<std::uint32_t, std::uint32_t> queue;
      for (std::uint32_t p = 0; p < n; ++p) {
        if (!marked[p]) {
          continue;
        }
        for (auto const& [r, pos] : tt.routes_at_stop[p]) {
          auto const it = queue.find(r);
          if (it == queue.end() || it->second > pos) {
            queue[r] = pos;
          }
        }
        marked[p] = false;
      }
      if (queue.empty()) {
        break;
      }
      stats.rounds = k;

      for (auto const& [r, first_pos] : queue) {
        ++stats.routes_scanned;
        auto const& route = tt.routes[r];
        std::vector<route_label> route_bag;

        for (std::uint32_t pos = first_pos; pos < route.stops.size(); ++pos) {
          auto const p = route.stops[pos];
          auto const& ann = ftt.at(r, pos);

          // Advance riding labels to this stop and merge them.
          if (pos > first_pos && !route_bag.empty()) {
            for (auto& rl : route_bag) {
              rl.at = tt.trips[route.trips[rl.trip_ord]].arr[pos];
              rl.state = fare_update(fares.graph, fares.spec, rl.state,
                                     ann.ride_weight, ann.ride_event);
            }
            // Rule 2: drop labels that can no longer reach the target even
            // with the boarding-side transfer time refunded.
            if (opt.bounds != nullptr) {
              auto const idx = opt.bounds->m - k + 1;
              auto const limit =
                  idx >= 0 && idx <= opt.bounds->m
                      ? opt.bounds->dep[static_cast<std::size_t>(idx)][p] +
                            tt.stops[p].transfer_time
                      : kNeverDepart;
              std::erase_if(route_bag, [&](route_label const& rl) {
                return rl.at > limit;
              });
            }
            if (q.ptp) {
              std::erase_if(route_bag, [&](route_label const& rl) {
                return ptp_pruned(rl.at, rl.state.ticket);
              });
            }
            if (opt.target_eta != nullptr) {
              std::erase_if(route_bag, [&](route_label const& rl) {
                return round_eta_pruned(k, rl.at);
              });
            }
            for (auto const& rl : route_bag) {
              arena_node cand;
              cand.arr = rl.at;
              cand.state = rl.state;
              cand.round = k;
              cand.k = arena_node::kind::ride;
              cand.pred = rl.pred;
              cand.route = r;
              cand.trip = route.trips[rl.trip_ord];
              cand.board_pos = rl.board_pos;
              cand.alight_pos = pos;
              cand.virgin = false;
              merge(k, p, std::move(cand));
            }
          }

          // Board: labels that arrived here with k-1 trips catch their
          // earliest departure.
          for (auto const id : bags[k - 1][p]) {
            auto const& node = arena[id];
            auto const ready = node.arr + tt.stops[p].transfer_time;
            auto const trip = tt.earliest_trip(r, pos, ready);
            if (!trip.has_value()) {
              continue;
            }
            if (opt.bounds != nullptr) {
              auto const idx = opt.bounds->m - k + 1;
              auto const limit =
                  idx >= 0 && idx <= opt.bounds->m
                      ? opt.bounds->dep[static_cast<std::size_t>(idx)][p]
                      : kNeverDepart;
              if (node.arr > limit) {
                continue;
              }
            }
            auto state = node.virgin
                             ? node.state
                             : fare_update(fares.graph, fares.spec, node.state,
                                           ann.board_weight, ann.board_event);
            if (ptp_pruned(node.arr, state.ticket)) {
              continue;
            }
            std::uint32_t trip_ord = 0;
            for (std::uint32_t i = 0; i < route.trips.size(); ++i) {
              if (route.trips[i] == *trip) {
                trip_ord = i;
                break;
              }
            }
            // Route-bag dominance is trip-aware: an earlier vehicle with a
            // dominating fare state is better at every later stop.
            bool dominated = false;
            for (auto const& rl : route_bag) {
              if (rl.trip_ord <= trip_ord &&
                  compare_states(fares.graph, fares.spec, part, rl.state,
                                 state, q.fss) != dominance::incomparable) {
                dominated = true;
                break;
              }
            }
            if (dominated) {
              continue;
            }
            std::erase_if(route_bag, [&](route_label const& rl) {
              return trip_ord <= rl.trip_ord &&
                     compare_states(fares.graph, fares.spec, part, state,
                                    rl.state,
                                    q.fss) != dominance::incomparable &&
                     !(trip_ord == rl.trip_ord && state == rl.state);
            });
            route_bag.push_back(
                {trip_ord, std::move(state), ready, id, pos});
          }
        }
      }

      std::vector<std::uint32_t> route_marked;
      for (std::uint32_t p = 0; p < n; ++p) {
        if (marked[p]) {
          route_marked.push_back(p);
        }
      }
      footpath_phase(k, route_marked);

      bool any = false;
      for (std::uint32_t p = 0; p < n; ++p) {
        any = any || marked[p];
      }
      if (!any) {
        break;
      }
    }
  }

  journey reconstruct(std::uint32_t id) const {
    journey j;
    std::vector<std::uint32_t> chain;
    for (auto cur = id;; cur = arena[cur].pred) {
      chain.push_back(cur);
      if (arena[cur].k == arena_node::kind::origin) {
        break;
      }
    }
    std::reverse(chain.begin(), chain.end());
    auto const& tt = ftt.tt;
    for (std::size_t i = 1; i < chain.size(); ++i) {
      auto const& node = arena[chain[i]];
      journey_leg leg;
      if (node.k == arena_node::kind::walk) {
        leg.k = journey_leg::kind::walk;
        leg.dep = arena[chain[i - 1]].arr;
        leg.arr = node.arr;
        leg.from = stop_of(chain[i - 1]);
        leg.to = stop_of(chain[i]);
      } else {
        leg.k = journey_leg::kind::ride;
        leg.route = node.route;
        leg.trip = node.trip;
        leg.from = tt.routes[node.route].stops[node.board_pos];
        leg.to = tt.routes[node.route].stops[node.alight_pos];
        leg.dep = tt.trips[node.trip].dep[node.board_pos];
        leg.arr = tt.trips[node.trip].arr[node.alight_pos];
        ++j.trips;
      }
      j.legs.push_back(leg);
    }
    j.arrival = arena[id].arr;
    j.final_state = arena[id].state;
    j.price = fares.graph.price(j.final_state.ticket);
    auto const replayed = replay_journey(ftt, fares, q.from, j);
    if (!(replayed == j.final_state)) {
      throw internal_error{"journey replay does not reproduce the label"};
    }
    return j;
  }

  std::uint32_t stop_of(std::uint32_t id) const { return arena[id].stop; }

  std::vector<journey> collect_target() {
    std::vector<journey> out;
    for (std::size_t k = 0; k < bags.size(); ++k) {
      for (auto const id : bags[k][q.to]) {
        out.push_back(reconstruct(id));
      }
    }
    return out;
  }
};

}  // namespace

// --- public entry points --------------------------------------------------

namespace {

query_result run_mc(fare_timetable const& ftt, cfn const& fares,
                    comparability_partition const& part, query const& q,
                    mc_options const& opt) {
  mc_engine eng{ftt, fares, part, q, opt};
  eng.run();
  query_result res;
  res.journeys = eng.collect_target();
  res.stats = eng.stats;
  res.stats.journeys = res.journeys.size();
  return res;
}

}  // namespace

query_result run_query(fare_timetable const& ftt, cfn const& fares,
                       comparability_partition const& part, query const& q) {
  auto const& tt = ftt.tt;
  verify(q.from < tt.stops.size() && q.to < tt.stops.size(),
         "query stop out of range");

  switch (q.variant) {
    case router_variant::mc_raptor: {
      mc_options opt;
      auto res = run_mc(ftt, fares, part, q, opt);
      res.stats.price_optimal = price_filter(res.journeys).size();
      return res;
    }
    case router_variant::target_bmrap: {
      auto const stage1 = run_raptor(tt, q.from, q.to, q.dep, q.max_rounds);
      mc_options opt;
      opt.target_eta = &stage1.target_eta;
      opt.sigma_arr = q.sigma_arr;
      auto res = run_mc(ftt, fares, part, q, opt);
      res.stats.anchor_scans = stage1.scans;
      res.stats.price_optimal = price_filter(res.journeys).size();
      return res;
    }
    case router_variant::tight_bmrap: {
      verify(q.sigma_arr < kNever, "tight variant needs a finite arrival slack");
      auto const stage1 = run_raptor(tt, q.from, q.to, q.dep, q.max_rounds);
      query_result res;
      res.stats.anchor_scans = stage1.scans;
      if (stage1.anchors.empty()) {
        return res;  // unreachable: the restricted set is empty
      }
      std::vector<std::vector<std::vector<time_t_s>>> tables;
      for (auto const& [tr, arr] : stage1.anchors) {
        tables.push_back(run_backward_raptor(tt, q.to, arr + q.sigma_arr,
                                             tr + q.sigma_tr,
                                             &res.stats.backward_scans));
      }
      auto const bounds = overlap_dep_bounds(stage1.anchors, tables,
                                             q.sigma_tr, tt.stops.size());
      mc_options opt;
      opt.bounds = &bounds;
      auto mc = run_mc(ftt, fares, part, q, opt);
      mc.stats.anchor_scans = res.stats.anchor_scans;
      mc.stats.backward_scans = res.stats.backward_scans;
      mc.stats.price_optimal = price_filter(mc.journeys).size();
      return mc;
    }
  }
  throw internal_error{"unknown router variant"};
}

std::vector<journey> price_filter(std::vector<journey> const& js) {
  std::vector<journey> out;
  for (std::size_t i = 0; i < js.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < js.size() && !dominated; ++j) {
      if (i == j) {
        continue;
      }
      auto const& a = js[j];
      auto const& b = js[i];
      if (a.arrival <= b.arrival && a.trips <= b.trips && a.price <= b.price) {
        bool const strict = a.arrival < b.arrival || a.trips < b.trips ||
                            a.price < b.price;
        // Exact ties keep the discovery-order first.
        dominated = strict || j < i;
      }
    }
    if (!dominated) {
      out.push_back(js[i]);
    }
  }
  return out;
}

fare_state replay_journey(fare_timetable const& ftt, cfn const& fares,
                          std::uint32_t origin, journey& j) {
  auto state = ftt.initial_state[origin];
  bool virgin = true;
  j.trace.clear();
  for (auto const& leg : j.legs) {
    if (leg.k == journey_leg::kind::walk) {
      virgin = false;
      j.trace.push_back(state);
      continue;
    }
    auto const& route = ftt.tt.routes[leg.route];
    std::uint32_t board_pos = route.stops.size();
    for (std::uint32_t pos = 0; pos < route.stops.size(); ++pos) {
      if (route.stops[pos] == leg.from &&
          ftt.tt.trips[leg.trip].dep[pos] == leg.dep) {
        board_pos = pos;
        break;
      }
    }
    verify(board_pos < route.stops.size(), "journey leg does not match route");
    if (!virgin) {
      auto const& ann = ftt.at(leg.route, board_pos);
      state = fare_update(fares.graph, fares.spec, state, ann.board_weight,
                          ann.board_event);
    }
    virgin = false;
    for (auto pos = board_pos + 1; pos < route.stops.size(); ++pos) {
      auto const& ann = ftt.at(leg.route, pos);
      state = fare_update(fares.graph, fares.spec, state, ann.ride_weight,
                          ann.ride_event);
      if (route.stops[pos] == leg.to &&
          ftt.tt.trips[leg.trip].arr[pos] == leg.arr) {
        break;
      }
    }
    j.trace.push_back(state);
  }
  return state;
}

}  // namespace cfr
