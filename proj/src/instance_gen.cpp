#include "cfr/instance_gen.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "cfr/errors.hpp"
#include "cfr/rng.hpp"

namespace cfr {

namespace {

std::string stop_name(int i) { return fmt::format("S{}", i); }

// Random boolean guard over the given components/events, rendered as text
// and parsed back so the generated document is the single source of truth.
std::string random_guard(rng& r, monoid_spec const& spec,
                         event_table const& events, bool weight_dependent) {
  auto comp_atom = [&]() -> std::string {
    auto const c = r.below(spec.components.size());
    auto const& cs = spec.components[c];
    switch (cs.kind) {
      case component_kind::finite_set:
        return fmt::format("(>= {} {})", cs.name,
                           r.range(1, cs.universe.size()));
      case component_kind::saturating_counter:
        return fmt::format("(>= {} {})", cs.name, r.range(1, cs.cap));
      case component_kind::indicator:
        return fmt::format("(= {} 1)", cs.name);
      case component_kind::counter:
        return fmt::format("(> {} {})", cs.name, 500 * r.range(1, 8));
    }
    return "(true)";
  };
  auto event_atom = [&]() {
    return fmt::format("(= event {})",
                       events.names[r.below(events.size())]);
  };
  if (!weight_dependent) {
    return event_atom();
  }
  auto const a = comp_atom();
  switch (r.below(3)) {
    case 0: return a;
    case 1: return fmt::format("(and {} {})", a, event_atom());
    default: return fmt::format("(or {} {})", a, event_atom());
  }
}

}  // namespace

generated_instance gen_random_instance(instance_params const& params) {
  verify(params.n_stops >= 2 && params.n_stops <= 12 &&
             params.n_routes >= 1 && params.n_routes <= 8 &&
             params.trips_per_route >= 1 && params.n_tickets >= 1 &&
             params.n_tickets <= 6,
         "instance parameters out of range");
  rng r{params.seed * 0x2545f4914f6cdd1dull + 0x9e3779b97f4a7c15ull};
  generated_instance inst;

  // --- weight monoid ---
  cfn c;
  std::vector<component_spec> comps;
  bool const with_zones = r.chance(0.85);
  std::vector<std::string> zone_universe;
  if (with_zones) {
    auto const n_zones = r.range(2, 3);
    for (std::uint64_t i = 0; i < n_zones; ++i) {
      zone_universe.push_back(fmt::format("z{}", static_cast<char>('a' + i)));
    }
    comps.push_back({"zones", component_kind::finite_set, 0, zone_universe,
                     "zones"});
  }
  auto const n_extra = r.range(with_zones ? 0 : 1, 2);
  for (std::uint64_t i = 0; i < n_extra; ++i) {
    auto const name = fmt::format("w{}", i + 1);
    if (!params.finite_only && r.chance(0.4)) {
      comps.push_back({name, component_kind::counter, 0, {}, "m"});
    } else if (r.chance(0.5)) {
      comps.push_back({name, component_kind::saturating_counter, r.range(1, 3),
                       {}, ""});
    } else {
      comps.push_back({name, component_kind::indicator, 0, {}, ""});
    }
  }
  c.spec = monoid_spec::make(std::move(comps));
  c.ride_weights.per_component.assign(c.spec.components.size(), {});
  c.board_weights.per_component.assign(c.spec.components.size(), {});
  if (params.finite_only) {
    verify(c.spec.domain_size() <= params.max_domain,
           "generated weight domain too large");
  }

  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(params.n_events);
       ++i) {
    c.events.add(fmt::format("e{}", i + 1));
  }

  // --- ticket graph: forward edges over an indexed order keep it acyclic,
  // nondecreasing prices keep it monotone ---
  price_t price = 100 + static_cast<price_t>(r.below(200));
  for (int i = 0; i < params.n_tickets; ++i) {
    c.graph.tickets.push_back({fmt::format("T{}", i), price, 0});
    price += static_cast<price_t>(r.below(300));
  }
  for (int i = 0; i < params.n_tickets; ++i) {
    std::int32_t prio = 0;
    for (int j = i + 1; j < params.n_tickets; ++j) {
      if (!r.chance(params.edge_density)) {
        continue;
      }
      ticket_edge e;
      e.from = static_cast<std::uint32_t>(i);
      e.to = static_cast<std::uint32_t>(j);
      e.priority = prio++;
      e.g = parse_guard(
          random_guard(r, c.spec, c.events, r.chance(params.weight_guard_frac)),
          c.spec, c.events);
      c.graph.edges.push_back(std::move(e));
    }
  }
  c.graph.finalize();

  // FSS masks on components no reachable guard looks at.
  for (auto& tk : c.graph.tickets) {
    if (!r.chance(0.3)) {
      continue;
    }
    auto const t = c.graph.require(tk.id);
    std::uint64_t referenced = 0;
    for (auto const k : compute_reach(c.graph, t)) {
      for (auto e = c.graph.out[k].first; e < c.graph.out[k].second; ++e) {
        referenced |= referenced_components(c.graph.edges[e].g);
      }
    }
    std::uint64_t eligible = 0;
    for (std::uint32_t i = 0; i < c.spec.components.size(); ++i) {
      if (!(referenced >> i & 1)) {
        eligible |= 1ull << i;
      }
    }
    if (eligible != 0) {
      for (std::uint32_t i = 0; i < c.spec.components.size(); ++i) {
        if ((eligible >> i & 1) && r.chance(0.7)) {
          tk.fss_ignore |= 1ull << i;
        }
      }
    }
  }

  // --- stops ---
  struct gen_stop {
    std::string id, zone, overlap;
    double lat, lon;
    time_t_s transfer;
  };
  std::vector<gen_stop> stops;
  for (int i = 0; i < params.n_stops; ++i) {
    gen_stop s;
    s.id = stop_name(i);
    s.zone = with_zones ? zone_universe[r.below(zone_universe.size())] : "z0";
    s.lat = 51.0 + 0.2 * static_cast<double>(r.below(1000)) / 1000.0;
    s.lon = 12.0 + 0.2 * static_cast<double>(r.below(1000)) / 1000.0;
    s.transfer = params.constant_mode ? 60 * r.below(2)
                                      : 60 * r.below(3);
    stops.push_back(std::move(s));
  }
  bool const with_overlap =
      with_zones && zone_universe.size() >= 2 && r.chance(0.25);
  if (with_overlap) {
    auto const n_ov = r.range(1, 2);
    for (std::uint64_t i = 0; i < n_ov; ++i) {
      stops[r.below(stops.size())].overlap = "ov1";
    }
  }

  // --- routes and trips ---
  struct gen_trip {
    std::string id;
    std::vector<int> stop_idx;
    std::vector<time_t_s> arr, dep;
    std::vector<std::int64_t> dist;  // cumulative; empty = none
  };
  std::vector<gen_trip> trips;
  std::vector<std::vector<int>> used_sequences;
  for (int ri = 0; ri < params.n_routes; ++ri) {
    // a short random walk without repeats; in constant mode the sequence
    // must be unique, or merged duplicate trips would break the headway
    // grid
    std::vector<int> seq;
    for (int attempt = 0; attempt < 20; ++attempt) {
      seq.clear();
      auto const len = r.range(3, std::min<std::uint64_t>(6, params.n_stops));
      seq.push_back(static_cast<int>(r.below(params.n_stops)));
      while (seq.size() < len) {
        auto const next = static_cast<int>(r.below(params.n_stops));
        if (std::find(seq.begin(), seq.end(), next) == seq.end()) {
          seq.push_back(next);
        }
      }
      if (!params.constant_mode ||
          std::find(used_sequences.begin(), used_sequences.end(), seq) ==
              used_sequences.end()) {
        break;
      }
      seq.clear();
    }
    if (seq.empty()) {
      continue;
    }
    used_sequences.push_back(seq);
    std::vector<time_t_s> ride(seq.size() - 1);
    for (auto& d : ride) {
      d = params.constant_mode ? 60 * r.range(1, 4) : 60 * r.range(1, 8);
    }
    bool const with_dist = r.chance(0.7);
    bool const jitter = !params.constant_mode && r.chance(0.2);
    int const n_trips =
        params.constant_mode ? 200 : params.trips_per_route;
    time_t_s const headway = params.constant_mode
                                 ? 60
                                 : 300 + 60 * static_cast<time_t_s>(r.below(10));
    time_t_s const t0 =
        params.constant_mode ? 0 : static_cast<time_t_s>(60 * r.below(30));
    std::vector<std::int64_t> dist(seq.size(), 0);
    for (std::size_t p = 1; p < seq.size(); ++p) {
      dist[p] = dist[p - 1] + 100 + static_cast<std::int64_t>(r.below(50)) * 100;
    }
    for (int k = 0; k < n_trips; ++k) {
      gen_trip t;
      t.id = fmt::format("r{}t{}", ri, k);
      t.stop_idx = seq;
      auto rd = ride;
      if (jitter && k > 0 && r.chance(0.5)) {
        rd[r.below(rd.size())] += 60;
      }
      time_t_s at = t0 + k * headway;
      for (std::size_t p = 0; p < seq.size(); ++p) {
        t.arr.push_back(at);
        t.dep.push_back(at);
        if (p + 1 < seq.size()) {
          at += rd[p];
        }
      }
      if (with_dist) {
        t.dist = dist;
      }
      trips.push_back(std::move(t));
    }
  }

  // --- footpaths ---
  struct gen_fp {
    int from, to;
    time_t_s dur;
  };
  std::vector<gen_fp> fps;
  auto const n_fp = r.below(3);
  for (std::uint64_t i = 0; i < n_fp; ++i) {
    auto const a = static_cast<int>(r.below(params.n_stops));
    auto const b = static_cast<int>(r.below(params.n_stops));
    if (a != b) {
      fps.push_back({a, b, 60 * static_cast<time_t_s>(r.range(1, 3))});
    }
  }

  // --- binding rules ---
  for (std::uint32_t ci = 0; ci < c.spec.components.size(); ++ci) {
    auto const& cs = c.spec.components[ci];
    weight_binding b;
    switch (cs.kind) {
      case component_kind::finite_set:
        b.k = r.chance(0.5) ? weight_binding::kind::zone_tail
                            : weight_binding::kind::zone_head;
        break;
      case component_kind::counter:
        b.k = r.chance(0.5) ? weight_binding::kind::dist_m
                            : weight_binding::kind::constant;
        b.value = 1;
        break;
      case component_kind::saturating_counter:
        if (r.chance(0.7)) {
          b.k = weight_binding::kind::constant;
          b.value = 1;
        }
        break;
      case component_kind::indicator: break;  // zero; events do the work
    }
    c.ride_weights.per_component[ci] = b;
    weight_binding bb;
    if (cs.kind == component_kind::indicator && r.chance(0.3)) {
      bb.k = weight_binding::kind::constant;
      bb.value = 1;
    }
    if (cs.kind == component_kind::saturating_counter && r.chance(0.2)) {
      bb.k = weight_binding::kind::constant;
      bb.value = 1;
    }
    c.board_weights.per_component[ci] = bb;
  }

  // Event rules pinned to stop pairs give arbitrary per-arc events while
  // staying inside the declarative rule format.
  std::vector<std::pair<int, int>> arcs_seen;
  for (auto const& t : trips) {
    for (std::size_t p = 0; p + 1 < t.stop_idx.size(); ++p) {
      auto const arc = std::make_pair(t.stop_idx[p], t.stop_idx[p + 1]);
      if (std::find(arcs_seen.begin(), arcs_seen.end(), arc) ==
          arcs_seen.end()) {
        arcs_seen.push_back(arc);
      }
    }
  }
  for (auto const& [a, b] : arcs_seen) {
    if (c.events.size() > 1 && r.chance(0.5)) {
      event_rule er;
      er.kind = arc_kind::ride;
      er.from_stop = stop_name(a);
      er.to_stop = stop_name(b);
      er.event = static_cast<std::uint32_t>(r.range(1, c.events.size() - 1));
      c.event_rules.push_back(std::move(er));
    }
  }
  for (int p = 0; p < params.n_stops; ++p) {
    if (c.events.size() > 1 && r.chance(0.4)) {
      event_rule er;
      er.kind = arc_kind::board;
      er.to_stop = stop_name(p);
      er.event = static_cast<std::uint32_t>(r.range(1, c.events.size() - 1));
      c.event_rules.push_back(std::move(er));
    }
  }

  // Start rules: a few stop-specific ones plus a default.
  auto make_start = [&](std::optional<std::string> stop_id) {
    start_rule sr;
    sr.stop = std::move(stop_id);
    sr.ticket = static_cast<std::uint32_t>(
        r.below(std::max<std::uint64_t>(1, c.graph.size() - 1)));
    sr.weight.per_component.assign(c.spec.components.size(), {});
    for (std::uint32_t ci = 0; ci < c.spec.components.size(); ++ci) {
      if (c.spec.components[ci].kind == component_kind::finite_set) {
        sr.weight.per_component[ci].k = weight_binding::kind::stop_zone;
      }
    }
    return sr;
  };
  for (int p = 0; p < params.n_stops; ++p) {
    if (r.chance(0.4)) {
      c.starts.push_back(make_start(stop_name(p)));
    }
  }
  c.starts.push_back(make_start(std::nullopt));

  // --- serialize ---
  inst.files["fares.cfn"] = write_cfn(c);

  std::string stops_csv =
      "stop_id,name,lat,lon,zone_id,overlap_id,city_id,transfer_time_s\n";
  for (auto const& s : stops) {
    stops_csv += fmt::format("{},{},{:.6f},{:.6f},{},{},{},{}\n", s.id, s.id,
                             s.lat, s.lon, s.zone, s.overlap, "", s.transfer);
  }
  inst.files["stops.csv"] = std::move(stops_csv);

  std::string trips_csv = "trip_id,route_hint\n";
  std::string st_csv = "trip_id,seq,stop_id,arr_s,dep_s,dist_m\n";
  for (auto const& t : trips) {
    trips_csv += fmt::format("{},{}\n", t.id, "");
    for (std::size_t p = 0; p < t.stop_idx.size(); ++p) {
      st_csv += fmt::format(
          "{},{},{},{},{},{}\n", t.id, p, stop_name(t.stop_idx[p]), t.arr[p],
          t.dep[p], t.dist.empty() ? std::string{}
                                    : fmt::format("{}", t.dist[p]));
    }
  }
  inst.files["trips.csv"] = std::move(trips_csv);
  inst.files["stop_times.csv"] = std::move(st_csv);

  std::string fp_csv = "from,to,duration_s\n";
  for (auto const& f : fps) {
    fp_csv += fmt::format("{},{},{}\n", stop_name(f.from), stop_name(f.to),
                          f.dur);
  }
  inst.files["footpaths.csv"] = std::move(fp_csv);

  if (with_overlap) {
    std::string ov_csv = "overlap_id,zone_id\n";
    auto z1 = zone_universe[0];
    auto z2 = zone_universe[1];
    ov_csv += fmt::format("ov1,{}\nov1,{}\n", z1, z2);
    inst.files["overlaps.csv"] = std::move(ov_csv);
  }

  for (int i = 0; i < params.n_queries; ++i) {
    gen_query q;
    q.from = stop_name(static_cast<int>(r.below(params.n_stops)));
    q.to = r.chance(0.05)
               ? q.from
               : stop_name(static_cast<int>(r.below(params.n_stops)));
    // Constant-mode instances must query after every route's first full
    // sweep, so that a departure exists at every grid tick a label can
    // reach (the product-graph oracle assumes dense departures).
    q.dep = params.constant_mode
                ? 3600 + 60 * static_cast<time_t_s>(r.below(30))
                : static_cast<time_t_s>(r.below(3600));
    inst.queries.push_back(std::move(q));
  }
  return inst;
}

void write_instance(std::filesystem::path const& dir,
                    generated_instance const& inst) {
  std::filesystem::create_directories(dir);
  for (auto const& [name, contents] : inst.files) {
    std::ofstream out{dir / name, std::ios::binary};
    verify(out.good(), "cannot write {}", (dir / name).string());
    out << contents;
  }
}

dataset materialize_instance(generated_instance const& inst,
                             std::filesystem::path const& dir) {
  write_instance(dir, inst);
  return load_dataset(dir);
}

generated_instance gen_synthetic_city(std::uint64_t seed, int grid_w,
                                      int grid_h, int n_routes) {
  rng r{seed * 0x9e3779b97f4a7c15ull + 1};
  generated_instance inst;

  int const block = 5;  // zone = 5x5 grid block
  auto zone_of = [&](int x, int y) {
    return fmt::format("z{}_{}", x / block, y / block);
  };
  auto stop_id = [&](int x, int y) { return fmt::format("G{}_{}", x, y); };

  std::vector<std::string> universe;
  for (int x = 0; x < (grid_w + block - 1) / block; ++x) {
    for (int y = 0; y < (grid_h + block - 1) / block; ++y) {
      universe.push_back(fmt::format("z{}_{}", x, y));
    }
  }

  // Zone-count chain with a distance-limited discount entry.
  std::string doc = "cfn 1\n";
  doc += "component dist counter unit=m\n";
  doc += "component stops counter unit=stops\n";
  doc += fmt::format("component zones set universe={}\n",
                     fmt::join(universe, ","));
  doc += "event tra\n";
  doc += "ticket D price=1.50\n";
  int const n_chain = 6;
  for (int i = 1; i <= n_chain; ++i) {
    doc += fmt::format("ticket Z{} price={}.{:02} fss_ignore=dist,stops\n", i,
                       2 + i, (i * 37) % 100);
  }
  doc += "ticket M price=12.00 fss_ignore=dist,stops\n";
  for (int i = 1; i <= n_chain; ++i) {
    doc += fmt::format("edge Z{} M prio=0 guard=(>= zones {})\n", i,
                       n_chain + 1);
    for (int j = n_chain; j > i; --j) {
      doc += fmt::format("edge Z{} Z{} prio={} guard=(>= zones {})\n", i, j,
                         n_chain + 1 - j, j);
    }
  }
  for (int i = std::min(4, n_chain); i >= 1; --i) {
    doc += fmt::format(
        "edge D Z{} prio={} guard=(and (>= zones {}) (or (> dist 4000) (= "
        "event tra)))\n",
        i, std::min(4, n_chain) - i, i);
  }
  doc += "start ticket=D zones={$zone}\n";
  doc += "event_rule kind=board event=tra\n";
  doc += "weight_rule kind=ride dist=dist_m stops=1 zones={$zone_tail}\n";
  inst.files["fares.cfn"] = doc;

  std::string stops_csv =
      "stop_id,name,lat,lon,zone_id,overlap_id,city_id,transfer_time_s\n";
  for (int x = 0; x < grid_w; ++x) {
    for (int y = 0; y < grid_h; ++y) {
      stops_csv += fmt::format("{},{},{:.6f},{:.6f},{},,,60\n", stop_id(x, y),
                               stop_id(x, y), 51.0 + 0.004 * y,
                               12.0 + 0.004 * x, zone_of(x, y));
    }
  }
  inst.files["stops.csv"] = std::move(stops_csv);

  std::string trips_csv = "trip_id,route_hint\n";
  std::string st_csv = "trip_id,seq,stop_id,arr_s,dep_s,dist_m\n";
  for (int ri = 0; ri < n_routes; ++ri) {
    bool const horizontal = r.chance(0.5);
    int const fixed = static_cast<int>(
        r.below(horizontal ? grid_h : grid_w));
    int const max_len = horizontal ? grid_w : grid_h;
    int const len = static_cast<int>(r.range(6, std::min(16, max_len)));
    int const start = static_cast<int>(r.below(max_len - len + 1));
    bool const reverse = r.chance(0.5);
    std::vector<std::string> seq;
    for (int i = 0; i < len; ++i) {
      int const v = reverse ? start + len - 1 - i : start + i;
      seq.push_back(horizontal ? stop_id(v, fixed) : stop_id(fixed, v));
    }
    int const n_trips = 8;
    time_t_s const headway = 1200;
    time_t_s const t0 = 6 * 3600 + 60 * static_cast<time_t_s>(r.below(20));
    time_t_s const ride = 120 + 60 * static_cast<time_t_s>(r.below(3));
    for (int k = 0; k < n_trips; ++k) {
      auto const id = fmt::format("c{}t{}", ri, k);
      trips_csv += fmt::format("{},\n", id);
      time_t_s at = t0 + k * headway;
      std::int64_t dist = 0;
      for (std::size_t p = 0; p < seq.size(); ++p) {
        st_csv += fmt::format("{},{},{},{},{},{}\n", id, p, seq[p], at, at,
                              dist);
        at += ride;
        dist += 420;
      }
    }
  }
  inst.files["trips.csv"] = std::move(trips_csv);
  inst.files["stop_times.csv"] = std::move(st_csv);

  std::string fp_csv = "from,to,duration_s\n";
  for (int i = 0; i < 80; ++i) {
    int const x = static_cast<int>(r.below(grid_w - 1));
    int const y = static_cast<int>(r.below(grid_h - 1));
    fp_csv += fmt::format("{},{},120\n{},{},120\n", stop_id(x, y),
                          stop_id(x + 1, y + 1), stop_id(x + 1, y + 1),
                          stop_id(x, y));
  }
  inst.files["footpaths.csv"] = std::move(fp_csv);
  return inst;
}

}  // namespace cfr
