#include "cfr/timetable.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "cfr/errors.hpp"

namespace cfr {

namespace {

struct csv_file {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // row i is file line i+2

  std::optional<std::size_t> col(std::string_view name_) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name_) {
        return i;
      }
    }
    return std::nullopt;
  }
  std::size_t require_col(std::string_view col_name) const {
    auto const c = col(col_name);
    verify_input(c.has_value(), "{}: missing column {}", name, col_name);
    return *c;
  }
  std::string const& cell(std::size_t row, std::size_t col_) const {
    static std::string const empty;
    return col_ < rows[row].size() ? rows[row][col_] : empty;
  }
  std::int64_t int_cell(std::size_t row, std::size_t col_) const {
    auto const& s = cell(row, col_);
    verify_input(!s.empty(), "{}:{}: expected integer, got empty cell", name,
                 row + 2);
    try {
      return std::stoll(s);
    } catch (std::exception const&) {
      throw parse_error{
          fmt::format("{}:{}: expected integer, got '{}'", name, row + 2, s)};
    }
  }
  double double_cell(std::size_t row, std::size_t col_) const {
    auto const& s = cell(row, col_);
    try {
      return std::stod(s);
    } catch (std::exception const&) {
      throw parse_error{
          fmt::format("{}:{}: expected number, got '{}'", name, row + 2, s)};
    }
  }
};

std::vector<std::string> split_line(std::string const& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto const comma = line.find(',', pos);
    auto field = line.substr(pos, comma == std::string::npos ? comma
                                                             : comma - pos);
    if (!field.empty() && field.back() == '\r') {
      field.pop_back();
    }
    out.push_back(std::move(field));
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

csv_file read_csv(std::filesystem::path const& dir, std::string const& name,
                  bool required) {
  auto const path = dir / name;
  csv_file f{name, {}, {}};
  std::ifstream in{path};
  if (!in.good()) {
    verify_input(!required, "missing file {}", path.string());
    return f;
  }
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    auto fields = split_line(line);
    if (first) {
      f.header = std::move(fields);
      first = false;
    } else {
      f.rows.push_back(std::move(fields));
    }
  }
  verify_input(!first, "{} is empty", path.string());
  return f;
}

}  // namespace

void timetable::build_indices() {
  std::sort(footpaths.begin(), footpaths.end(), [](auto const& a, auto const& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  foot_out.assign(stops.size(), {0, 0});
  for (std::uint32_t i = 0; i < footpaths.size(); ++i) {
    if (i == 0 || footpaths[i].from != footpaths[i - 1].from) {
      foot_out[footpaths[i].from].first = i;
    }
    foot_out[footpaths[i].from].second = i + 1;
  }
  routes_at_stop.assign(stops.size(), {});
  for (std::uint32_t r = 0; r < routes.size(); ++r) {
    for (std::uint32_t pos = 0; pos < routes[r].stops.size(); ++pos) {
      routes_at_stop[routes[r].stops[pos]].emplace_back(r, pos);
    }
  }
}

std::optional<std::uint32_t> timetable::find_stop(std::string_view id) const {
  for (std::uint32_t i = 0; i < stops.size(); ++i) {
    if (stops[i].id == id) {
      return i;
    }
  }
  return std::nullopt;
}

std::uint32_t timetable::require_stop(std::string_view id) const {
  auto const i = find_stop(id);
  verify(i.has_value(), "unknown stop {}", id);
  return *i;
}

std::string const& timetable::effective_zone(std::uint32_t route,
                                             std::uint32_t pos) const {
  auto const& r = routes[route];
  if (!r.zone_override.empty() && !r.zone_override[pos].empty()) {
    return r.zone_override[pos];
  }
  return stops[r.stops[pos]].zone;
}

std::optional<std::uint32_t> timetable::earliest_trip(std::uint32_t route,
                                                      std::uint32_t pos,
                                                      time_t_s t) const {
  auto const& r = routes[route];
  // Trips are FIFO within a route, so departures at `pos` are sorted.
  auto const it = std::partition_point(
      r.trips.begin(), r.trips.end(),
      [&](std::uint32_t d) { return trips[d].dep[pos] < t; });
  if (it == r.trips.end()) {
    return std::nullopt;
  }
  return *it;
}

timetable load_timetable(std::filesystem::path const& dir) {
  timetable tt;

  auto const stops_csv = read_csv(dir, "stops.csv", true);
  {
    auto const c_id = stops_csv.require_col("stop_id");
    auto const c_name = stops_csv.col("name");
    auto const c_lat = stops_csv.col("lat");
    auto const c_lon = stops_csv.col("lon");
    auto const c_zone = stops_csv.col("zone_id");
    auto const c_overlap = stops_csv.col("overlap_id");
    auto const c_city = stops_csv.col("city_id");
    auto const c_tr = stops_csv.col("transfer_time_s");
    for (std::size_t i = 0; i < stops_csv.rows.size(); ++i) {
      stop s;
      s.id = stops_csv.cell(i, c_id);
      verify_input(!s.id.empty(), "stops.csv:{}: empty stop_id", i + 2);
      verify_input(!tt.find_stop(s.id).has_value(),
                   "stops.csv:{}: duplicate stop_id {}", i + 2, s.id);
      if (c_name) s.name = stops_csv.cell(i, *c_name);
      if (c_lat && !stops_csv.cell(i, *c_lat).empty())
        s.lat = stops_csv.double_cell(i, *c_lat);
      if (c_lon && !stops_csv.cell(i, *c_lon).empty())
        s.lon = stops_csv.double_cell(i, *c_lon);
      if (c_zone) s.zone = stops_csv.cell(i, *c_zone);
      if (c_overlap) s.overlap = stops_csv.cell(i, *c_overlap);
      if (c_city) s.city = stops_csv.cell(i, *c_city);
      if (c_tr && !stops_csv.cell(i, *c_tr).empty()) {
        s.transfer_time = stops_csv.int_cell(i, *c_tr);
        verify_input(s.transfer_time >= 0,
                     "stops.csv:{}: negative transfer time", i + 2);
      }
      tt.stops.push_back(std::move(s));
    }
  }

  auto const trips_csv = read_csv(dir, "trips.csv", true);
  std::map<std::string, std::string> trip_hint;
  {
    auto const c_id = trips_csv.require_col("trip_id");
    auto const c_hint = trips_csv.col("route_hint");
    for (std::size_t i = 0; i < trips_csv.rows.size(); ++i) {
      auto const& id = trips_csv.cell(i, c_id);
      verify_input(!id.empty(), "trips.csv:{}: empty trip_id", i + 2);
      verify_input(trip_hint.emplace(id, c_hint ? trips_csv.cell(i, *c_hint)
                                                : std::string{})
                       .second,
                   "trips.csv:{}: duplicate trip_id {}", i + 2, id);
    }
  }

  auto const st_csv = read_csv(dir, "stop_times.csv", true);
  struct raw_stop_time {
    std::int64_t seq;
    std::uint32_t stop;
    time_t_s arr, dep;
    std::int64_t dist;  // -1 when absent
    std::size_t line;
  };
  std::map<std::string, std::vector<raw_stop_time>> by_trip;
  {
    auto const c_trip = st_csv.require_col("trip_id");
    auto const c_seq = st_csv.require_col("seq");
    auto const c_stop = st_csv.require_col("stop_id");
    auto const c_arr = st_csv.require_col("arr_s");
    auto const c_dep = st_csv.require_col("dep_s");
    auto const c_dist = st_csv.col("dist_m");
    for (std::size_t i = 0; i < st_csv.rows.size(); ++i) {
      auto const& trip_id = st_csv.cell(i, c_trip);
      verify_input(trip_hint.count(trip_id) > 0,
                   "stop_times.csv:{}: unknown trip {}", i + 2, trip_id);
      auto const stop_id = st_csv.cell(i, c_stop);
      auto const si = tt.find_stop(stop_id);
      verify_input(si.has_value(), "stop_times.csv:{}: unknown stop {}", i + 2,
                   stop_id);
      raw_stop_time r{st_csv.int_cell(i, c_seq), *si,
                      st_csv.int_cell(i, c_arr), st_csv.int_cell(i, c_dep),
                      -1, i + 2};
      if (c_dist && !st_csv.cell(i, *c_dist).empty()) {
        r.dist = st_csv.int_cell(i, *c_dist);
      }
      by_trip[trip_id].push_back(r);
    }
  }

  // Assemble trips, check the FIFO invariants, group into routes by stop
  // sequence, and split overtaking trips into separate routes.
  struct raw_trip {
    std::string id;
    std::vector<std::uint32_t> stops;
    std::vector<time_t_s> arr, dep;
    std::vector<std::int64_t> dist;
    std::string hint;
  };
  std::vector<raw_trip> raw;
  for (auto& [id, sts] : by_trip) {
    std::sort(sts.begin(), sts.end(),
              [](auto const& a, auto const& b) { return a.seq < b.seq; });
    raw_trip t;
    t.id = id;
    t.hint = trip_hint[id];
    bool has_dist = true;
    for (std::size_t i = 0; i < sts.size(); ++i) {
      verify_input(sts[i].arr <= sts[i].dep,
                   "stop_times.csv:{}: arrival after departure", sts[i].line);
      if (i > 0) {
        verify_input(sts[i - 1].dep <= sts[i].arr,
                     "stop_times.csv:{}: trip {} travels back in time",
                     sts[i].line, id);
        if (sts[i].dist >= 0) {
          verify_input(sts[i].dist >= sts[i - 1].dist,
                       "stop_times.csv:{}: cumulative distance decreases",
                       sts[i].line);
        }
      }
      t.stops.push_back(sts[i].stop);
      t.arr.push_back(sts[i].arr);
      t.dep.push_back(sts[i].dep);
      has_dist = has_dist && sts[i].dist >= 0;
      t.dist.push_back(sts[i].dist);
    }
    verify_input(t.stops.size() >= 2, "trip {} visits fewer than two stops",
                 id);
    if (!has_dist) {
      t.dist.clear();
    }
    raw.push_back(std::move(t));
  }

  std::map<std::vector<std::uint32_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    groups[raw[i].stops].push_back(i);
  }
  for (auto& [stop_seq, members] : groups) {
    std::sort(members.begin(), members.end(), [&](auto a, auto b) {
      return raw[a].dep[0] != raw[b].dep[0] ? raw[a].dep[0] < raw[b].dep[0]
                                            : raw[a].id < raw[b].id;
    });
    // Layered FIFO partition: a trip joins the first layer whose last
    // member it does not overtake anywhere.
    std::vector<std::vector<std::size_t>> layers;
    for (auto const m : members) {
      bool placed = false;
      for (auto& layer : layers) {
        auto const& last = raw[layer.back()];
        bool fifo = true;
        for (std::size_t p = 0; p < stop_seq.size() && fifo; ++p) {
          fifo = last.dep[p] <= raw[m].dep[p] && last.arr[p] <= raw[m].arr[p];
        }
        if (fifo) {
          layer.push_back(m);
          placed = true;
          break;
        }
      }
      if (!placed) {
        layers.push_back({m});
      }
    }
    for (auto const& layer : layers) {
      tt_route route;
      route.stops = stop_seq;
      route.hint = raw[layer.front()].hint;
      auto const route_idx = static_cast<std::uint32_t>(tt.routes.size());
      for (auto const m : layer) {
        tt_trip trip;
        trip.id = raw[m].id;
        trip.route = route_idx;
        trip.arr = raw[m].arr;
        trip.dep = raw[m].dep;
        trip.dist_m = raw[m].dist;
        route.trips.push_back(static_cast<std::uint32_t>(tt.trips.size()));
        tt.trips.push_back(std::move(trip));
      }
      tt.routes.push_back(std::move(route));
    }
  }

  auto const fp_csv = read_csv(dir, "footpaths.csv", true);
  {
    auto const c_from = fp_csv.require_col("from");
    auto const c_to = fp_csv.require_col("to");
    auto const c_dur = fp_csv.require_col("duration_s");
    for (std::size_t i = 0; i < fp_csv.rows.size(); ++i) {
      auto const from = tt.find_stop(fp_csv.cell(i, c_from));
      auto const to = tt.find_stop(fp_csv.cell(i, c_to));
      verify_input(from.has_value() && to.has_value(),
                   "footpaths.csv:{}: unknown stop", i + 2);
      auto const dur = fp_csv.int_cell(i, c_dur);
      verify_input(dur >= 0, "footpaths.csv:{}: negative duration", i + 2);
      tt.footpaths.push_back({*from, *to, dur});
    }
  }

  tt.build_indices();
  return tt;
}

std::vector<footpath> close_footpaths(std::vector<footpath> fp,
                                      std::size_t n_stops) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, time_t_s> best;
  for (auto const& f : fp) {
    if (f.from == f.to) {
      continue;
    }
    auto const key = std::make_pair(f.from, f.to);
    auto const it = best.find(key);
    if (it == best.end() || it->second > f.duration) {
      best[key] = f.duration;
    }
  }
  // Sparse min-plus closure to a fixpoint; footpath sets are tiny compared
  // to the timetable.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::pair<std::uint32_t, time_t_s>>> adj(n_stops);
    for (auto const& [key, dur] : best) {
      adj[key.first].emplace_back(key.second, dur);
    }
    for (auto const& [key, dur] : std::map{best}) {
      for (auto const& [next, dur2] : adj[key.second]) {
        if (next == key.first) {
          continue;
        }
        auto const cand = dur + dur2;
        auto const it = best.find({key.first, next});
        if (it == best.end() || it->second > cand) {
          best[{key.first, next}] = cand;
          changed = true;
        }
      }
    }
  }
  std::vector<footpath> out;
  out.reserve(best.size());
  for (auto const& [key, dur] : best) {
    out.push_back({key.first, key.second, dur});
  }
  return out;
}

overlap_map load_overlaps(std::filesystem::path const& dir) {
  overlap_map m;
  auto const csv = read_csv(dir, "overlaps.csv", false);
  if (csv.header.empty()) {
    return m;
  }
  auto const c_id = csv.require_col("overlap_id");
  auto const c_zone = csv.require_col("zone_id");
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    m[csv.cell(i, c_id)].push_back(csv.cell(i, c_zone));
  }
  return m;
}

timetable duplicate_overlap_routes(timetable tt, overlap_map const& overlaps) {
  for (auto const& [area, zones] : overlaps) {
    verify_input(zones.size() >= 2,
                 "overlap area {} offers fewer than two zones", area);
  }
  std::vector<tt_route> new_routes;
  std::vector<tt_trip> new_trips;
  for (auto const& route : tt.routes) {
    // Maximal blocks of consecutive positions in the same overlap area.
    struct block {
      std::uint32_t begin, end;  // [begin, end)
      std::vector<std::string> const* zones;
    };
    std::vector<block> blocks;
    for (std::uint32_t p = 0; p < route.stops.size();) {
      auto const& area = tt.stops[route.stops[p]].overlap;
      if (area.empty()) {
        ++p;
        continue;
      }
      auto const it = overlaps.find(area);
      verify_input(it != overlaps.end(),
                   "stop {} references undeclared overlap area {}",
                   tt.stops[route.stops[p]].id, area);
      std::uint32_t q = p + 1;
      while (q < route.stops.size() &&
             tt.stops[route.stops[q]].overlap == area) {
        ++q;
      }
      blocks.push_back({p, q, &it->second});
      p = q;
    }
    if (blocks.empty()) {
      auto copy = route;
      auto const route_idx = static_cast<std::uint32_t>(new_routes.size());
      copy.trips.clear();
      for (auto const t : route.trips) {
        auto trip = tt.trips[t];
        trip.route = route_idx;
        copy.trips.push_back(static_cast<std::uint32_t>(new_trips.size()));
        new_trips.push_back(std::move(trip));
      }
      new_routes.push_back(std::move(copy));
      continue;
    }
    // One copy per combination of block-zone choices.
    std::vector<std::size_t> choice(blocks.size(), 0);
    std::size_t variant = 0;
    while (true) {
      tt_route copy;
      copy.stops = route.stops;
      copy.hint = route.hint;
      copy.zone_override.assign(route.stops.size(), {});
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (auto p = blocks[b].begin; p < blocks[b].end; ++p) {
          copy.zone_override[p] = (*blocks[b].zones)[choice[b]];
        }
      }
      auto const route_idx = static_cast<std::uint32_t>(new_routes.size());
      for (auto const t : route.trips) {
        auto trip = tt.trips[t];
        trip.route = route_idx;
        trip.id = fmt::format("{}#ov{}", trip.id, variant);
        copy.trips.push_back(static_cast<std::uint32_t>(new_trips.size()));
        new_trips.push_back(std::move(trip));
      }
      new_routes.push_back(std::move(copy));
      ++variant;
      std::size_t b = 0;
      for (; b < blocks.size(); ++b) {
        if (++choice[b] < blocks[b].zones->size()) {
          break;
        }
        choice[b] = 0;
      }
      if (b == blocks.size()) {
        break;
      }
    }
  }
  tt.routes = std::move(new_routes);
  tt.trips = std::move(new_trips);
  tt.build_indices();
  return tt;
}

int haversine_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusM = 6371000.0;
  constexpr double kDeg = std::numbers::pi / 180.0;
  auto const dlat = (lat2 - lat1) * kDeg;
  auto const dlon = (lon2 - lon1) * kDeg;
  auto const a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                 std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) *
                     std::sin(dlon / 2) * std::sin(dlon / 2);
  return static_cast<int>(
      std::llround(2 * kEarthRadiusM * std::asin(std::sqrt(a))));
}

namespace {

std::uint32_t resolve_zone_atom(monoid_spec const& spec, std::uint32_t comp,
                                std::string const& zone,
                                std::string const& where) {
  verify_input(!zone.empty(), "{}: stop has no zone but a zone binding", where);
  auto const a = spec.atom_index(comp, zone);
  verify_input(a.has_value(), "{}: zone {} is not in the universe of {}",
               where, zone, spec.components[comp].name);
  return *a;
}

bool matches(start_rule const& r, stop const& s) {
  if (r.stop.has_value() && *r.stop != s.id) {
    return false;
  }
  if (r.zone.has_value() && *r.zone != s.zone) {
    return false;
  }
  if (r.city.has_value()) {
    if (*r.city == "*" ? s.city.empty() : *r.city != s.city) {
      return false;
    }
  }
  return true;
}

}  // namespace

fare_timetable annotate_fares(timetable tt, cfn const& fares) {
  auto const& spec = fares.spec;

  // Initial fare states from the first matching start rule.
  std::vector<fare_state> initial;
  for (auto const& s : tt.stops) {
    fare_state f;
    bool found = false;
    for (auto const& rule : fares.starts) {
      if (!matches(rule, s)) {
        continue;
      }
      f.ticket = rule.ticket;
      f.weight = monoid_zero(spec);
      for (std::uint32_t c = 0; c < rule.weight.per_component.size(); ++c) {
        auto const& b = rule.weight.per_component[c];
        switch (b.k) {
          case weight_binding::kind::zero: break;
          case weight_binding::kind::constant:
            set_scalar(spec, f.weight, c, b.value);
            break;
          case weight_binding::kind::stop_zone:
            set_insert_atom(spec, f.weight, c,
                            resolve_zone_atom(spec, c, s.zone,
                                              fmt::format("stop {}", s.id)));
            break;
          case weight_binding::kind::atoms:
            for (auto const a : b.atom_list) {
              set_insert_atom(spec, f.weight, c, a);
            }
            break;
          default:
            throw parse_error{"ride-arc binding used in a start rule"};
        }
      }
      found = true;
      break;
    }
    verify_input(found, "no start rule matches stop {}", s.id);
    initial.push_back(std::move(f));
  }

  auto const pick_event = [&](arc_kind kind, stop const* tail,
                              std::string const* tail_zone, stop const& head,
                              std::string const& head_zone) -> std::uint32_t {
    for (auto const& r : fares.event_rules) {
      if (r.kind != kind) {
        continue;
      }
      if (r.from_stop.has_value() && (!tail || *r.from_stop != tail->id)) {
        continue;
      }
      if (r.from_zone.has_value() && (!tail_zone || *r.from_zone != *tail_zone)) {
        continue;
      }
      if (r.from_city.has_value() && (!tail || *r.from_city != tail->city)) {
        continue;
      }
      if (r.to_stop.has_value() && *r.to_stop != head.id) {
        continue;
      }
      if (r.to_zone.has_value() && *r.to_zone != head_zone) {
        continue;
      }
      if (r.to_city.has_value() && *r.to_city != head.city) {
        continue;
      }
      if (r.leaves_city &&
          !(tail && !tail->city.empty() && head.city != tail->city)) {
        continue;
      }
      return r.event;
    }
    return 0;  // s0
  };

  // Per-trip annotations; identical across a route's trips by construction
  // unless the feed carries per-trip distances, in which case the route is
  // split below.
  struct trip_annot {
    std::vector<fare_annotation> ann;
    bool operator==(trip_annot const&) const = default;
  };
  auto const annotate_trip = [&](tt_route const& route,
                                 tt_trip const& trip) -> trip_annot {
    trip_annot out;
    out.ann.resize(route.stops.size());
    for (std::uint32_t p = 0; p < route.stops.size(); ++p) {
      auto const& head = tt.stops[route.stops[p]];
      auto const head_zone = !route.zone_override.empty() &&
                                     !route.zone_override[p].empty()
                                 ? route.zone_override[p]
                                 : head.zone;
      auto& a = out.ann[p];
      a.ride_weight = monoid_zero(spec);
      a.board_weight = monoid_zero(spec);
      // Boarding pair.
      a.board_event = pick_event(arc_kind::board, nullptr, nullptr, head,
                                 head_zone);
      for (std::uint32_t c = 0; c < fares.board_weights.per_component.size();
           ++c) {
        auto const& b = fares.board_weights.per_component[c];
        if (b.k == weight_binding::kind::constant) {
          set_scalar(spec, a.board_weight, c, b.value);
        } else if (b.k == weight_binding::kind::atoms) {
          for (auto const at : b.atom_list) {
            set_insert_atom(spec, a.board_weight, c, at);
          }
        } else if (b.k == weight_binding::kind::zone_head ||
                   b.k == weight_binding::kind::zone_tail) {
          set_insert_atom(
              spec, a.board_weight, c,
              resolve_zone_atom(spec, c, head_zone,
                                fmt::format("boarding at {}", head.id)));
        }
      }
      if (p == 0) {
        continue;  // no ride-in arc at the first stop
      }
      auto const& tail = tt.stops[route.stops[p - 1]];
      auto const tail_zone = !route.zone_override.empty() &&
                                     !route.zone_override[p - 1].empty()
                                 ? route.zone_override[p - 1]
                                 : tail.zone;
      a.ride_event =
          pick_event(arc_kind::ride, &tail, &tail_zone, head, head_zone);
      for (std::uint32_t c = 0; c < fares.ride_weights.per_component.size();
           ++c) {
        auto const& b = fares.ride_weights.per_component[c];
        switch (b.k) {
          case weight_binding::kind::zero: break;
          case weight_binding::kind::constant:
            set_scalar(spec, a.ride_weight, c, b.value);
            break;
          case weight_binding::kind::dist_m: {
            std::int64_t inc = 0;
            if (!trip.dist_m.empty()) {
              inc = trip.dist_m[p] - trip.dist_m[p - 1];
            } else {
              inc = haversine_m(tail.lat, tail.lon, head.lat, head.lon);
            }
            verify_input(inc >= 0, "negative distance increment on trip {}",
                         trip.id);
            set_scalar(spec, a.ride_weight, c,
                       static_cast<std::uint64_t>(inc));
            break;
          }
          case weight_binding::kind::zone_tail:
            set_insert_atom(
                spec, a.ride_weight, c,
                resolve_zone_atom(spec, c, tail_zone,
                                  fmt::format("arc into {}", head.id)));
            break;
          case weight_binding::kind::zone_head:
            set_insert_atom(
                spec, a.ride_weight, c,
                resolve_zone_atom(spec, c, head_zone,
                                  fmt::format("arc into {}", head.id)));
            break;
          case weight_binding::kind::stop_zone:
          case weight_binding::kind::atoms:
            if (b.k == weight_binding::kind::atoms) {
              for (auto const at : b.atom_list) {
                set_insert_atom(spec, a.ride_weight, c, at);
              }
            }
            break;
        }
      }
    }
    return out;
  };

  // Annotate, then split routes whose trips disagree.
  std::vector<tt_route> new_routes;
  std::vector<tt_trip> new_trips;
  std::vector<std::vector<fare_annotation>> annot;
  for (auto const& route : tt.routes) {
    std::vector<std::pair<trip_annot, std::vector<std::uint32_t>>> variants;
    for (auto const t : route.trips) {
      auto ann = annotate_trip(route, tt.trips[t]);
      auto it = std::find_if(variants.begin(), variants.end(),
                             [&](auto const& v) { return v.first == ann; });
      if (it == variants.end()) {
        variants.push_back({std::move(ann), {t}});
      } else {
        it->second.push_back(t);
      }
    }
    for (auto& [ann, members] : variants) {
      tt_route copy;
      copy.stops = route.stops;
      copy.zone_override = route.zone_override;
      copy.hint = route.hint;
      auto const route_idx = static_cast<std::uint32_t>(new_routes.size());
      for (auto const t : members) {
        auto trip = tt.trips[t];
        trip.route = route_idx;
        copy.trips.push_back(static_cast<std::uint32_t>(new_trips.size()));
        new_trips.push_back(std::move(trip));
      }
      new_routes.push_back(std::move(copy));
      annot.push_back(std::move(ann.ann));
    }
  }
  tt.routes = std::move(new_routes);
  tt.trips = std::move(new_trips);
  tt.build_indices();

  fare_timetable ftt;
  ftt.tt = std::move(tt);
  ftt.annot = std::move(annot);
  ftt.initial_state = std::move(initial);
  return ftt;
}

dataset load_dataset(std::filesystem::path const& dir) {
  dataset d;
  d.fares = load_cfn(dir / "fares.cfn");
  d.report = validate_cfn(d.fares);
  verify_input(d.report.valid(), "invalid fare document:\n{}",
               d.report.to_string());
  auto tt = load_timetable(dir);
  tt.footpaths = close_footpaths(std::move(tt.footpaths), tt.stops.size());
  tt.build_indices();
  tt = duplicate_overlap_routes(std::move(tt), load_overlaps(dir));
  d.ftt = annotate_fares(std::move(tt), d.fares);
  return d;
}

}  // namespace cfr
