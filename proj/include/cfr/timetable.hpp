#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfr/fare_document.hpp"
#include "cfr/monoid.hpp"
#include "cfr/ticket_graph.hpp"

namespace cfr {

using time_t_s = std::int64_t;  // seconds since service start

constexpr time_t_s kNever = std::numeric_limits<time_t_s>::max() / 4;
constexpr time_t_s kNeverDepart = std::numeric_limits<time_t_s>::min() / 4;

struct stop {
  std::string id;
  std::string name;
  double lat{0};
  double lon{0};
  std::string zone;
  std::string overlap;  // overlap area id, empty if none
  std::string city;     // city id, empty if none
  time_t_s transfer_time{0};
};

struct tt_route {
  std::vector<std::uint32_t> stops;            // stop indices in travel order
  std::vector<std::string> zone_override;      // effective zone per position;
                                               // empty vector = no overrides
  std::vector<std::uint32_t> trips;            // sorted by departure
  std::string hint;

  std::size_t size() const { return stops.size(); }
};

struct tt_trip {
  std::string id;
  std::uint32_t route{0};
  std::vector<time_t_s> arr, dep;     // per position
  std::vector<std::int64_t> dist_m;   // cumulative; empty if feed lacks it
};

struct footpath {
  std::uint32_t from{0};
  std::uint32_t to{0};
  time_t_s duration{0};
};

struct timetable {
  std::vector<stop> stops;
  std::vector<tt_route> routes;
  std::vector<tt_trip> trips;
  std::vector<footpath> footpaths;  // sorted by (from, to)

  // Derived indices; rebuild after any structural change.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> foot_out;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>
      routes_at_stop;  // (route, position)

  void build_indices();
  std::optional<std::uint32_t> find_stop(std::string_view id) const;
  std::uint32_t require_stop(std::string_view id) const;
  std::string const& effective_zone(std::uint32_t route,
                                    std::uint32_t pos) const;
  // Earliest trip of `route` departing position `pos` at or after `t`.
  std::optional<std::uint32_t> earliest_trip(std::uint32_t route,
                                             std::uint32_t pos,
                                             time_t_s t) const;
};

// Straight CSV load: cross-referenced and invariant-checked, trips grouped
// into routes by stop sequence, overtaking trips split apart. Footpaths are
// left as given; closure is a separate step.
timetable load_timetable(std::filesystem::path const& dir);

// Min-duration transitive closure. Self-loops are dropped; the symmetric
// closure is not forced.
std::vector<footpath> close_footpaths(std::vector<footpath> fp,
                                      std::size_t n_stops);

using overlap_map = std::map<std::string, std::vector<std::string>>;

overlap_map load_overlaps(std::filesystem::path const& dir);

// One route copy per zone choice, block-wise: each maximal run of
// consecutive stops inside one overlap area picks a single zone per copy.
timetable duplicate_overlap_routes(timetable tt, overlap_map const& overlaps);

struct fare_annotation {
  monoid_value ride_weight;     // picked up when reaching the stop riding
  std::uint32_t ride_event{0};
  monoid_value board_weight;    // picked up when boarding at the stop
  std::uint32_t board_event{0};
  bool operator==(fare_annotation const&) const = default;
};

struct fare_timetable {
  timetable tt;
  std::vector<std::vector<fare_annotation>> annot;  // [route][position]
  std::vector<fare_state> initial_state;            // per stop

  fare_annotation const& at(std::uint32_t route, std::uint32_t pos) const {
    return annot[route][pos];
  }
};

// Binds the fare document's rules to the timetable: initial states per
// stop, ride-in and boarding weight/event pairs per (route, position).
// Routes are re-split so all trips of a route share annotations.
fare_timetable annotate_fares(timetable tt, cfn const& fares);

int haversine_m(double lat1, double lon1, double lat2, double lon2);

struct dataset {
  cfn fares;
  fare_timetable ftt;
  validation_report report;
};

// Full pipeline: fare document + CSVs, footpath closure, overlap route
// duplication, fare annotation. Throws parse_error if validation fails.
dataset load_dataset(std::filesystem::path const& dir);

}  // namespace cfr
