#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfr/guard.hpp"
#include "cfr/monoid.hpp"
#include "cfr/ticket_graph.hpp"

namespace cfr {

enum class arc_kind : std::uint8_t { ride, board };

// How one monoid component is filled when an arc/boarding/start is
// annotated.
struct weight_binding {
  enum class kind : std::uint8_t {
    zero,
    constant,   // scalar components
    dist_m,     // distance increment in meters (counters)
    zone_tail,  // singleton {zone of the arc's tail stop} (sets)
    zone_head,  // singleton {zone of the arc's head stop} (sets)
    stop_zone,  // singleton {zone of the stop itself}; start rules only
    atoms       // set literal
  };
  kind k{kind::zero};
  std::uint64_t value{0};
  std::vector<std::uint32_t> atom_list;
  bool operator==(weight_binding const&) const = default;
};

struct weight_rule {
  std::vector<weight_binding> per_component;  // one entry per monoid component
  bool operator==(weight_rule const&) const = default;
};

// Initial fare states: first matching rule decides the starting ticket and
// weight of journeys beginning at a stop.
struct start_rule {
  std::optional<std::string> stop;
  std::optional<std::string> zone;
  std::optional<std::string> city;  // "*" matches any city
  std::uint32_t ticket{0};
  weight_rule weight;
  bool operator==(start_rule const&) const = default;
};

// Fare events per arc, first-match. Ride rules see the arc's tail/head
// stop attributes; board rules see the boarding stop as head.
struct event_rule {
  arc_kind kind{arc_kind::ride};
  std::optional<std::string> from_stop, to_stop;
  std::optional<std::string> from_zone, to_zone;
  std::optional<std::string> from_city, to_city;
  bool leaves_city{false};  // tail in a city, head not in that city
  std::uint32_t event{0};
  bool operator==(event_rule const&) const = default;
};

struct validation_issue {
  bool error{true};
  std::string code;
  std::string message;
};

struct validation_report {
  std::vector<validation_issue> issues;

  bool valid() const;
  std::size_t error_count() const;
  std::string to_string() const;
};

// A parsed fare-structure document: the weight monoid, the event alphabet,
// the ticket graph with guarded edges, and the rules that bind all of it
// to a timetable.
struct cfn {
  monoid_spec spec;
  event_table events;
  ticket_graph graph;
  std::vector<start_rule> starts;
  std::vector<event_rule> event_rules;
  weight_rule ride_weights, board_weights;
  std::vector<partition_assertion> assertions;

  // Semantic problems found while parsing (dangling references); carried
  // into validate_cfn's report.
  std::vector<validation_issue> parse_issues;
};

// Throws parse_error on malformed syntax. Dangling semantic references are
// recorded in parse_issues instead so validate_cfn can report them.
cfn parse_cfn(std::string_view text);
cfn load_cfn(std::filesystem::path const& file);

// Canonical text form; parse(write(c)) reproduces c exactly.
std::string write_cfn(cfn const& c);

// Structural validation: cycle freeness, price monotonicity along edges,
// reference checks, duplicate priorities, FSS mask safety, plus a sampled
// lint for overlapping guards on one ticket.
validation_report validate_cfn(cfn const& c);

}  // namespace cfr
