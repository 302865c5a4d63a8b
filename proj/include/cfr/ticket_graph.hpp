#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfr/guard.hpp"
#include "cfr/monoid.hpp"

namespace cfr {

// Prices are stored in hundredths of a currency unit.
using price_t = std::int64_t;

std::string format_price(price_t p);

struct ticket {
  std::string id;
  price_t price{0};
  std::uint64_t fss_ignore{0};  // component mask ignored when comparing
                                // equal-ticket states with FSS enabled
};

struct ticket_edge {
  std::uint32_t from{0};
  std::uint32_t to{0};
  std::int32_t priority{0};
  guard g;
};

// DAG of tickets with guarded, priority-ordered transition edges. The first
// satisfied guard in ascending priority wins; if none fires the ticket is
// kept, so the transition function is total and deterministic.
struct ticket_graph {
  std::vector<ticket> tickets;
  std::vector<ticket_edge> edges;  // sorted by (from, priority)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;  // per ticket

  // Reflexive-transitive reachability, one bit row per ticket.
  std::vector<std::uint64_t> reach_bits;
  std::uint32_t reach_words{0};

  // Call after tickets/edges are filled; sorts edges, builds the out-edge
  // index and the reachability matrix. Throws on cycles.
  void finalize();

  std::size_t size() const { return tickets.size(); }
  std::optional<std::uint32_t> find(std::string_view id) const;
  std::uint32_t require(std::string_view id) const;
  // True iff there is a directed path from a to b (including a == b).
  bool reaches(std::uint32_t a, std::uint32_t b) const {
    return (reach_bits[a * reach_words + b / 64] >> (b % 64)) & 1;
  }
  price_t price(std::uint32_t t) const;
};

// The label payload of the routing search: current ticket + accumulated
// weight.
struct fare_state {
  std::uint32_t ticket{0};
  monoid_value weight;
  bool operator==(fare_state const&) const = default;
};

// First satisfied out-edge guard in priority order, else stay. The result
// is always in the closed out-neighborhood of `from`.
std::uint32_t transition(ticket_graph const& tg, monoid_spec const& spec,
                         std::uint32_t from, monoid_value const& h,
                         std::uint32_t event);

// Weight is added first; the transition sees the post-addition weight.
fare_state fare_update(ticket_graph const& tg, monoid_spec const& spec,
                       fare_state const& f, monoid_value const& w,
                       std::uint32_t event);

// Forward closure including the start ticket itself.
std::vector<std::uint32_t> compute_reach(ticket_graph const& tg,
                                         std::uint32_t t);

// A set of tickets is traceable iff its induced sub-DAG has a Hamiltonian
// path, decided by checking that Kahn peeling is forced at every step.
bool check_traceable(ticket_graph const& tg,
                     std::vector<std::uint32_t> const& tickets);

enum class overtaking_verdict : std::uint8_t { holds, violated, unknown };

struct overtaking_witness {
  std::uint32_t from_ticket{0};
  std::uint32_t to_ticket{0};
  monoid_value h;
  monoid_value h_bar;
  std::uint32_t event{0};
};

struct overtaking_mode {
  bool exhaustive{true};
  std::uint64_t trials{100000};  // sampled mode
  std::uint64_t seed{1};
  // Sampling ranges for unbounded counters.
  std::uint64_t counter_max{10000};
};

struct overtaking_result {
  overtaking_verdict verdict{overtaking_verdict::unknown};
  std::optional<overtaking_witness> witness;
  std::uint64_t checked{0};
};

// Checks, for every ordered ticket pair k -> l inside reach(t), that a
// worse weight can never yield a ticket off the path of the better one
// after the same update.
overtaking_result check_no_overtaking(ticket_graph const& tg,
                                      monoid_spec const& spec,
                                      event_table const& events,
                                      std::uint32_t t,
                                      overtaking_mode const& mode);

enum class comp_class : std::uint8_t { full, partial, none };
std::string_view to_string(comp_class c);

enum class partition_provenance : std::uint8_t {
  proved_exhaustive,
  proved_sampled,
  asserted_by_config
};
std::string_view to_string(partition_provenance p);

struct comparability_partition {
  std::vector<comp_class> cls;
  std::vector<partition_provenance> provenance;
  std::vector<std::uint64_t> trials;  // sampled provenance only

  std::vector<std::uint32_t> members(comp_class c) const;
};

struct partition_assertion {
  std::uint32_t ticket{0};
  comp_class cls{comp_class::none};
};

// Full comparability needs a traceable reach with the no-overtaking
// property; partial comparability needs every guard in the reach to be
// weight-independent (a syntactic, conservative check). Config assertions
// override with provenance recorded; a consistency re-check still applies.
comparability_partition compute_partition(
    ticket_graph const& tg, monoid_spec const& spec, event_table const& events,
    overtaking_mode const& mode,
    std::vector<partition_assertion> const& asserted = {});

enum class dominance : std::uint8_t {
  incomparable,
  dominates_or_equal,  // f1 <= f2 with equal ticket and (masked) weight
  dominates_strictly
};

// The dominance order on fare states: requires the left ticket to be
// comparable at all, the weight order to hold, and the tickets to be
// related as the left ticket's comparability class demands. With FSS on
// and equal tickets, the ticket's ignore mask is dropped from the weight
// comparison (masked components count as equal).
dominance compare_states(ticket_graph const& tg, monoid_spec const& spec,
                         comparability_partition const& part,
                         fare_state const& f1, fare_state const& f2, bool fss);

}  // namespace cfr
