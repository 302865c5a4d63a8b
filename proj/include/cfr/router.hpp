#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cfr/fare_document.hpp"
#include "cfr/ticket_graph.hpp"
#include "cfr/timetable.hpp"

namespace cfr {

constexpr int kHardRoundCap = 25;

enum class router_variant : std::uint8_t { mc_raptor, target_bmrap, tight_bmrap };

struct query {
  std::uint32_t from{0};
  std::uint32_t to{0};
  time_t_s dep{0};
  int max_rounds{0};  // <= 0 means run to quiescence under the hard cap
  router_variant variant{router_variant::mc_raptor};
  bool ptp{false};
  bool fss{false};
  time_t_s sigma_arr{kNever};  // kNever disables the arrival slack
  int sigma_tr{0};
};

struct journey_leg {
  enum class kind : std::uint8_t { ride, walk };
  kind k{kind::ride};
  std::uint32_t from{0}, to{0};
  time_t_s dep{0}, arr{0};
  std::uint32_t route{0}, trip{0};  // rides only
};

struct journey {
  std::vector<journey_leg> legs;
  time_t_s arrival{0};
  int trips{0};
  fare_state final_state;
  price_t price{0};
  std::vector<fare_state> trace;  // fare state after each leg
};

struct router_stats {
  std::uint64_t routes_scanned{0};  // multicriteria stage only
  std::uint64_t anchor_scans{0};
  std::uint64_t backward_scans{0};
  int rounds{0};
  std::size_t journeys{0};
  std::size_t price_optimal{0};
};

struct query_result {
  std::vector<journey> journeys;  // state-optimal set at the target
  router_stats stats;
};

// --- plain earliest-arrival RAPTOR ------------------------------------

struct raptor_result {
  // Best known target arrival after round k (index 0 = walking only);
  // nonincreasing, kNever where unreached.
  std::vector<time_t_s> target_eta;
  // Pareto front over (trips, arrival) at the target, deduplicated.
  std::vector<std::pair<int, time_t_s>> anchors;
  int rounds{0};
  std::uint64_t scans{0};
};

raptor_result run_raptor(timetable const& tt, std::uint32_t from,
                         std::uint32_t to, time_t_s dep, int max_rounds);

// Latest time one can be at stop p and still reach `target` by `latest`
// using at most k more trips; index [k][stop], k = 0..rounds. Transfer
// times are charged on the boarding side, mirroring the forward search.
std::vector<std::vector<time_t_s>> run_backward_raptor(
    timetable const& tt, std::uint32_t target, time_t_s latest, int rounds,
    std::uint64_t* scans = nullptr);

struct departure_bounds {
  int m{0};
  std::vector<std::vector<time_t_s>> dep;  // [k][stop], k = 0..m
};

// Overlaps the per-anchor backward tables into one bounds table:
// dep(k,p) = max over anchors J with k >= m - n_J of table_J(k - m + n_J, p).
departure_bounds overlap_dep_bounds(
    std::vector<std::pair<int, time_t_s>> const& anchors,
    std::vector<std::vector<std::vector<time_t_s>>> const& tables,
    int sigma_tr, std::size_t n_stops);

// --- label bags --------------------------------------------------------

struct label {
  time_t_s arr{0};
  fare_state state;
};

struct dominance_ctx {
  ticket_graph const& tg;
  monoid_spec const& spec;
  comparability_partition const& part;
  bool fss{false};
};

// a weakly dominates b on (arrival, fare state)
bool label_dominates(dominance_ctx const& ctx, label const& a, label const& b);

struct bag {
  std::vector<label> labels;
};

enum class insert_outcome : std::uint8_t { inserted, rejected };

// Rejected iff an existing label weakly dominates the candidate (exact
// duplicates keep the incumbent); otherwise inserts and evicts everything
// the candidate weakly dominates.
insert_outcome bag_insert(bag& b, label l, dominance_ctx const& ctx);

// --- queries ------------------------------------------------------------

query_result run_query(fare_timetable const& ftt, cfn const& fares,
                       comparability_partition const& part, query const& q);

// Pareto filter on (arrival, trips, price); ties keep the journey with
// lexicographically smaller (trips, price, discovery order).
std::vector<journey> price_filter(std::vector<journey> const& js);

constexpr price_t kNoPrice = std::numeric_limits<price_t>::max();

// Price threshold of target pruning: a partial journey whose ticket already
// costs at least the settled target price cannot become cheaper. The engine
// applies it jointly with an arrival comparison against the settled target
// labels, which keeps the price-Pareto set exactly intact.
inline bool ptp_filter(price_t label_ticket_price,
                       price_t best_target_price) {
  return best_target_price != kNoPrice &&
         label_ticket_price >= best_target_price;
}

// Re-simulates the journey's legs from the origin's initial state, filling
// the fare trace; throws internal_error when the stored final state is not
// reproduced.
fare_state replay_journey(fare_timetable const& ftt, cfn const& fares,
                          std::uint32_t origin, journey& j);

}  // namespace cfr
