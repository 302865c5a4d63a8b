#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cfr/timetable.hpp"

namespace cfr {

struct instance_params {
  std::uint64_t seed{1};
  int n_stops{8};           // <= 12
  int n_routes{4};          // <= 8
  int trips_per_route{3};   // <= 4 (ignored in constant mode)
  int n_tickets{4};         // <= 6
  int n_events{2};          // event symbols besides s0
  double edge_density{0.55};
  double weight_guard_frac{0.6};
  bool finite_only{true};   // restrict to finite component kinds
  bool constant_mode{false};  // aligned fixed-headway grid, for the
                              // product-graph oracle
  int n_queries{3};
  std::uint64_t max_domain{200};
};

struct gen_query {
  std::string from, to;
  time_t_s dep{0};
};

struct generated_instance {
  // File name -> contents; the same bytes the loaders consume.
  std::map<std::string, std::string> files;
  std::vector<gen_query> queries;
};

// Deterministic per seed, byte for byte. The produced fare document always
// passes validation.
generated_instance gen_random_instance(instance_params const& params);

void write_instance(std::filesystem::path const& dir,
                    generated_instance const& inst);

// Convenience: write to a fresh temp dir and load through the standard
// pipeline, so tests and oracles consume identical bytes.
dataset materialize_instance(generated_instance const& inst,
                             std::filesystem::path const& dir);

// A larger seeded grid city with a zone-count fare chain plus a
// distance-limited discount; used by the benchmark comparisons.
generated_instance gen_synthetic_city(std::uint64_t seed, int grid_w = 23,
                                      int grid_h = 22, int n_routes = 300);

}  // namespace cfr
