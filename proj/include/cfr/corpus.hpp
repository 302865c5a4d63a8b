#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cfr/instance_gen.hpp"
#include "cfr/oracles.hpp"
#include "cfr/router.hpp"

namespace cfr {

struct corpus_params {
  int seeds{1000};
  std::uint64_t base_seed{1};
  int constant_every{5};  // every n-th instance runs on the aligned grid
  int max_trips{4};       // shared trip cap for router and oracle
  int threads{0};         // 0 = library default
};

instance_params corpus_instance_params(corpus_params const& p, int index);

struct corpus_instance {
  int index{0};
  instance_params params;
  dataset data;
  comparability_partition partition;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> query_stops;
  std::vector<time_t_s> query_deps;
};

// Generates, materializes and loads every corpus instance, then invokes
// the visitor (in parallel; the visitor must be thread-safe).
void visit_corpus(corpus_params const& p,
                  std::function<void(corpus_instance const&)> const& visit);

struct corpus_outcome {
  int instances{0};
  int queries{0};
  int oracle_mismatches{0};
  int dfa_queries{0};
  int dfa_mismatches{0};
  int cn_nonempty{0};  // instances whose partition has a C_N ticket
  std::vector<std::string> failures;  // first few, for diagnostics
};

// The basic oracle-equivalence sweep: router + enumeration oracle on every
// instance, plus the product-graph oracle on the constant subset.
corpus_outcome run_oracle_corpus(corpus_params const& p);

// (arrival, trips, price) triple used for result-set comparisons.
struct journey_triple {
  time_t_s arrival{0};
  int trips{0};
  price_t price{0};
  auto operator<=>(journey_triple const&) const = default;
};

std::vector<journey_triple> triples_of(std::vector<journey> const& js);
std::vector<journey_triple> triples_of(std::vector<enum_journey> const& js);

}  // namespace cfr
