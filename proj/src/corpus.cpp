#include "cfr/corpus.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <mutex>

#include <fmt/format.h>

#include "cfr/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cfr {

instance_params corpus_instance_params(corpus_params const& p, int index) {
  instance_params ip;
  ip.seed = p.base_seed + static_cast<std::uint64_t>(index);
  ip.n_stops = 5 + index % 5;
  ip.n_routes = 2 + index % 4;
  ip.trips_per_route = 2 + index % 2;
  ip.n_tickets = 2 + index % 5;
  ip.n_events = 1 + index % 3;
  ip.edge_density = 0.4 + 0.1 * (index % 3);
  ip.weight_guard_frac = 0.45 + 0.15 * (index % 3);
  ip.constant_mode =
      p.constant_every > 0 && index % p.constant_every == 0;
  ip.finite_only = true;
  ip.n_queries = 3;
  return ip;
}

void visit_corpus(corpus_params const& p,
                  std::function<void(corpus_instance const&)> const& visit) {
  auto const tmp = std::filesystem::temp_directory_path();
#ifdef _OPENMP
  int const threads = p.threads > 0 ? p.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int i = 0; i < p.seeds; ++i) {
    auto const ip = corpus_instance_params(p, i);
    auto const inst = gen_random_instance(ip);
    auto const dir =
        tmp / fmt::format("cfr_corpus_{}_{}_{}", getpid(), p.base_seed, i);
    corpus_instance ci;
    ci.index = i;
    ci.params = ip;
    ci.data = materialize_instance(inst, dir);
    std::filesystem::remove_all(dir);
    overtaking_mode mode;
    mode.exhaustive = true;
    ci.partition = compute_partition(ci.data.fares.graph, ci.data.fares.spec,
                                     ci.data.fares.events, mode,
                                     ci.data.fares.assertions);
    for (auto const& q : inst.queries) {
      ci.query_stops.emplace_back(ci.data.ftt.tt.require_stop(q.from),
                                  ci.data.ftt.tt.require_stop(q.to));
      ci.query_deps.push_back(q.dep);
    }
    visit(ci);
  }
}

std::vector<journey_triple> triples_of(std::vector<journey> const& js) {
  std::vector<journey_triple> out;
  out.reserve(js.size());
  for (auto const& j : js) {
    out.push_back({j.arrival, j.trips, j.price});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<journey_triple> triples_of(std::vector<enum_journey> const& js) {
  std::vector<journey_triple> out;
  out.reserve(js.size());
  for (auto const& j : js) {
    out.push_back({j.arrival, j.trips, j.price});
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string render_triples(std::vector<journey_triple> const& ts) {
  std::string s = "{";
  for (auto const& t : ts) {
    s += fmt::format("({},{},{}) ", t.arrival, t.trips, t.price);
  }
  return s + "}";
}

}  // namespace

corpus_outcome run_oracle_corpus(corpus_params const& p) {
  corpus_outcome out;
  std::mutex mu;
  visit_corpus(p, [&](corpus_instance const& ci) {
    enumerate_options eopt;
    eopt.max_trips = p.max_trips;
    eopt.node_budget = 5'000'000;

    int local_queries = 0, local_mismatch = 0, local_dfa_q = 0,
        local_dfa_bad = 0;
    std::vector<std::string> local_failures;
    for (std::size_t qi = 0; qi < ci.query_stops.size(); ++qi) {
      auto const [from, to] = ci.query_stops[qi];
      auto const dep = ci.query_deps[qi];
      ++local_queries;

      query q;
      q.from = from;
      q.to = to;
      q.dep = dep;
      q.max_rounds = p.max_trips;
      auto const res = run_query(ci.data.ftt, ci.data.fares, ci.partition, q);
      auto const got = triples_of(price_filter(res.journeys));
      auto const oracle = enumerate_pareto(ci.data.ftt, ci.data.fares, from,
                                           to, dep, eopt);
      auto const want = triples_of(oracle);
      if (got != want) {
        ++local_mismatch;
        if (local_failures.size() < 5) {
          local_failures.push_back(fmt::format(
              "instance {} query {}->{} dep {}: router {} oracle {}",
              ci.index, ci.data.ftt.tt.stops[from].id,
              ci.data.ftt.tt.stops[to].id, dep, render_triples(got),
              render_triples(want)));
        }
      }
      if (ci.params.constant_mode) {
        ++local_dfa_q;
        auto const dfa_res =
            dfa_product_dijkstra(ci.data.ftt, ci.data.fares, from, to, dep,
                                 p.max_trips);
        std::vector<pareto_point> pts;
        for (auto const& j : oracle) {
          pts.push_back({j.arrival, j.price});
        }
        if (dfa_res.pareto != pareto_2d(std::move(pts))) {
          ++local_dfa_bad;
          if (local_failures.size() < 5) {
            local_failures.push_back(
                fmt::format("instance {} query {}->{}: product-graph oracle "
                            "disagrees with the enumerator",
                            ci.index, ci.data.ftt.tt.stops[from].id,
                            ci.data.ftt.tt.stops[to].id));
          }
        }
      }
    }
    bool const has_cn =
        !ci.partition.members(comp_class::none).empty();

    std::scoped_lock lock{mu};
    ++out.instances;
    out.queries += local_queries;
    out.oracle_mismatches += local_mismatch;
    out.dfa_queries += local_dfa_q;
    out.dfa_mismatches += local_dfa_bad;
    out.cn_nonempty += has_cn ? 1 : 0;
    for (auto& f : local_failures) {
      if (out.failures.size() < 20) {
        out.failures.push_back(std::move(f));
      }
    }
  });
  return out;
}

}  // namespace cfr
