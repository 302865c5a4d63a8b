#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cfr/corpus.hpp"
#include "cfr/errors.hpp"
#include "cfr/instance_gen.hpp"
#include "cfr/journey_io.hpp"
#include "cfr/oracles.hpp"
#include "cfr/rng.hpp"
#include "cfr/router.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;

struct partition_flags {
  std::string mode{"auto"};
  std::uint64_t trials{100000};
  std::uint64_t seed{1};
};

cfr::overtaking_mode make_mode(partition_flags const& f,
                               cfr::monoid_spec const& spec) {
  cfr::overtaking_mode m;
  if (f.mode == "exhaustive") {
    m.exhaustive = true;
  } else if (f.mode == "sampled") {
    m.exhaustive = false;
  } else {
    m.exhaustive = spec.finite();
  }
  m.trials = f.trials;
  m.seed = f.seed;
  return m;
}

void print_partition(cfr::cfn const& fares,
                     cfr::comparability_partition const& part) {
  auto const line = [&](cfr::comp_class c, std::string_view name) {
    auto const members = part.members(c);
    std::string ids;
    for (auto const t : members) {
      ids += fares.graph.tickets[t].id;
      ids += ' ';
    }
    fmt::print("{}: {} ticket(s) {}\n", name, members.size(),
               ids.empty() ? "-" : ids);
  };
  if (part.members(cfr::comp_class::full).size() == fares.graph.size()) {
    fmt::print("C_F = all {} tickets\n", fares.graph.size());
  } else {
    line(cfr::comp_class::full, "C_F");
  }
  line(cfr::comp_class::partial, "C_P");
  line(cfr::comp_class::none, "C_N");
  for (std::uint32_t t = 0; t < fares.graph.size(); ++t) {
    fmt::print("  {:<10} {:<8} {}{}\n", fares.graph.tickets[t].id,
               to_string(part.cls[t]), to_string(part.provenance[t]),
               part.provenance[t] == cfr::partition_provenance::proved_sampled
                   ? fmt::format(" ({} trials)", part.trials[t])
                   : "");
  }
}

cfr::output_format parse_format(std::string const& s) {
  if (s == "csv") {
    return cfr::output_format::csv;
  }
  if (s == "structured") {
    return cfr::output_format::structured;
  }
  return cfr::output_format::text;
}

struct bench_variant {
  std::string name;
  cfr::router_variant variant;
  bool ptp, fss;
  cfr::time_t_s sigma_arr;
  int sigma_tr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional-fare transit routing engine"};
  app.require_subcommand(1);

  std::string dataset_dir;
  partition_flags pf;

  auto* validate = app.add_subcommand(
      "validate", "validate a dataset and print its comparability partition");
  validate->add_option("dataset", dataset_dir)->required();
  validate->add_option("--check", pf.mode, "auto|exhaustive|sampled");
  validate->add_option("--trials", pf.trials);
  validate->add_option("--seed", pf.seed);

  auto* partition = app.add_subcommand(
      "partition", "print the comparability partition with provenance");
  partition->add_option("dataset", dataset_dir)->required();
  partition->add_option("--check", pf.mode, "auto|exhaustive|sampled");
  partition->add_option("--trials", pf.trials);
  partition->add_option("--seed", pf.seed);

  std::string q_from, q_to, q_dep{"08:00"}, q_variant{"mcraptor"},
      q_format{"text"};
  std::string q_sigma_arr{"900"};
  int q_sigma_tr = 1;
  int q_rounds = 0;
  bool q_ptp = false, q_fss = false, q_state_optimal = false;
  auto* query_cmd = app.add_subcommand("query", "answer one routing query");
  query_cmd->add_option("dataset", dataset_dir)->required();
  query_cmd->add_option("--from", q_from)->required();
  query_cmd->add_option("--to", q_to)->required();
  query_cmd->add_option("--dep", q_dep, "departure time (seconds or HH:MM)");
  query_cmd->add_option("--variant", q_variant,
                        "mcraptor|target_bmrap|tight_bmrap");
  query_cmd->add_option("--sigma-arr", q_sigma_arr,
                        "arrival slack in seconds, or 'inf'");
  query_cmd->add_option("--sigma-tr", q_sigma_tr, "trip slack");
  query_cmd->add_option("--max-rounds", q_rounds, "0 = run to quiescence");
  query_cmd->add_flag("--ptp", q_ptp, "price-based target pruning");
  query_cmd->add_flag("--fss", q_fss, "fare-specific speed-up");
  query_cmd->add_flag("--state-optimal", q_state_optimal,
                      "print the full state-optimal set, not the "
                      "price-Pareto set");
  query_cmd->add_option("--format", q_format, "text|csv|structured");
  query_cmd->add_option("--check", pf.mode, "auto|exhaustive|sampled");
  query_cmd->add_option("--trials", pf.trials);
  query_cmd->add_option("--seed", pf.seed);

  int b_pairs = 100;
  std::uint64_t b_seed = 1;
  std::string b_dep{"08:00"}, b_format{"text"};
  int b_rounds = 0, b_threads = 0;
  cfr::time_t_s b_sigma_arr = 900;
  int b_sigma_tr = 1;
  auto* bench = app.add_subcommand(
      "bench", "run the algorithm matrix over random OD pairs");
  bench->add_option("dataset", dataset_dir)->required();
  bench->add_option("--od-pairs", b_pairs);
  bench->add_option("--seed", b_seed);
  bench->add_option("--dep", b_dep);
  bench->add_option("--max-rounds", b_rounds);
  bench->add_option("--threads", b_threads);
  bench->add_option("--sigma-arr", b_sigma_arr);
  bench->add_option("--sigma-tr", b_sigma_tr);
  bench->add_option("--format", b_format);
  bench->add_option("--check", pf.mode, "auto|exhaustive|sampled");
  bench->add_option("--trials", pf.trials);
  bool b_per_query = false;
  bench->add_flag("--per-query", b_per_query,
                  "emit one record per query before the aggregate table");

  int c_seeds = 200;
  std::uint64_t c_base = 1;
  int c_const_every = 5, c_max_trips = 4, c_threads = 0;
  auto* corpus = app.add_subcommand(
      "oracle-corpus",
      "compare the router against the oracles on random instances");
  corpus->add_option("--seeds", c_seeds);
  corpus->add_option("--base-seed", c_base);
  corpus->add_option("--constant-every", c_const_every);
  corpus->add_option("--max-trips", c_max_trips);
  corpus->add_option("--threads", c_threads);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed() || partition->parsed()) {
      cfr::dataset data;
      try {
        data = cfr::load_dataset(dataset_dir);
      } catch (cfr::parse_error const& e) {
        fmt::print("ERROR {}\n", e.what());
        return kExitInvalid;
      }
      if (validate->parsed()) {
        fmt::print("{}", data.report.to_string());
        fmt::print("fare document: {} tickets, {} edges, {} events, {} "
                   "monoid components\n",
                   data.fares.graph.size(), data.fares.graph.edges.size(),
                   data.fares.events.size(),
                   data.fares.spec.components.size());
        fmt::print("timetable: {} stops, {} routes, {} trips, {} footpaths\n",
                   data.ftt.tt.stops.size(), data.ftt.tt.routes.size(),
                   data.ftt.tt.trips.size(), data.ftt.tt.footpaths.size());
      }
      auto const part = compute_partition(
          data.fares.graph, data.fares.spec, data.fares.events,
          make_mode(pf, data.fares.spec), data.fares.assertions);
      print_partition(data.fares, part);
      return data.report.valid() ? kExitOk : kExitInvalid;
    }

    if (query_cmd->parsed()) {
      auto const data = cfr::load_dataset(dataset_dir);
      auto const from = data.ftt.tt.find_stop(q_from);
      auto const to = data.ftt.tt.find_stop(q_to);
      if (!from.has_value() || !to.has_value()) {
        fmt::print(stderr, "unknown stop id {}\n",
                   from.has_value() ? q_to : q_from);
        return kExitUsage;
      }
      cfr::query q;
      q.from = *from;
      q.to = *to;
      q.dep = cfr::parse_time_arg(q_dep);
      q.max_rounds = q_rounds;
      q.ptp = q_ptp;
      q.fss = q_fss;
      q.sigma_arr = q_sigma_arr == "inf" ? cfr::kNever
                                         : cfr::parse_time_arg(q_sigma_arr);
      q.sigma_tr = q_sigma_tr;
      if (q_variant == "mcraptor") {
        q.variant = cfr::router_variant::mc_raptor;
      } else if (q_variant == "target_bmrap") {
        q.variant = cfr::router_variant::target_bmrap;
      } else if (q_variant == "tight_bmrap") {
        q.variant = cfr::router_variant::tight_bmrap;
      } else {
        fmt::print(stderr, "unknown variant {}\n", q_variant);
        return kExitUsage;
      }
      auto const part = compute_partition(
          data.fares.graph, data.fares.spec, data.fares.events,
          make_mode(pf, data.fares.spec), data.fares.assertions);
      auto const res = run_query(data.ftt, data.fares, part, q);
      auto const js = q_state_optimal ? res.journeys
                                      : cfr::price_filter(res.journeys);
      fmt::print("{}", cfr::format_journeys(data.ftt, data.fares, js,
                                            parse_format(q_format)));
      return kExitOk;
    }

    if (bench->parsed()) {
      auto const data = cfr::load_dataset(dataset_dir);
      auto const part = compute_partition(
          data.fares.graph, data.fares.spec, data.fares.events,
          make_mode(pf, data.fares.spec), data.fares.assertions);
      auto const dep = cfr::parse_time_arg(b_dep);

      // OD pairs drawn uniformly; unconnected pairs are dropped and
      // reported.
      cfr::rng r{b_seed};
      auto const n = data.ftt.tt.stops.size();
      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
      int dropped = 0;
      while (pairs.size() < static_cast<std::size_t>(b_pairs) &&
             dropped < 50 * b_pairs) {
        auto const a = static_cast<std::uint32_t>(r.below(n));
        auto const b = static_cast<std::uint32_t>(r.below(n));
        if (a == b) {
          continue;
        }
        auto const probe =
            cfr::run_raptor(data.ftt.tt, a, b, dep, b_rounds);
        if (probe.anchors.empty()) {
          ++dropped;
          continue;
        }
        pairs.emplace_back(a, b);
      }
      fmt::print("# seed {}  dep {}  pairs {}  dropped {} unconnected\n",
                 b_seed, b_dep, pairs.size(), dropped);

      std::vector<bench_variant> variants = {
          {"RAPTOR", cfr::router_variant::mc_raptor, false, false, cfr::kNever,
           0},
          {"McRAP", cfr::router_variant::mc_raptor, false, false, cfr::kNever,
           0},
          {"McRAP ptp fss", cfr::router_variant::mc_raptor, true, true,
           cfr::kNever, 0},
          {fmt::format("Target-BMRAP a={} ptp fss", b_sigma_arr),
           cfr::router_variant::target_bmrap, true, true, b_sigma_arr, 0},
          {fmt::format("Tight-BMRAP a={} t={}", b_sigma_arr, b_sigma_tr),
           cfr::router_variant::tight_bmrap, false, false, b_sigma_arr,
           b_sigma_tr},
          {fmt::format("Tight-BMRAP a={} t={} ptp fss", b_sigma_arr,
                       b_sigma_tr),
           cfr::router_variant::tight_bmrap, true, true, b_sigma_arr,
           b_sigma_tr},
      };

      std::vector<cfr::bench_row> rows;
      for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        auto const& v = variants[vi];
        std::vector<double> scans(pairs.size()), times(pairs.size()),
            rounds(pairs.size()), jn(pairs.size()), pjn(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(b_threads > 0 ? b_threads : omp_get_max_threads())
#endif
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          auto const t0 = std::chrono::steady_clock::now();
          if (vi == 0) {  // plain earliest-arrival baseline
            auto const res = cfr::run_raptor(data.ftt.tt, pairs[i].first,
                                             pairs[i].second, dep, b_rounds);
            auto const t1 = std::chrono::steady_clock::now();
            scans[i] = static_cast<double>(res.scans);
            times[i] = std::chrono::duration<double, std::milli>(t1 - t0)
                           .count();
            rounds[i] = res.rounds;
            jn[i] = static_cast<double>(res.anchors.size());
            pjn[i] = 0;
            continue;
          }
          cfr::query q;
          q.from = pairs[i].first;
          q.to = pairs[i].second;
          q.dep = dep;
          q.max_rounds = b_rounds;
          q.variant = v.variant;
          q.ptp = v.ptp;
          q.fss = v.fss;
          q.sigma_arr = v.sigma_arr;
          q.sigma_tr = v.sigma_tr;
          auto const res = run_query(data.ftt, data.fares, part, q);
          auto const t1 = std::chrono::steady_clock::now();
          scans[i] = static_cast<double>(res.stats.routes_scanned);
          times[i] =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
          rounds[i] = res.stats.rounds;
          jn[i] = static_cast<double>(res.stats.journeys);
          pjn[i] = static_cast<double>(res.stats.price_optimal);
        }
        if (b_per_query) {
          for (std::size_t i = 0; i < pairs.size(); ++i) {
            fmt::print("query,{},{},{},{:.0f},{:.0f},{:.0f},{:.0f}\n",
                       v.name, data.ftt.tt.stops[pairs[i].first].id,
                       data.ftt.tt.stops[pairs[i].second].id, scans[i],
                       rounds[i], jn[i], pjn[i]);
          }
        }
        cfr::bench_row row;
        row.name = v.name;
        row.queries = pairs.size();
        auto const ms = cfr::compute_mean_sd(scans);
        row.scan_avg = ms.mean;
        row.scan_sd = ms.sd;
        auto const mt = cfr::compute_mean_sd(times);
        row.time_avg_ms = mt.mean;
        row.time_sd_ms = mt.sd;
        auto const mr = cfr::compute_mean_sd(rounds);
        row.rounds_avg = mr.mean;
        row.rounds_sd = mr.sd;
        auto const mj = cfr::compute_mean_sd(jn);
        row.jn_avg = mj.mean;
        row.jn_sd = mj.sd;
        auto const mp = cfr::compute_mean_sd(pjn);
        row.pjn_avg = mp.mean;
        row.pjn_sd = mp.sd;
        rows.push_back(row);
      }
      fmt::print("{}", cfr::format_bench_table(rows, parse_format(b_format)));
      return kExitOk;
    }

    if (corpus->parsed()) {
      cfr::corpus_params cp;
      cp.seeds = c_seeds;
      cp.base_seed = c_base;
      cp.constant_every = c_const_every;
      cp.max_trips = c_max_trips;
      cp.threads = c_threads;
      auto const out = cfr::run_oracle_corpus(cp);
      fmt::print("# base-seed {}  constant-every {}  max-trips {}\n",
                 cp.base_seed, cp.constant_every, cp.max_trips);
      fmt::print("instances {}  queries {}  mismatches {}\n", out.instances,
                 out.queries, out.oracle_mismatches);
      fmt::print("product-graph checks {}  mismatches {}\n", out.dfa_queries,
                 out.dfa_mismatches);
      fmt::print("instances with C_N tickets: {} ({:.1f}%)\n", out.cn_nonempty,
                 100.0 * out.cn_nonempty / std::max(1, out.instances));
      for (auto const& f : out.failures) {
        fmt::print("FAIL {}\n", f);
      }
      return out.oracle_mismatches == 0 && out.dfa_mismatches == 0
                 ? kExitOk
                 : kExitInvalid;
    }
  } catch (cfr::capability_error const& e) {
    fmt::print(stderr, "capability error: {}\n", e.what());
    return kExitCapability;
  } catch (cfr::parse_error const& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInvalid;
  } catch (std::exception const& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInvalid;
  }
  return kExitUsage;
}
