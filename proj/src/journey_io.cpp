#include "cfr/journey_io.hpp"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cfr/errors.hpp"

namespace cfr {

std::string format_time(time_t_s t) {
  if (t >= kNever) {
    return "inf";
  }
  if (t <= kNeverDepart) {
    return "-inf";
  }
  auto const day = t / 86400;
  auto const s = t % 86400;
  auto const base = fmt::format("{:02}:{:02}:{:02}", s / 3600, s % 3600 / 60,
                                s % 60);
  return day > 0 ? fmt::format("{}+{}d", base, day) : base;
}

time_t_s parse_time_arg(std::string const& s) {
  if (s.find(':') == std::string::npos) {
    return std::stoll(s);
  }
  int h = 0, m = 0, sec = 0;
  auto const n = std::sscanf(s.c_str(), "%d:%d:%d", &h, &m, &sec);
  verify_input(n >= 2, "cannot parse time '{}'", s);
  return h * 3600 + m * 60 + sec;
}

namespace {

nlohmann::json journey_json(fare_timetable const& ftt, cfn const& fares,
                            journey const& j) {
  nlohmann::json legs = nlohmann::json::array();
  for (std::size_t i = 0; i < j.legs.size(); ++i) {
    auto const& leg = j.legs[i];
    nlohmann::json l;
    l["kind"] = leg.k == journey_leg::kind::ride ? "ride" : "walk";
    l["from"] = ftt.tt.stops[leg.from].id;
    l["to"] = ftt.tt.stops[leg.to].id;
    l["dep"] = leg.dep;
    l["arr"] = leg.arr;
    if (leg.k == journey_leg::kind::ride) {
      l["trip"] = ftt.tt.trips[leg.trip].id;
    }
    if (i < j.trace.size()) {
      l["state"] = fmt::format(
          "({}, {})", fares.graph.tickets[j.trace[i].ticket].id,
          to_string(fares.spec, j.trace[i].weight));
    }
    legs.push_back(std::move(l));
  }
  nlohmann::json out;
  out["legs"] = std::move(legs);
  out["arrival"] = j.arrival;
  out["trips"] = j.trips;
  out["ticket"] = fares.graph.tickets[j.final_state.ticket].id;
  out["price"] = format_price(j.price);
  return out;
}

}  // namespace

std::string format_journeys(fare_timetable const& ftt, cfn const& fares,
                            std::vector<journey> const& js,
                            output_format fmt_) {
  switch (fmt_) {
    case output_format::structured: {
      nlohmann::json out = nlohmann::json::array();
      for (auto const& j : js) {
        out.push_back(journey_json(ftt, fares, j));
      }
      return out.dump(2) + "\n";
    }
    case output_format::csv: {
      std::string out = "arrival,trips,ticket,price,legs\n";
      for (auto const& j : js) {
        out += fmt::format("{},{},{},{},{}\n", j.arrival, j.trips,
                           fares.graph.tickets[j.final_state.ticket].id,
                           format_price(j.price), j.legs.size());
      }
      return out;
    }
    case output_format::text: {
      std::string out;
      if (js.empty()) {
        return "no journeys\n";
      }
      for (std::size_t n = 0; n < js.size(); ++n) {
        auto const& j = js[n];
        out += fmt::format("journey {}: arrive {}  trips {}  ticket {}  "
                           "price {}\n",
                           n + 1, format_time(j.arrival), j.trips,
                           fares.graph.tickets[j.final_state.ticket].id,
                           format_price(j.price));
        for (std::size_t i = 0; i < j.legs.size(); ++i) {
          auto const& leg = j.legs[i];
          auto const state =
              i < j.trace.size()
                  ? fmt::format("  [{} {}]",
                                fares.graph.tickets[j.trace[i].ticket].id,
                                to_string(fares.spec, j.trace[i].weight))
                  : std::string{};
          if (leg.k == journey_leg::kind::ride) {
            out += fmt::format("  {} {} -> {} {}  trip {}{}\n",
                               format_time(leg.dep), ftt.tt.stops[leg.from].id,
                               ftt.tt.stops[leg.to].id, format_time(leg.arr),
                               ftt.tt.trips[leg.trip].id, state);
          } else {
            out += fmt::format("  {} {} -> {} {}  walk{}\n",
                               format_time(leg.dep), ftt.tt.stops[leg.from].id,
                               ftt.tt.stops[leg.to].id, format_time(leg.arr),
                               state);
          }
        }
      }
      return out;
    }
  }
  throw internal_error{"unknown output format"};
}

mean_sd compute_mean_sd(std::vector<double> const& xs) {
  mean_sd r;
  if (xs.empty()) {
    return r;
  }
  for (auto const x : xs) {
    r.mean += x;
  }
  r.mean /= static_cast<double>(xs.size());
  for (auto const x : xs) {
    r.sd += (x - r.mean) * (x - r.mean);
  }
  r.sd = std::sqrt(r.sd / static_cast<double>(xs.size()));
  return r;
}

std::string format_bench_table(std::vector<bench_row> const& rows,
                               output_format fmt_) {
  if (fmt_ == output_format::csv) {
    std::string out =
        "algorithm,queries,scan_avg,scan_sd,time_avg_ms,time_sd_ms,"
        "rounds_avg,rounds_sd,jn_avg,jn_sd,pjn_avg,pjn_sd\n";
    for (auto const& r : rows) {
      out += fmt::format("{},{},{:.2f},{:.2f},{:.3f},{:.3f},{:.2f},{:.2f},"
                         "{:.2f},{:.2f},{:.2f},{:.2f}\n",
                         r.name, r.queries, r.scan_avg, r.scan_sd,
                         r.time_avg_ms, r.time_sd_ms, r.rounds_avg,
                         r.rounds_sd, r.jn_avg, r.jn_sd, r.pjn_avg, r.pjn_sd);
    }
    return out;
  }
  std::string out = fmt::format(
      "{:<28} {:>8} {:>9} {:>8} {:>9} {:>8} {:>7} {:>6} {:>6} {:>6} {:>6} "
      "{:>6}\n",
      "algorithm", "queries", "scan", "sd", "time[ms]", "sd", "rounds", "sd",
      "jn", "sd", "pjn", "sd");
  for (auto const& r : rows) {
    out += fmt::format(
        "{:<28} {:>8} {:>9.1f} {:>8.1f} {:>9.3f} {:>8.3f} {:>7.2f} {:>6.2f} "
        "{:>6.2f} {:>6.2f} {:>6.2f} {:>6.2f}\n",
        r.name, r.queries, r.scan_avg, r.scan_sd, r.time_avg_ms, r.time_sd_ms,
        r.rounds_avg, r.rounds_sd, r.jn_avg, r.jn_sd, r.pjn_avg, r.pjn_sd);
  }
  return out;
}

}  // namespace cfr
