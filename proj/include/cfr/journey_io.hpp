#pragma once

#include <string>
#include <vector>

#include "cfr/router.hpp"
#include "cfr/timetable.hpp"

namespace cfr {

enum class output_format : std::uint8_t { text, csv, structured };

std::string format_time(time_t_s t);
time_t_s parse_time_arg(std::string const& s);  // seconds or HH:MM[:SS]

std::string format_journeys(fare_timetable const& ftt, cfn const& fares,
                            std::vector<journey> const& js,
                            output_format fmt_);

// One benchmark table row; mirrors the usual evaluation columns
// (#Scan, Time, #Rounds, #Jn, #PJn as mean/sd pairs).
struct bench_row {
  std::string name;
  double scan_avg{0}, scan_sd{0};
  double time_avg_ms{0}, time_sd_ms{0};
  double rounds_avg{0}, rounds_sd{0};
  double jn_avg{0}, jn_sd{0};
  double pjn_avg{0}, pjn_sd{0};
  std::size_t queries{0};
};

struct mean_sd {
  double mean{0}, sd{0};
};
mean_sd compute_mean_sd(std::vector<double> const& xs);

std::string format_bench_table(std::vector<bench_row> const& rows,
                               output_format fmt_);

}  // namespace cfr
