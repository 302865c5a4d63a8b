#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "cfr/fare_document.hpp"
#include "cfr/ticket_graph.hpp"
#include "cfr/timetable.hpp"

namespace cfr::test {

inline std::filesystem::path data_dir() { return CFR_DATA_DIR; }

inline std::string slurp(std::filesystem::path const& p) {
  std::ifstream in{p};
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
struct scratch_dir {
  std::filesystem::path path;

  explicit scratch_dir(std::string const& tag) {
    path = std::filesystem::temp_directory_path() /
           ("cfr_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~scratch_dir() { std::filesystem::remove_all(path); }

  void write(std::string const& name, std::string const& contents) const {
    std::ofstream out{path / name};
    out << contents;
  }
};

inline fare_state make_state(cfn const& c, std::string_view ticket,
                             std::vector<std::uint64_t> scalars = {}) {
  fare_state f;
  f.ticket = c.graph.require(ticket);
  f.weight = monoid_zero(c.spec);
  for (std::uint32_t i = 0; i < scalars.size(); ++i) {
    set_scalar(c.spec, f.weight, i, scalars[i]);
  }
  return f;
}

// The figure-4 fare documents with the weight component swapped for a
// finite saturating counter, for exhaustive checks.
inline cfn finite_variant(std::filesystem::path const& doc,
                          std::uint64_t cap) {
  auto text = slurp(doc);
  auto const pos = text.find("component w counter unit=units");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string{"component w counter unit=units"}.size(),
               "component w saturating cap=" + std::to_string(cap));
  return parse_cfn(text);
}

}  // namespace cfr::test
