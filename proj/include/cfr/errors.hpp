#pragma once

#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace cfr {

// Input data is malformed (bad document, bad CSV, dangling reference).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two values from different specs were combined, or an id lookup failed.
struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The request is valid but outside what this build can compute
// (e.g. exhaustive checks over an infinite weight domain).
struct capability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A broken internal invariant; always a bug.
struct internal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename... Args>
void verify(bool condition, fmt::format_string<Args...> msg, Args&&... args) {
  if (!condition) {
    throw structural_error{fmt::format(msg, std::forward<Args>(args)...)};
  }
}

template <typename... Args>
void verify_input(bool condition, fmt::format_string<Args...> msg,
                  Args&&... args) {
  if (!condition) {
    throw parse_error{fmt::format(msg, std::forward<Args>(args)...)};
  }
}

}  // namespace cfr
