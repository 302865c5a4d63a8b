#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cfr/monoid.hpp"

namespace cfr {

// Fare events attached to arcs/boardings. Index 0 is always the no-op
// symbol s0.
struct event_table {
  std::vector<std::string> names{"s0"};

  std::uint32_t add(std::string name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  std::uint32_t require(std::string_view name) const;
  std::size_t size() const { return names.size(); }
  bool operator==(event_table const&) const = default;
};

enum class cmp_op : std::uint8_t { lt, le, eq, ge, gt, ne };

std::string_view to_string(cmp_op op);

// Boolean expression over atomic predicates:
//   - scalar component compared with a constant (counters, indicators),
//   - |set component| compared with a constant,
//   - event equality / inequality,
// combined with and / or / not. Written in prefix notation, e.g.
//   (and (>= zones 2) (or (> dist 4000) (= event tra)))
struct guard {
  enum class node_kind : std::uint8_t {
    op_and,
    op_or,
    op_not,
    comp_cmp,   // component `op` constant (cardinality for sets)
    event_cmp,  // event = / != symbol
    lit_true,
    lit_false
  };
  struct node {
    node_kind kind{node_kind::lit_true};
    cmp_op op{cmp_op::eq};
    std::uint32_t comp{0};   // comp_cmp
    std::uint64_t rhs{0};    // comp_cmp constant
    std::uint32_t event{0};  // event_cmp symbol
    std::vector<std::uint32_t> children;
    bool operator==(node const&) const = default;
  };
  std::vector<node> nodes;  // root is nodes.back()

  bool operator==(guard const&) const = default;
};

bool eval_guard(guard const& g, monoid_spec const& spec,
                monoid_value const& h, std::uint32_t event);

// Bitmask of monoid components referenced anywhere in the guard.
std::uint64_t referenced_components(guard const& g);
inline bool references_weight(guard const& g) {
  return referenced_components(g) != 0;
}

guard parse_guard(std::string_view text, monoid_spec const& spec,
                  event_table const& events);
std::string to_string(guard const& g, monoid_spec const& spec,
                      event_table const& events);

}  // namespace cfr
