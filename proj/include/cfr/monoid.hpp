#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfr {

// The weight space is a product of ordered component monoids. Four closed
// kinds are supported; the partition analysis relies on knowing how each
// kind behaves under addition and comparison.
enum class component_kind : std::uint8_t {
  counter,             // (N, +, <=)
  saturating_counter,  // ({0..cap}, min(cap, a+b), <=)
  finite_set,          // (2^U, union, subset)
  indicator            // ({0,1}, or, <=)
};

std::string_view to_string(component_kind k);

struct component_spec {
  std::string name;
  component_kind kind{component_kind::counter};
  std::uint64_t cap{0};                // saturating_counter only
  std::vector<std::string> universe;   // finite_set only, duplicate-free
  std::string unit;                    // free-text annotation

  bool finite() const { return kind != component_kind::counter; }
  std::uint32_t words() const {
    return kind == component_kind::finite_set
               ? static_cast<std::uint32_t>((universe.size() + 63) / 64)
               : 1u;
  }
  // Number of distinct values of this component (finite kinds only).
  std::uint64_t domain_size() const;
  bool operator==(component_spec const&) const = default;
};

struct monoid_spec {
  std::vector<component_spec> components;
  std::vector<std::uint32_t> offsets;  // word offset per component
  std::uint32_t total_words{0};

  static monoid_spec make(std::vector<component_spec> comps);

  std::optional<std::uint32_t> find(std::string_view name) const;
  std::uint32_t require(std::string_view name) const;
  std::optional<std::uint32_t> atom_index(std::uint32_t comp,
                                          std::string_view atom) const;

  bool finite() const;
  // Product of all component domain sizes; capability_error if infinite.
  std::uint64_t domain_size() const;
  bool operator==(monoid_spec const& o) const {
    return components == o.components;
  }
};

// A point in the weight space, laid out per the owning spec: one word per
// scalar component, ceil(|U|/64) words per finite set. Plain value type,
// cheap to copy and hash.
struct monoid_value {
  std::vector<std::uint64_t> words;
  bool operator==(monoid_value const&) const = default;
};

monoid_value monoid_zero(monoid_spec const& spec);
monoid_value monoid_add(monoid_spec const& spec, monoid_value const& a,
                        monoid_value const& b);
// Componentwise partial order; both directions may be false.
bool monoid_leq(monoid_spec const& spec, monoid_value const& a,
                monoid_value const& b);

// Same, but skipping the components whose bit is set in `ignore`.
bool monoid_leq_masked(monoid_spec const& spec, monoid_value const& a,
                       monoid_value const& b, std::uint64_t ignore);
bool monoid_eq_masked(monoid_spec const& spec, monoid_value const& a,
                      monoid_value const& b, std::uint64_t ignore);

// Scalar component access (counter / saturating_counter / indicator).
std::uint64_t get_scalar(monoid_spec const& spec, monoid_value const& v,
                         std::uint32_t comp);
void set_scalar(monoid_spec const& spec, monoid_value& v, std::uint32_t comp,
                std::uint64_t x);

// Finite-set component access.
std::uint64_t set_cardinality(monoid_spec const& spec, monoid_value const& v,
                              std::uint32_t comp);
void set_insert_atom(monoid_spec const& spec, monoid_value& v,
                     std::uint32_t comp, std::uint32_t atom);
bool set_contains_atom(monoid_spec const& spec, monoid_value const& v,
                       std::uint32_t comp, std::uint32_t atom);

// All values of a finite weight domain, in a deterministic order.
// capability_error if any component is an unbounded counter.
std::vector<monoid_value> enumerate_values(monoid_spec const& spec);

std::string to_string(monoid_spec const& spec, monoid_value const& v);

struct monoid_value_hash {
  std::size_t operator()(monoid_value const& v) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto const w : v.words) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace cfr
