#include "cfr/monoid.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "cfr/errors.hpp"

namespace cfr {

std::string_view to_string(component_kind k) {
  switch (k) {
    case component_kind::counter: return "counter";
    case component_kind::saturating_counter: return "saturating";
    case component_kind::finite_set: return "set";
    case component_kind::indicator: return "indicator";
  }
  return "?";
}

std::uint64_t component_spec::domain_size() const {
  switch (kind) {
    case component_kind::counter:
      throw capability_error{
          fmt::format("component {} is an unbounded counter", name)};
    case component_kind::saturating_counter: return cap + 1;
    case component_kind::finite_set:
      verify(universe.size() < 64, "set universe too large to enumerate");
      return 1ull << universe.size();
    case component_kind::indicator: return 2;
  }
  return 0;
}

monoid_spec monoid_spec::make(std::vector<component_spec> comps) {
  verify(comps.size() <= 64, "at most 64 monoid components supported");
  monoid_spec s;
  s.components = std::move(comps);
  std::uint32_t off = 0;
  for (auto const& c : s.components) {
    verify(!c.name.empty(), "component name must not be empty");
    if (c.kind == component_kind::finite_set) {
      verify(!c.universe.empty(), "set component {} has empty universe",
             c.name);
      auto u = c.universe;
      std::sort(u.begin(), u.end());
      verify(std::adjacent_find(u.begin(), u.end()) == u.end(),
             "set component {} has duplicate atoms", c.name);
    }
    s.offsets.push_back(off);
    off += c.words();
  }
  s.total_words = off;
  for (std::size_t i = 0; i < s.components.size(); ++i) {
    for (std::size_t j = i + 1; j < s.components.size(); ++j) {
      verify(s.components[i].name != s.components[j].name,
             "duplicate component name {}", s.components[i].name);
    }
  }
  return s;
}

std::optional<std::uint32_t> monoid_spec::find(std::string_view name) const {
  for (std::uint32_t i = 0; i < components.size(); ++i) {
    if (components[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

std::uint32_t monoid_spec::require(std::string_view name) const {
  auto const i = find(name);
  verify(i.has_value(), "unknown monoid component {}", name);
  return *i;
}

std::optional<std::uint32_t> monoid_spec::atom_index(
    std::uint32_t comp, std::string_view atom) const {
  auto const& u = components.at(comp).universe;
  for (std::uint32_t i = 0; i < u.size(); ++i) {
    if (u[i] == atom) {
      return i;
    }
  }
  return std::nullopt;
}

bool monoid_spec::finite() const {
  return std::all_of(components.begin(), components.end(),
                     [](auto const& c) { return c.finite(); });
}

std::uint64_t monoid_spec::domain_size() const {
  std::uint64_t n = 1;
  for (auto const& c : components) {
    auto const d = c.domain_size();
    verify(n <= std::numeric_limits<std::uint64_t>::max() / d,
           "weight domain size overflow");
    n *= d;
  }
  return n;
}

namespace {

void check_conforms(monoid_spec const& spec, monoid_value const& v) {
  verify(v.words.size() == spec.total_words,
         "monoid value does not conform to spec ({} words, expected {})",
         v.words.size(), spec.total_words);
}

}  // namespace

monoid_value monoid_zero(monoid_spec const& spec) {
  return monoid_value{std::vector<std::uint64_t>(spec.total_words, 0)};
}

monoid_value monoid_add(monoid_spec const& spec, monoid_value const& a,
                        monoid_value const& b) {
  check_conforms(spec, a);
  check_conforms(spec, b);
  monoid_value r = a;
  for (std::uint32_t c = 0; c < spec.components.size(); ++c) {
    auto const off = spec.offsets[c];
    switch (spec.components[c].kind) {
      case component_kind::counter:
        r.words[off] = a.words[off] + b.words[off];
        break;
      case component_kind::saturating_counter:
        r.words[off] =
            std::min(spec.components[c].cap, a.words[off] + b.words[off]);
        break;
      case component_kind::finite_set:
        for (std::uint32_t w = 0; w < spec.components[c].words(); ++w) {
          r.words[off + w] = a.words[off + w] | b.words[off + w];
        }
        break;
      case component_kind::indicator:
        r.words[off] = a.words[off] | b.words[off];
        break;
    }
  }
  return r;
}

bool monoid_leq_masked(monoid_spec const& spec, monoid_value const& a,
                       monoid_value const& b, std::uint64_t ignore) {
  check_conforms(spec, a);
  check_conforms(spec, b);
  for (std::uint32_t c = 0; c < spec.components.size(); ++c) {
    if (ignore >> c & 1) {
      continue;
    }
    auto const off = spec.offsets[c];
    if (spec.components[c].kind == component_kind::finite_set) {
      for (std::uint32_t w = 0; w < spec.components[c].words(); ++w) {
        if ((a.words[off + w] & ~b.words[off + w]) != 0) {
          return false;  // not a subset
        }
      }
    } else if (a.words[off] > b.words[off]) {
      return false;
    }
  }
  return true;
}

bool monoid_leq(monoid_spec const& spec, monoid_value const& a,
                monoid_value const& b) {
  return monoid_leq_masked(spec, a, b, 0);
}

bool monoid_eq_masked(monoid_spec const& spec, monoid_value const& a,
                      monoid_value const& b, std::uint64_t ignore) {
  check_conforms(spec, a);
  check_conforms(spec, b);
  for (std::uint32_t c = 0; c < spec.components.size(); ++c) {
    if (ignore >> c & 1) {
      continue;
    }
    auto const off = spec.offsets[c];
    for (std::uint32_t w = 0; w < spec.components[c].words(); ++w) {
      if (a.words[off + w] != b.words[off + w]) {
        return false;
      }
    }
  }
  return true;
}

std::uint64_t get_scalar(monoid_spec const& spec, monoid_value const& v,
                         std::uint32_t comp) {
  verify(spec.components.at(comp).kind != component_kind::finite_set,
         "component {} is not scalar", spec.components[comp].name);
  return v.words[spec.offsets[comp]];
}

void set_scalar(monoid_spec const& spec, monoid_value& v, std::uint32_t comp,
                std::uint64_t x) {
  auto const& c = spec.components.at(comp);
  verify(c.kind != component_kind::finite_set, "component {} is not scalar",
         c.name);
  if (c.kind == component_kind::saturating_counter) {
    verify(x <= c.cap, "value {} exceeds cap {} of {}", x, c.cap, c.name);
  }
  if (c.kind == component_kind::indicator) {
    verify(x <= 1, "indicator {} must be 0 or 1", c.name);
  }
  v.words[spec.offsets[comp]] = x;
}

std::uint64_t set_cardinality(monoid_spec const& spec, monoid_value const& v,
                              std::uint32_t comp) {
  auto const& c = spec.components.at(comp);
  verify(c.kind == component_kind::finite_set, "component {} is not a set",
         c.name);
  std::uint64_t n = 0;
  for (std::uint32_t w = 0; w < c.words(); ++w) {
    n += static_cast<std::uint64_t>(
        __builtin_popcountll(v.words[spec.offsets[comp] + w]));
  }
  return n;
}

void set_insert_atom(monoid_spec const& spec, monoid_value& v,
                     std::uint32_t comp, std::uint32_t atom) {
  auto const& c = spec.components.at(comp);
  verify(c.kind == component_kind::finite_set && atom < c.universe.size(),
         "bad atom index {} for component {}", atom, c.name);
  v.words[spec.offsets[comp] + atom / 64] |= 1ull << (atom % 64);
}

bool set_contains_atom(monoid_spec const& spec, monoid_value const& v,
                       std::uint32_t comp, std::uint32_t atom) {
  return (v.words[spec.offsets[comp] + atom / 64] >> (atom % 64)) & 1;
}

std::vector<monoid_value> enumerate_values(monoid_spec const& spec) {
  if (!spec.finite()) {
    throw capability_error{"cannot enumerate an infinite weight domain"};
  }
  auto const n = spec.domain_size();
  std::vector<monoid_value> out;
  out.reserve(n);
  monoid_value cur = monoid_zero(spec);
  // Odometer over the per-component domains.
  std::vector<std::uint64_t> digit(spec.components.size(), 0);
  for (std::uint64_t i = 0;; ++i) {
    out.push_back(cur);
    std::size_t c = 0;
    for (; c < spec.components.size(); ++c) {
      if (++digit[c] < spec.components[c].domain_size()) {
        break;
      }
      digit[c] = 0;
    }
    if (c == spec.components.size()) {
      break;
    }
    for (std::size_t k = 0; k <= c; ++k) {
      auto const off = spec.offsets[k];
      if (spec.components[k].kind == component_kind::finite_set) {
        // digit is the subset bitmask directly
        cur.words[off] = digit[k];
      } else {
        cur.words[off] = digit[k];
      }
    }
  }
  verify(out.size() == n, "enumeration produced {} of {} values", out.size(),
         n);
  return out;
}

std::string to_string(monoid_spec const& spec, monoid_value const& v) {
  std::string s = "(";
  for (std::uint32_t c = 0; c < spec.components.size(); ++c) {
    if (c > 0) {
      s += ", ";
    }
    if (spec.components[c].kind == component_kind::finite_set) {
      s += "{";
      bool first = true;
      for (std::uint32_t a = 0; a < spec.components[c].universe.size(); ++a) {
        if (set_contains_atom(spec, v, c, a)) {
          if (!first) {
            s += ",";
          }
          s += spec.components[c].universe[a];
          first = false;
        }
      }
      s += "}";
    } else {
      s += fmt::format("{}", v.words[spec.offsets[c]]);
    }
  }
  return s + ")";
}

}  // namespace cfr
