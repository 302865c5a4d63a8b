#include "cfr/ticket_graph.hpp"

#include <algorithm>
#include <queue>

#include <fmt/format.h>

#include "cfr/errors.hpp"
#include "cfr/rng.hpp"

namespace cfr {

std::string format_price(price_t p) {
  return fmt::format("{}.{:02}", p / 100, p % 100);
}

void ticket_graph::finalize() {
  verify(tickets.size() <= 4096, "ticket graph too large");
  std::stable_sort(edges.begin(), edges.end(), [](auto const& a, auto const& b) {
    return a.from != b.from ? a.from < b.from : a.priority < b.priority;
  });
  out.assign(tickets.size(), {0, 0});
  for (std::uint32_t i = 0; i < edges.size(); ++i) {
    verify(edges[i].from < tickets.size() && edges[i].to < tickets.size(),
           "ticket edge endpoint out of range");
    if (i == 0 || edges[i].from != edges[i - 1].from) {
      out[edges[i].from].first = i;
    }
    out[edges[i].from].second = i + 1;
  }

  reach_words = static_cast<std::uint32_t>((tickets.size() + 63) / 64);
  reach_bits.assign(tickets.size() * reach_words, 0);
  for (std::uint32_t t = 0; t < tickets.size(); ++t) {
    std::vector<bool> seen(tickets.size(), false);
    std::queue<std::uint32_t> q;
    q.push(t);
    seen[t] = true;
    while (!q.empty()) {
      auto const u = q.front();
      q.pop();
      reach_bits[t * reach_words + u / 64] |= 1ull << (u % 64);
      for (auto e = out[u].first; e < out[u].second; ++e) {
        if (!seen[edges[e].to]) {
          seen[edges[e].to] = true;
          q.push(edges[e].to);
        }
      }
    }
  }
}

std::optional<std::uint32_t> ticket_graph::find(std::string_view id) const {
  for (std::uint32_t i = 0; i < tickets.size(); ++i) {
    if (tickets[i].id == id) {
      return i;
    }
  }
  return std::nullopt;
}

std::uint32_t ticket_graph::require(std::string_view id) const {
  auto const i = find(id);
  verify(i.has_value(), "unknown ticket {}", id);
  return *i;
}

price_t ticket_graph::price(std::uint32_t t) const {
  verify(t < tickets.size(), "ticket index {} out of range", t);
  return tickets[t].price;
}

std::uint32_t transition(ticket_graph const& tg, monoid_spec const& spec,
                         std::uint32_t from, monoid_value const& h,
                         std::uint32_t event) {
  verify(from < tg.tickets.size(), "ticket index {} out of range", from);
  for (auto e = tg.out[from].first; e < tg.out[from].second; ++e) {
    if (eval_guard(tg.edges[e].g, spec, h, event)) {
      return tg.edges[e].to;
    }
  }
  return from;
}

fare_state fare_update(ticket_graph const& tg, monoid_spec const& spec,
                       fare_state const& f, monoid_value const& w,
                       std::uint32_t event) {
  fare_state g;
  g.weight = monoid_add(spec, f.weight, w);
  g.ticket = transition(tg, spec, f.ticket, g.weight, event);
  return g;
}

std::vector<std::uint32_t> compute_reach(ticket_graph const& tg,
                                         std::uint32_t t) {
  std::vector<std::uint32_t> r;
  for (std::uint32_t u = 0; u < tg.tickets.size(); ++u) {
    if (tg.reaches(t, u)) {
      r.push_back(u);
    }
  }
  return r;
}

bool check_traceable(ticket_graph const& tg,
                     std::vector<std::uint32_t> const& tickets) {
  std::vector<bool> in_set(tg.tickets.size(), false);
  for (auto const t : tickets) {
    in_set[t] = true;
  }
  std::vector<std::uint32_t> indeg(tg.tickets.size(), 0);
  for (auto const& e : tg.edges) {
    if (in_set[e.from] && in_set[e.to] && e.from != e.to) {
      ++indeg[e.to];
    }
  }
  // Peel: the topological order must be forced at every step.
  std::vector<std::uint32_t> zero;
  for (auto const t : tickets) {
    if (indeg[t] == 0) {
      zero.push_back(t);
    }
  }
  std::size_t peeled = 0;
  while (zero.size() == 1) {
    auto const u = zero.back();
    zero.pop_back();
    in_set[u] = false;
    ++peeled;
    for (auto e = tg.out[u].first; e < tg.out[u].second; ++e) {
      auto const v = tg.edges[e].to;
      if (in_set[v] && v != u && --indeg[v] == 0) {
        zero.push_back(v);
      }
    }
  }
  return peeled == tickets.size();
}

std::string_view to_string(comp_class c) {
  switch (c) {
    case comp_class::full: return "full";
    case comp_class::partial: return "partial";
    case comp_class::none: return "none";
  }
  return "?";
}

std::string_view to_string(partition_provenance p) {
  switch (p) {
    case partition_provenance::proved_exhaustive: return "proved_exhaustive";
    case partition_provenance::proved_sampled: return "proved_sampled";
    case partition_provenance::asserted_by_config: return "asserted_by_config";
  }
  return "?";
}

std::vector<std::uint32_t> comparability_partition::members(
    comp_class c) const {
  std::vector<std::uint32_t> r;
  for (std::uint32_t t = 0; t < cls.size(); ++t) {
    if (cls[t] == c) {
      r.push_back(t);
    }
  }
  return r;
}

namespace {

// Shared machinery for the exhaustive and sampled no-overtaking checks.
// The exhaustive path enumerates the finite weight domain once, tabulates
// the transition function, and then tests every reachable pair.
struct overtaking_checker {
  ticket_graph const& tg;
  monoid_spec const& spec;
  event_table const& events;
  overtaking_mode mode;

  // Exhaustive tables.
  std::vector<monoid_value> domain;
  std::vector<std::uint32_t> gamma;  // [ticket][event][value]
  std::vector<bool> leq;             // [i][j] over domain

  overtaking_checker(ticket_graph const& tg_, monoid_spec const& spec_,
                     event_table const& events_, overtaking_mode const& m)
      : tg{tg_}, spec{spec_}, events{events_}, mode{m} {
    if (mode.exhaustive) {
      domain = enumerate_values(spec);
      auto const n = domain.size();
      gamma.resize(tg.size() * events.size() * n);
      for (std::uint32_t t = 0; t < tg.size(); ++t) {
        for (std::uint32_t s = 0; s < events.size(); ++s) {
          for (std::size_t i = 0; i < n; ++i) {
            gamma[(t * events.size() + s) * n + i] =
                transition(tg, spec, t, domain[i], s);
          }
        }
      }
      leq.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          leq[i * n + j] = monoid_leq(spec, domain[i], domain[j]);
        }
      }
    }
  }

  monoid_value sample_value(rng& r) const {
    auto v = monoid_zero(spec);
    for (std::uint32_t c = 0; c < spec.components.size(); ++c) {
      auto const& cs = spec.components[c];
      switch (cs.kind) {
        case component_kind::counter:
          set_scalar(spec, v, c, r.below(mode.counter_max + 1));
          break;
        case component_kind::saturating_counter:
          set_scalar(spec, v, c, r.below(cs.cap + 1));
          break;
        case component_kind::indicator:
          set_scalar(spec, v, c, r.below(2));
          break;
        case component_kind::finite_set:
          for (std::uint32_t a = 0; a < cs.universe.size(); ++a) {
            if (r.chance(0.5)) {
              set_insert_atom(spec, v, c, a);
            }
          }
          break;
      }
    }
    return v;
  }

  overtaking_result check(std::uint32_t root) {
    auto const reach = compute_reach(tg, root);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (auto const k : reach) {
      for (auto const l : reach) {
        if (tg.reaches(k, l)) {
          pairs.emplace_back(k, l);
        }
      }
    }
    overtaking_result res;
    if (mode.exhaustive) {
      auto const n = domain.size();
      for (auto const& [k, l] : pairs) {
        for (std::uint32_t s = 0; s < events.size(); ++s) {
          auto const* gk = &gamma[(k * events.size() + s) * n];
          auto const* gl = &gamma[(l * events.size() + s) * n];
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              if (!leq[i * n + j]) {
                continue;
              }
              ++res.checked;
              if (!tg.reaches(gk[i], gl[j])) {
                res.verdict = overtaking_verdict::violated;
                res.witness = overtaking_witness{k, l, domain[i], domain[j], s};
                return res;
              }
            }
          }
        }
      }
      res.verdict = overtaking_verdict::holds;
      return res;
    }
    // Sampled: draw h and a nonnegative delta; positivity gives h <= h+d.
    if (pairs.empty() || mode.trials == 0) {
      res.verdict = overtaking_verdict::holds;
      return res;
    }
    rng r{mode.seed * 0x9e3779b97f4a7c15ull + root + 1};
    for (std::uint64_t it = 0; it < mode.trials; ++it) {
      auto const& [k, l] = pairs[r.below(pairs.size())];
      auto const s = static_cast<std::uint32_t>(r.below(events.size()));
      auto const h = sample_value(r);
      auto const h_bar = monoid_add(spec, h, sample_value(r));
      ++res.checked;
      if (!tg.reaches(transition(tg, spec, k, h, s),
                      transition(tg, spec, l, h_bar, s))) {
        res.verdict = overtaking_verdict::violated;
        res.witness = overtaking_witness{k, l, h, h_bar, s};
        return res;
      }
    }
    res.verdict = overtaking_verdict::holds;
    return res;
  }
};

}  // namespace

overtaking_result check_no_overtaking(ticket_graph const& tg,
                                      monoid_spec const& spec,
                                      event_table const& events,
                                      std::uint32_t t,
                                      overtaking_mode const& mode) {
  if (mode.exhaustive && !spec.finite()) {
    throw capability_error{
        "exhaustive no-overtaking check needs a finite weight domain"};
  }
  overtaking_checker checker{tg, spec, events, mode};
  return checker.check(t);
}

comparability_partition compute_partition(
    ticket_graph const& tg, monoid_spec const& spec, event_table const& events,
    overtaking_mode const& mode,
    std::vector<partition_assertion> const& asserted) {
  if (mode.exhaustive && !spec.finite()) {
    throw capability_error{
        "exhaustive no-overtaking check needs a finite weight domain"};
  }
  auto const n = tg.size();
  comparability_partition part;
  part.cls.assign(n, comp_class::none);
  part.provenance.assign(n, mode.exhaustive
                                ? partition_provenance::proved_exhaustive
                                : partition_provenance::proved_sampled);
  part.trials.assign(n, 0);

  overtaking_checker checker{tg, spec, events, mode};
  for (std::uint32_t t = 0; t < n; ++t) {
    auto const reach = compute_reach(tg, t);
    if (check_traceable(tg, reach)) {
      auto const res = checker.check(t);
      part.trials[t] = res.checked;
      if (res.verdict == overtaking_verdict::holds) {
        part.cls[t] = comp_class::full;
        continue;
      }
    }
    // Partial comparability: every guard in the reach must be independent
    // of the weight (syntactic check).
    bool weight_free = true;
    for (auto const k : reach) {
      for (auto e = tg.out[k].first; e < tg.out[k].second && weight_free;
           ++e) {
        weight_free = !references_weight(tg.edges[e].g);
      }
    }
    part.cls[t] = weight_free ? comp_class::partial : comp_class::none;
  }

  for (auto const& a : asserted) {
    verify(a.ticket < n, "partition assertion for unknown ticket");
    part.cls[a.ticket] = a.cls;
    part.provenance[a.ticket] = partition_provenance::asserted_by_config;
  }

  // Consistency re-check: full comparability must be closed under reach.
  for (std::uint32_t t = 0; t < n; ++t) {
    if (part.cls[t] != comp_class::full) {
      continue;
    }
    for (auto const k : compute_reach(tg, t)) {
      verify(part.cls[k] == comp_class::full,
             "partition inconsistent: {} is fully comparable but reaches {} "
             "which is not",
             tg.tickets[t].id, tg.tickets[k].id);
    }
  }
  return part;
}

dominance compare_states(ticket_graph const& tg, monoid_spec const& spec,
                         comparability_partition const& part,
                         fare_state const& f1, fare_state const& f2,
                         bool fss) {
  auto const t1 = f1.ticket;
  auto const t2 = f2.ticket;
  if (part.cls[t1] == comp_class::none) {
    return dominance::incomparable;
  }
  if (part.cls[t1] == comp_class::partial && t1 != t2) {
    return dominance::incomparable;
  }
  if (part.cls[t1] == comp_class::full && !tg.reaches(t1, t2)) {
    return dominance::incomparable;
  }
  auto const mask = fss && t1 == t2 ? tg.tickets[t1].fss_ignore : 0ull;
  if (!monoid_leq_masked(spec, f1.weight, f2.weight, mask)) {
    return dominance::incomparable;
  }
  if (t1 != t2 || !monoid_eq_masked(spec, f1.weight, f2.weight, mask)) {
    return dominance::dominates_strictly;
  }
  return dominance::dominates_or_equal;
}

}  // namespace cfr
