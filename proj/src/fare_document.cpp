#include "cfr/fare_document.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cfr/errors.hpp"
#include "cfr/rng.hpp"

namespace cfr {

bool validation_report::valid() const { return error_count() == 0; }

std::size_t validation_report::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(),
                    [](auto const& i) { return i.error; }));
}

std::string validation_report::to_string() const {
  std::string out;
  for (auto const& i : issues) {
    out += fmt::format("{} [{}] {}\n", i.error ? "ERROR" : "WARN", i.code,
                       i.message);
  }
  return out;
}

namespace {

struct line_tokens {
  std::size_t line_no;
  std::vector<std::string> tokens;
  std::string guard_text;  // rest of line after "guard=", if present
};

std::vector<line_tokens> tokenize(std::string_view text) {
  std::vector<line_tokens> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto const eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto const hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line_tokens lt{line_no, {}, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() &&
             std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
      }
      if (i >= line.size()) {
        break;
      }
      if (line.compare(i, 6, "guard=") == 0) {
        lt.guard_text = std::string{line.substr(i + 6)};
        // trim trailing whitespace
        while (!lt.guard_text.empty() &&
               std::isspace(static_cast<unsigned char>(lt.guard_text.back()))) {
          lt.guard_text.pop_back();
        }
        break;
      }
      auto const start = i;
      while (i < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
      }
      lt.tokens.emplace_back(line.substr(start, i - start));
    }
    if (!lt.tokens.empty() || !lt.guard_text.empty()) {
      out.push_back(std::move(lt));
    }
  }
  return out;
}

// key=value arguments after the positional tokens
struct kv_args {
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::string> flags;

  std::optional<std::string> get(std::string_view key) const {
    for (auto const& [k, v] : kv) {
      if (k == key) {
        return v;
      }
    }
    return std::nullopt;
  }
  bool has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
};

kv_args parse_kv(std::vector<std::string> const& tokens, std::size_t from) {
  kv_args a;
  for (std::size_t i = from; i < tokens.size(); ++i) {
    auto const eq = tokens[i].find('=');
    if (eq == std::string::npos) {
      a.flags.push_back(tokens[i]);
    } else {
      a.kv.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
    }
  }
  return a;
}

std::vector<std::string> split_csv(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto const comma = s.find(',', pos);
    auto const part =
        s.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
    if (!part.empty()) {
      out.emplace_back(part);
    }
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

std::int64_t parse_int(std::string_view s, std::size_t line) {
  verify_input(!s.empty(), "line {}: expected integer", line);
  bool const neg = s[0] == '-';
  std::size_t i = neg ? 1 : 0;
  verify_input(i < s.size(), "line {}: expected integer, got '{}'", line, s);
  std::int64_t v = 0;
  for (; i < s.size(); ++i) {
    verify_input(std::isdigit(static_cast<unsigned char>(s[i])),
                 "line {}: expected integer, got '{}'", line, s);
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

price_t parse_price(std::string_view s, std::size_t line) {
  auto const dot = s.find('.');
  if (dot == std::string_view::npos) {
    return parse_int(s, line) * 100;
  }
  auto const whole = parse_int(s.substr(0, dot), line);
  auto const frac = s.substr(dot + 1);
  verify_input(frac.size() >= 1 && frac.size() <= 2,
               "line {}: prices carry at most two decimals, got '{}'", line,
               s);
  auto cents = parse_int(frac, line);
  if (frac.size() == 1) {
    cents *= 10;
  }
  verify_input(cents >= 0, "line {}: bad price '{}'", line, s);
  return whole * 100 + (whole < 0 ? -cents : cents);
}

weight_binding parse_binding(std::string_view value, monoid_spec const& spec,
                             std::uint32_t comp, bool start_rule_ctx,
                             std::size_t line,
                             std::vector<validation_issue>& issues) {
  auto const& cs = spec.components[comp];
  weight_binding b;
  if (value == "dist_m") {
    verify_input(cs.kind == component_kind::counter ||
                     cs.kind == component_kind::saturating_counter,
                 "line {}: dist_m binding needs a counter component", line);
    b.k = weight_binding::kind::dist_m;
    return b;
  }
  if (!value.empty() && value.front() == '{') {
    verify_input(value.back() == '}', "line {}: unterminated set literal",
                 line);
    auto const inner = value.substr(1, value.size() - 2);
    verify_input(cs.kind == component_kind::finite_set,
                 "line {}: set binding on non-set component {}", line,
                 cs.name);
    if (inner == "$zone") {
      verify_input(start_rule_ctx,
                   "line {}: $zone is only valid in start rules", line);
      b.k = weight_binding::kind::stop_zone;
      return b;
    }
    if (inner == "$zone_tail" || inner == "$zone_head") {
      verify_input(!start_rule_ctx,
                   "line {}: {} is only valid in weight rules", line, inner);
      b.k = inner == "$zone_tail" ? weight_binding::kind::zone_tail
                                  : weight_binding::kind::zone_head;
      return b;
    }
    b.k = weight_binding::kind::atoms;
    for (auto const& atom : split_csv(inner)) {
      auto const a = spec.atom_index(comp, atom);
      if (!a.has_value()) {
        issues.push_back({true, "unknown_atom",
                          fmt::format("line {}: atom {} not in universe of {}",
                                      line, atom, cs.name)});
        continue;
      }
      b.atom_list.push_back(*a);
    }
    if (b.atom_list.empty()) {
      b.k = weight_binding::kind::zero;
    }
    return b;
  }
  verify_input(cs.kind != component_kind::finite_set,
               "line {}: set component {} needs a {{...}} binding", line,
               cs.name);
  auto const v = parse_int(value, line);
  verify_input(v >= 0, "line {}: weight bindings are nonnegative", line);
  if (v == 0) {
    return b;
  }
  b.k = weight_binding::kind::constant;
  b.value = static_cast<std::uint64_t>(v);
  return b;
}

std::string binding_to_string(weight_binding const& b,
                              monoid_spec const& spec, std::uint32_t comp) {
  switch (b.k) {
    case weight_binding::kind::zero: return {};
    case weight_binding::kind::constant: return fmt::format("{}", b.value);
    case weight_binding::kind::dist_m: return "dist_m";
    case weight_binding::kind::zone_tail: return "{$zone_tail}";
    case weight_binding::kind::zone_head: return "{$zone_head}";
    case weight_binding::kind::stop_zone: return "{$zone}";
    case weight_binding::kind::atoms: {
      std::string s = "{";
      for (std::size_t i = 0; i < b.atom_list.size(); ++i) {
        if (i > 0) {
          s += ',';
        }
        s += spec.components[comp].universe[b.atom_list[i]];
      }
      return s + "}";
    }
  }
  return {};
}

}  // namespace

cfn parse_cfn(std::string_view text) {
  auto const lines = tokenize(text);
  verify_input(!lines.empty() && lines.front().tokens.size() == 2 &&
                   lines.front().tokens[0] == "cfn" &&
                   lines.front().tokens[1] == "1",
               "fare document must start with 'cfn 1'");

  cfn c;
  auto issue = [&](std::string code, std::string msg) {
    c.parse_issues.push_back({true, std::move(code), std::move(msg)});
  };

  // Pass 1: monoid components and events (order-independent grammar).
  std::vector<component_spec> comps;
  for (auto const& l : lines) {
    auto const& t = l.tokens;
    if (t.empty()) {
      continue;
    }
    if (t[0] == "component") {
      verify_input(t.size() >= 3, "line {}: component <name> <kind> ...",
                   l.line_no);
      component_spec cs;
      cs.name = t[1];
      auto const args = parse_kv(t, 3);
      if (auto const u = args.get("unit"); u.has_value()) {
        cs.unit = *u;
      }
      if (t[2] == "counter") {
        cs.kind = component_kind::counter;
      } else if (t[2] == "saturating") {
        cs.kind = component_kind::saturating_counter;
        auto const cap = args.get("cap");
        verify_input(cap.has_value(), "line {}: saturating needs cap=",
                     l.line_no);
        auto const v = parse_int(*cap, l.line_no);
        verify_input(v >= 0, "line {}: cap must be nonnegative", l.line_no);
        cs.cap = static_cast<std::uint64_t>(v);
      } else if (t[2] == "set") {
        cs.kind = component_kind::finite_set;
        auto const u = args.get("universe");
        verify_input(u.has_value() && !u->empty(),
                     "line {}: set needs a non-empty universe=", l.line_no);
        cs.universe = split_csv(*u);
      } else if (t[2] == "indicator") {
        cs.kind = component_kind::indicator;
      } else {
        throw parse_error{
            fmt::format("line {}: unknown component kind {}", l.line_no, t[2])};
      }
      comps.push_back(std::move(cs));
    } else if (t[0] == "event") {
      verify_input(t.size() == 2, "line {}: event <name>", l.line_no);
      c.events.add(t[1]);
    }
  }
  c.spec = monoid_spec::make(std::move(comps));
  c.ride_weights.per_component.assign(c.spec.components.size(), {});
  c.board_weights.per_component.assign(c.spec.components.size(), {});

  // Pass 2: tickets.
  for (auto const& l : lines) {
    if (l.tokens.empty() || l.tokens[0] != "ticket") {
      continue;
    }
    verify_input(l.tokens.size() >= 2, "line {}: ticket <id> price=...",
                 l.line_no);
    ticket tk;
    tk.id = l.tokens[1];
    verify_input(!c.graph.find(tk.id).has_value(),
                 "line {}: duplicate ticket {}", l.line_no, tk.id);
    auto const args = parse_kv(l.tokens, 2);
    auto const price = args.get("price");
    verify_input(price.has_value(), "line {}: ticket needs price=", l.line_no);
    tk.price = parse_price(*price, l.line_no);
    if (auto const f = args.get("fss_ignore"); f.has_value()) {
      for (auto const& name : split_csv(*f)) {
        if (auto const comp = c.spec.find(name); comp.has_value()) {
          tk.fss_ignore |= 1ull << *comp;
        } else {
          issue("unknown_component",
                fmt::format("line {}: fss_ignore references unknown "
                            "component {}",
                            l.line_no, name));
        }
      }
    }
    c.graph.tickets.push_back(std::move(tk));
  }

  // Pass 3: everything that references tickets, components and events.
  for (auto const& l : lines) {
    auto const& t = l.tokens;
    if (t.empty() || t[0] == "component" || t[0] == "event" ||
        t[0] == "ticket" || t[0] == "cfn") {
      continue;
    }
    if (t[0] == "edge") {
      verify_input(t.size() >= 3 && !l.guard_text.empty(),
                   "line {}: edge <from> <to> prio=<n> guard=<expr>",
                   l.line_no);
      auto const from = c.graph.find(t[1]);
      auto const to = c.graph.find(t[2]);
      if (!from.has_value() || !to.has_value()) {
        issue("unknown_ticket",
              fmt::format("line {}: edge references unknown ticket {}",
                          l.line_no, from.has_value() ? t[2] : t[1]));
        continue;
      }
      auto const args = parse_kv(t, 3);
      auto const prio = args.get("prio");
      verify_input(prio.has_value(), "line {}: edge needs prio=", l.line_no);
      ticket_edge e;
      e.from = *from;
      e.to = *to;
      e.priority = static_cast<std::int32_t>(parse_int(*prio, l.line_no));
      try {
        e.g = parse_guard(l.guard_text, c.spec, c.events);
      } catch (parse_error const& err) {
        issue("bad_guard", fmt::format("line {}: {}", l.line_no, err.what()));
        e.g.nodes.push_back({guard::node_kind::lit_false, {}, 0, 0, 0, {}});
      }
      c.graph.edges.push_back(std::move(e));
    } else if (t[0] == "start") {
      auto const args = parse_kv(t, 1);
      start_rule r;
      r.stop = args.get("stop");
      r.zone = args.get("zone");
      r.city = args.get("city");
      auto const tid = args.get("ticket");
      verify_input(tid.has_value(), "line {}: start needs ticket=", l.line_no);
      auto const ti = c.graph.find(*tid);
      if (!ti.has_value()) {
        issue("unknown_ticket",
              fmt::format("line {}: start references unknown ticket {}",
                          l.line_no, *tid));
        continue;
      }
      r.ticket = *ti;
      r.weight.per_component.assign(c.spec.components.size(), {});
      for (auto const& [k, v] : args.kv) {
        if (k == "stop" || k == "zone" || k == "city" || k == "ticket") {
          continue;
        }
        auto const comp = c.spec.find(k);
        if (!comp.has_value()) {
          issue("unknown_component",
                fmt::format("line {}: start binds unknown component {}",
                            l.line_no, k));
          continue;
        }
        r.weight.per_component[*comp] =
            parse_binding(v, c.spec, *comp, true, l.line_no, c.parse_issues);
      }
      c.starts.push_back(std::move(r));
    } else if (t[0] == "event_rule") {
      auto const args = parse_kv(t, 1);
      event_rule r;
      auto const kind = args.get("kind");
      verify_input(kind.has_value() && (*kind == "ride" || *kind == "board"),
                   "line {}: event_rule needs kind=ride|board", l.line_no);
      r.kind = *kind == "ride" ? arc_kind::ride : arc_kind::board;
      r.from_stop = args.get("from");
      r.to_stop = args.get("to");
      r.from_zone = args.get("from_zone");
      r.to_zone = args.get("to_zone");
      r.from_city = args.get("from_city");
      r.to_city = args.get("to_city");
      r.leaves_city = args.has_flag("leaves_city");
      auto const ev = args.get("event");
      verify_input(ev.has_value(), "line {}: event_rule needs event=",
                   l.line_no);
      auto const ei = c.events.find(*ev);
      if (!ei.has_value()) {
        issue("unknown_event",
              fmt::format("line {}: event_rule references unknown event {}",
                          l.line_no, *ev));
        continue;
      }
      r.event = *ei;
      c.event_rules.push_back(std::move(r));
    } else if (t[0] == "weight_rule") {
      auto const args = parse_kv(t, 1);
      auto const kind = args.get("kind");
      verify_input(kind.has_value() && (*kind == "ride" || *kind == "board"),
                   "line {}: weight_rule needs kind=ride|board", l.line_no);
      auto& rule =
          *kind == "ride" ? c.ride_weights : c.board_weights;
      for (auto const& [k, v] : args.kv) {
        if (k == "kind") {
          continue;
        }
        auto const comp = c.spec.find(k);
        if (!comp.has_value()) {
          issue("unknown_component",
                fmt::format("line {}: weight_rule binds unknown component {}",
                            l.line_no, k));
          continue;
        }
        rule.per_component[*comp] =
            parse_binding(v, c.spec, *comp, false, l.line_no, c.parse_issues);
      }
    } else if (t[0] == "assert_partition") {
      verify_input(t.size() == 3,
                   "line {}: assert_partition <ticket> <full|partial|none>",
                   l.line_no);
      auto const ti = c.graph.find(t[1]);
      if (!ti.has_value()) {
        issue("unknown_ticket",
              fmt::format(
                  "line {}: assert_partition references unknown ticket {}",
                  l.line_no, t[1]));
        continue;
      }
      comp_class cls;
      if (t[2] == "full") {
        cls = comp_class::full;
      } else if (t[2] == "partial") {
        cls = comp_class::partial;
      } else if (t[2] == "none") {
        cls = comp_class::none;
      } else {
        throw parse_error{fmt::format("line {}: unknown class {}", l.line_no,
                                      t[2])};
      }
      c.assertions.push_back({*ti, cls});
    } else {
      throw parse_error{
          fmt::format("line {}: unknown record type {}", l.line_no, t[0])};
    }
  }

  c.graph.finalize();
  return c;
}

cfn load_cfn(std::filesystem::path const& file) {
  std::ifstream in{file};
  verify_input(in.good(), "cannot open fare document {}", file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cfn(ss.str());
}

std::string write_cfn(cfn const& c) {
  std::string out = "cfn 1\n";
  for (auto const& cs : c.spec.components) {
    out += fmt::format("component {} {}", cs.name, to_string(cs.kind));
    if (cs.kind == component_kind::saturating_counter) {
      out += fmt::format(" cap={}", cs.cap);
    }
    if (cs.kind == component_kind::finite_set) {
      out += fmt::format(" universe={}", fmt::join(cs.universe, ","));
    }
    if (!cs.unit.empty()) {
      out += fmt::format(" unit={}", cs.unit);
    }
    out += '\n';
  }
  for (std::size_t i = 1; i < c.events.names.size(); ++i) {
    out += fmt::format("event {}\n", c.events.names[i]);
  }
  for (auto const& tk : c.graph.tickets) {
    out += fmt::format("ticket {} price={}", tk.id, format_price(tk.price));
    if (tk.fss_ignore != 0) {
      std::vector<std::string> names;
      for (std::uint32_t i = 0; i < c.spec.components.size(); ++i) {
        if (tk.fss_ignore >> i & 1) {
          names.push_back(c.spec.components[i].name);
        }
      }
      out += fmt::format(" fss_ignore={}", fmt::join(names, ","));
    }
    out += '\n';
  }
  for (auto const& e : c.graph.edges) {
    out += fmt::format("edge {} {} prio={} guard={}\n",
                       c.graph.tickets[e.from].id, c.graph.tickets[e.to].id,
                       e.priority, to_string(e.g, c.spec, c.events));
  }
  auto const write_weight = [&](weight_rule const& w) {
    std::string s;
    for (std::uint32_t i = 0; i < w.per_component.size(); ++i) {
      auto const b = binding_to_string(w.per_component[i], c.spec, i);
      if (!b.empty()) {
        s += fmt::format(" {}={}", c.spec.components[i].name, b);
      }
    }
    return s;
  };
  for (auto const& r : c.starts) {
    out += "start";
    if (r.stop.has_value()) {
      out += fmt::format(" stop={}", *r.stop);
    }
    if (r.zone.has_value()) {
      out += fmt::format(" zone={}", *r.zone);
    }
    if (r.city.has_value()) {
      out += fmt::format(" city={}", *r.city);
    }
    out += fmt::format(" ticket={}", c.graph.tickets[r.ticket].id);
    out += write_weight(r.weight);
    out += '\n';
  }
  for (auto const& r : c.event_rules) {
    out += fmt::format("event_rule kind={}",
                       r.kind == arc_kind::ride ? "ride" : "board");
    if (r.from_stop.has_value()) {
      out += fmt::format(" from={}", *r.from_stop);
    }
    if (r.to_stop.has_value()) {
      out += fmt::format(" to={}", *r.to_stop);
    }
    if (r.from_zone.has_value()) {
      out += fmt::format(" from_zone={}", *r.from_zone);
    }
    if (r.to_zone.has_value()) {
      out += fmt::format(" to_zone={}", *r.to_zone);
    }
    if (r.from_city.has_value()) {
      out += fmt::format(" from_city={}", *r.from_city);
    }
    if (r.to_city.has_value()) {
      out += fmt::format(" to_city={}", *r.to_city);
    }
    if (r.leaves_city) {
      out += " leaves_city";
    }
    out += fmt::format(" event={}\n", c.events.names[r.event]);
  }
  if (auto const w = write_weight(c.ride_weights); !w.empty()) {
    out += fmt::format("weight_rule kind=ride{}\n", w);
  }
  if (auto const w = write_weight(c.board_weights); !w.empty()) {
    out += fmt::format("weight_rule kind=board{}\n", w);
  }
  for (auto const& a : c.assertions) {
    out += fmt::format("assert_partition {} {}\n",
                       c.graph.tickets[a.ticket].id, to_string(a.cls));
  }
  return out;
}

validation_report validate_cfn(cfn const& c) {
  validation_report rep;
  rep.issues = c.parse_issues;

  if (c.graph.tickets.empty()) {
    rep.issues.push_back({true, "no_tickets", "the ticket set is empty"});
    return rep;
  }

  // Cycle detection (Kahn).
  {
    std::vector<std::uint32_t> indeg(c.graph.size(), 0);
    for (auto const& e : c.graph.edges) {
      if (e.from == e.to) {
        rep.issues.push_back(
            {true, "cycle",
             fmt::format("self-loop on ticket {}", c.graph.tickets[e.from].id)});
      }
      ++indeg[e.to];
    }
    std::vector<std::uint32_t> q;
    for (std::uint32_t t = 0; t < c.graph.size(); ++t) {
      if (indeg[t] == 0) {
        q.push_back(t);
      }
    }
    std::size_t seen = 0;
    while (!q.empty()) {
      auto const u = q.back();
      q.pop_back();
      ++seen;
      for (auto e = c.graph.out[u].first; e < c.graph.out[u].second; ++e) {
        if (c.graph.edges[e].from != c.graph.edges[e].to &&
            --indeg[c.graph.edges[e].to] == 0) {
          q.push_back(c.graph.edges[e].to);
        }
      }
    }
    if (seen != c.graph.size()) {
      rep.issues.push_back(
          {true, "cycle", "the ticket graph contains a directed cycle"});
    }
  }

  for (auto const& tk : c.graph.tickets) {
    if (tk.price < 0) {
      rep.issues.push_back({true, "negative_price",
                            fmt::format("ticket {} has a negative price",
                                        tk.id)});
    }
  }
  for (auto const& e : c.graph.edges) {
    if (c.graph.tickets[e.from].price > c.graph.tickets[e.to].price) {
      rep.issues.push_back(
          {true, "price_monotonicity",
           fmt::format("edge {} -> {} decreases the price ({} > {})",
                       c.graph.tickets[e.from].id, c.graph.tickets[e.to].id,
                       format_price(c.graph.tickets[e.from].price),
                       format_price(c.graph.tickets[e.to].price))});
    }
  }

  // Duplicate priorities make the transition function ambiguous.
  for (std::size_t i = 1; i < c.graph.edges.size(); ++i) {
    auto const& a = c.graph.edges[i - 1];
    auto const& b = c.graph.edges[i];
    if (a.from == b.from && a.priority == b.priority) {
      rep.issues.push_back(
          {true, "duplicate_priority",
           fmt::format("ticket {} has two out-edges with priority {}",
                       c.graph.tickets[a.from].id, a.priority)});
    }
  }

  // An FSS ignore mask must not cover components that guards reachable
  // from the ticket still look at; that would let masked labels diverge.
  for (std::uint32_t t = 0; t < c.graph.size(); ++t) {
    if (c.graph.tickets[t].fss_ignore == 0) {
      continue;
    }
    for (auto const k : compute_reach(c.graph, t)) {
      for (auto e = c.graph.out[k].first; e < c.graph.out[k].second; ++e) {
        auto const bad =
            referenced_components(c.graph.edges[e].g) &
            c.graph.tickets[t].fss_ignore;
        if (bad != 0) {
          rep.issues.push_back(
              {true, "fss_mask",
               fmt::format("ticket {} ignores a component that guards of "
                           "reachable ticket {} still reference",
                           c.graph.tickets[t].id, c.graph.tickets[k].id)});
        }
      }
    }
  }

  // Sampled lint: two guards of one ticket firing on the same (h, s) are
  // resolved by priority, which is worth a warning.
  {
    rng r{42};
    std::vector<bool> warned(c.graph.size(), false);
    for (std::uint32_t it = 0; it < 2000; ++it) {
      monoid_value h = monoid_zero(c.spec);
      for (std::uint32_t comp = 0; comp < c.spec.components.size(); ++comp) {
        auto const& cs = c.spec.components[comp];
        switch (cs.kind) {
          case component_kind::counter:
            set_scalar(c.spec, h, comp, r.below(10001));
            break;
          case component_kind::saturating_counter:
            set_scalar(c.spec, h, comp, r.below(cs.cap + 1));
            break;
          case component_kind::indicator:
            set_scalar(c.spec, h, comp, r.below(2));
            break;
          case component_kind::finite_set:
            for (std::uint32_t a = 0; a < cs.universe.size(); ++a) {
              if (r.chance(0.5)) {
                set_insert_atom(c.spec, h, comp, a);
              }
            }
            break;
        }
      }
      auto const s = static_cast<std::uint32_t>(r.below(c.events.size()));
      for (std::uint32_t t = 0; t < c.graph.size(); ++t) {
        if (warned[t]) {
          continue;
        }
        int fired = 0;
        for (auto e = c.graph.out[t].first; e < c.graph.out[t].second; ++e) {
          fired += eval_guard(c.graph.edges[e].g, c.spec, h, s) ? 1 : 0;
        }
        if (fired > 1) {
          warned[t] = true;
          rep.issues.push_back(
              {false, "overlapping_guards",
               fmt::format("ticket {} has {} simultaneously true guards for "
                           "weight {} and event {}; priority order decides",
                           c.graph.tickets[t].id, fired, to_string(c.spec, h),
                           c.events.names[s])});
        }
      }
    }
  }

  if (c.starts.empty()) {
    rep.issues.push_back(
        {false, "no_start_rules", "no initial fare state rules declared"});
  } else {
    bool const has_default = std::any_of(
        c.starts.begin(), c.starts.end(), [](auto const& r) {
          return !r.stop.has_value() && !r.zone.has_value() &&
                 !r.city.has_value();
        });
    if (!has_default) {
      rep.issues.push_back({false, "no_default_start",
                            "no catch-all start rule; stops matching no rule "
                            "will fail to annotate"});
    }
  }
  return rep;
}

}  // namespace cfr
