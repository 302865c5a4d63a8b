#include "cfr/guard.hpp"

#include <cctype>

#include <fmt/format.h>

#include "cfr/errors.hpp"

namespace cfr {

std::uint32_t event_table::add(std::string name) {
  if (auto const i = find(name); i.has_value()) {
    return *i;
  }
  names.push_back(std::move(name));
  return static_cast<std::uint32_t>(names.size() - 1);
}

std::optional<std::uint32_t> event_table::find(std::string_view name) const {
  for (std::uint32_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      return i;
    }
  }
  return std::nullopt;
}

std::uint32_t event_table::require(std::string_view name) const {
  auto const i = find(name);
  verify(i.has_value(), "unknown event symbol {}", name);
  return *i;
}

std::string_view to_string(cmp_op op) {
  switch (op) {
    case cmp_op::lt: return "<";
    case cmp_op::le: return "<=";
    case cmp_op::eq: return "=";
    case cmp_op::ge: return ">=";
    case cmp_op::gt: return ">";
    case cmp_op::ne: return "!=";
  }
  return "?";
}

namespace {

bool cmp(cmp_op op, std::uint64_t lhs, std::uint64_t rhs) {
  switch (op) {
    case cmp_op::lt: return lhs < rhs;
    case cmp_op::le: return lhs <= rhs;
    case cmp_op::eq: return lhs == rhs;
    case cmp_op::ge: return lhs >= rhs;
    case cmp_op::gt: return lhs > rhs;
    case cmp_op::ne: return lhs != rhs;
  }
  return false;
}

bool eval_node(guard const& g, std::uint32_t n, monoid_spec const& spec,
               monoid_value const& h, std::uint32_t event) {
  auto const& nd = g.nodes[n];
  switch (nd.kind) {
    case guard::node_kind::op_and:
      for (auto const c : nd.children) {
        if (!eval_node(g, c, spec, h, event)) {
          return false;
        }
      }
      return true;
    case guard::node_kind::op_or:
      for (auto const c : nd.children) {
        if (eval_node(g, c, spec, h, event)) {
          return true;
        }
      }
      return false;
    case guard::node_kind::op_not:
      return !eval_node(g, nd.children[0], spec, h, event);
    case guard::node_kind::comp_cmp: {
      auto const lhs =
          spec.components[nd.comp].kind == component_kind::finite_set
              ? set_cardinality(spec, h, nd.comp)
              : get_scalar(spec, h, nd.comp);
      return cmp(nd.op, lhs, nd.rhs);
    }
    case guard::node_kind::event_cmp:
      return nd.op == cmp_op::eq ? event == nd.event : event != nd.event;
    case guard::node_kind::lit_true: return true;
    case guard::node_kind::lit_false: return false;
  }
  return false;
}

}  // namespace

bool eval_guard(guard const& g, monoid_spec const& spec,
                monoid_value const& h, std::uint32_t event) {
  verify(!g.nodes.empty(), "empty guard");
  return eval_node(g, static_cast<std::uint32_t>(g.nodes.size() - 1), spec, h,
                   event);
}

std::uint64_t referenced_components(guard const& g) {
  std::uint64_t mask = 0;
  for (auto const& n : g.nodes) {
    if (n.kind == guard::node_kind::comp_cmp) {
      mask |= 1ull << n.comp;
    }
  }
  return mask;
}

namespace {

struct token_stream {
  std::string_view text;
  std::size_t pos{0};

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(
                                    text[pos]))) {
      ++pos;
    }
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    verify_input(pos < text.size(), "unexpected end of guard expression");
    return text[pos];
  }
  void expect(char c) {
    verify_input(peek() == c, "expected '{}' at offset {} in guard '{}'", c,
                 pos, text);
    ++pos;
  }
  std::string_view word() {
    skip_ws();
    auto const start = pos;
    while (pos < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')') {
      ++pos;
    }
    verify_input(pos > start, "expected a token at offset {} in guard '{}'",
                 start, text);
    return text.substr(start, pos - start);
  }
};

std::optional<cmp_op> parse_op(std::string_view w) {
  if (w == "<") return cmp_op::lt;
  if (w == "<=") return cmp_op::le;
  if (w == "=") return cmp_op::eq;
  if (w == ">=") return cmp_op::ge;
  if (w == ">") return cmp_op::gt;
  if (w == "!=") return cmp_op::ne;
  return std::nullopt;
}

std::uint32_t parse_expr(token_stream& ts, guard& g, monoid_spec const& spec,
                         event_table const& events) {
  ts.expect('(');
  auto const head = ts.word();
  guard::node nd;
  if (head == "and" || head == "or") {
    nd.kind = head == "and" ? guard::node_kind::op_and : guard::node_kind::op_or;
    while (ts.peek() != ')') {
      nd.children.push_back(parse_expr(ts, g, spec, events));
    }
    verify_input(!nd.children.empty(), "({} ...) needs at least one operand",
                 head);
  } else if (head == "not") {
    nd.kind = guard::node_kind::op_not;
    nd.children.push_back(parse_expr(ts, g, spec, events));
  } else if (head == "true") {
    nd.kind = guard::node_kind::lit_true;
  } else if (head == "false") {
    nd.kind = guard::node_kind::lit_false;
  } else if (auto const op = parse_op(head); op.has_value()) {
    auto const lhs = ts.word();
    auto const rhs = ts.word();
    if (lhs == "event") {
      verify_input(*op == cmp_op::eq || *op == cmp_op::ne,
                   "events only support = and !=, got {}", head);
      nd.kind = guard::node_kind::event_cmp;
      nd.op = *op;
      auto const ev = events.find(rhs);
      verify_input(ev.has_value(), "guard references unknown event {}", rhs);
      nd.event = *ev;
    } else {
      auto const comp = spec.find(lhs);
      verify_input(comp.has_value(), "guard references unknown component {}",
                   lhs);
      auto const kind = spec.components[*comp].kind;
      verify_input(*op != cmp_op::ne,
                   "!= is not part of the guard grammar for components");
      nd.kind = guard::node_kind::comp_cmp;
      nd.op = *op;
      nd.comp = *comp;
      std::uint64_t value = 0;
      for (auto const c : rhs) {
        verify_input(std::isdigit(static_cast<unsigned char>(c)),
                     "expected integer constant, got {}", rhs);
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
      }
      nd.rhs = value;
      if (kind == component_kind::indicator) {
        verify_input(*op == cmp_op::eq && value == 1,
                     "indicator {} may only be tested with (= {} 1)", lhs,
                     lhs);
      }
    }
  } else {
    throw parse_error{fmt::format("unknown guard operator '{}'", head)};
  }
  ts.expect(')');
  g.nodes.push_back(std::move(nd));
  return static_cast<std::uint32_t>(g.nodes.size() - 1);
}

void print_node(std::string& out, guard const& g, std::uint32_t n,
                monoid_spec const& spec, event_table const& events) {
  auto const& nd = g.nodes[n];
  switch (nd.kind) {
    case guard::node_kind::op_and:
    case guard::node_kind::op_or:
      out += nd.kind == guard::node_kind::op_and ? "(and" : "(or";
      for (auto const c : nd.children) {
        out += ' ';
        print_node(out, g, c, spec, events);
      }
      out += ')';
      break;
    case guard::node_kind::op_not:
      out += "(not ";
      print_node(out, g, nd.children[0], spec, events);
      out += ')';
      break;
    case guard::node_kind::comp_cmp:
      out += fmt::format("({} {} {})", to_string(nd.op),
                         spec.components[nd.comp].name, nd.rhs);
      break;
    case guard::node_kind::event_cmp:
      out += fmt::format("({} event {})", to_string(nd.op),
                         events.names[nd.event]);
      break;
    case guard::node_kind::lit_true: out += "(true)"; break;
    case guard::node_kind::lit_false: out += "(false)"; break;
  }
}

}  // namespace

guard parse_guard(std::string_view text, monoid_spec const& spec,
                  event_table const& events) {
  token_stream ts{text};
  guard g;
  parse_expr(ts, g, spec, events);
  verify_input(ts.eof(), "trailing input after guard expression: '{}'", text);
  return g;
}

std::string to_string(guard const& g, monoid_spec const& spec,
                      event_table const& events) {
  verify(!g.nodes.empty(), "empty guard");
  std::string out;
  print_node(out, g, static_cast<std::uint32_t>(g.nodes.size() - 1), spec,
             events);
  return out;
}

}  // namespace cfr
