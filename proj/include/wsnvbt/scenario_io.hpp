#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wsnvbt/core.hpp"
#include "wsnvbt/errors.hpp"
#include "wsnvbt/text.hpp"

namespace wsnvbt {

// Line-oriented scenario format:
//
//   field <width> <height> <sink_x> <sink_y> <range> <seed>
//   node <id> <x> <y> <energy>
//
// Blank lines and lines starting with '#' are ignored. Ids must be unique and
// dense from 0; positions must lie inside the field.

inline void write_scenario(std::ostream& os, const Scenario& s) {
  using text::format_double;
  os << "field " << format_double(s.field.width) << ' ' << format_double(s.field.height) << ' '
     << format_double(s.field.sink.x) << ' ' << format_double(s.field.sink.y) << ' '
     << format_double(s.sensing_range) << ' ' << s.rng_seed << '\n';
  for (const auto& n : s.nodes) {
    os << "node " << n.id.index << ' ' << format_double(n.pos.x) << ' ' << format_double(n.pos.y) << ' '
       << format_double(n.energy) << '\n';
  }
}

inline std::string scenario_to_string(const Scenario& s) {
  std::ostringstream os;
  write_scenario(os, s);
  return os.str();
}

inline Scenario read_scenario(std::istream& is, const EnergyPolicy& policy = {}) {
  Scenario s;
  bool have_field = false;
  std::vector<Node> pending;
  std::vector<std::size_t> pending_lines;
  std::string line;
  std::size_t lineno = 0;

  auto number = [&](std::string_view tok, const char* what) {
    auto v = text::parse_double(tok);
    if (!v) throw ParseError(lineno, std::string("bad ") + what + " '" + std::string(tok) + "'");
    return *v;
  };

  while (std::getline(is, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tok = text::split_ws(body);
    if (tok[0] == "field") {
      if (have_field) throw ParseError(lineno, "duplicate field line");
      if (tok.size() != 7) throw ParseError(lineno, "field line needs 6 values");
      s.field.width = number(tok[1], "width");
      s.field.height = number(tok[2], "height");
      s.field.sink = {number(tok[3], "sink_x"), number(tok[4], "sink_y")};
      s.sensing_range = number(tok[5], "range");
      auto seed = text::parse_u64(tok[6]);
      if (!seed) throw ParseError(lineno, "bad seed '" + std::string(tok[6]) + "'");
      s.rng_seed = *seed;
      if (!(s.field.width > 0.0) || !(s.field.height > 0.0)) throw ParseError(lineno, "field dimensions must be positive");
      if (!s.field.contains(s.field.sink)) throw ParseError(lineno, "sink outside field");
      if (!(s.sensing_range > 0.0)) throw ParseError(lineno, "range must be positive");
      have_field = true;
    } else if (tok[0] == "node") {
      if (!have_field) throw ParseError(lineno, "node line before field line");
      if (tok.size() != 5) throw ParseError(lineno, "node line needs 4 values");
      auto id = text::parse_u64(tok[1]);
      if (!id) throw ParseError(lineno, "bad node id '" + std::string(tok[1]) + "'");
      Node n;
      n.id = NodeId{static_cast<std::size_t>(*id)};
      n.pos = {number(tok[2], "x"), number(tok[3], "y")};
      n.energy = number(tok[4], "energy");
      if (!s.field.contains(n.pos)) throw ParseError(lineno, "node " + std::to_string(*id) + " outside field");
      if (n.energy < 0.0) throw ParseError(lineno, "negative energy");
      for (std::size_t k = 0; k < pending.size(); ++k) {
        if (pending[k].id == n.id) {
          throw ParseError(lineno, "duplicate node id " + std::to_string(*id) + " (first defined on line " +
                                       std::to_string(pending_lines[k]) + ")");
        }
      }
      pending.push_back(n);
      pending_lines.push_back(lineno);
    } else {
      throw ParseError(lineno, "unknown record '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_field) throw ParseError(lineno, "missing field line");

  s.nodes.assign(pending.size(), Node{});
  for (std::size_t k = 0; k < pending.size(); ++k) {
    const std::size_t id = pending[k].id.index;
    if (id >= pending.size()) {
      throw ParseError(pending_lines[k], "node ids must be dense from 0 (got " + std::to_string(id) + ")");
    }
    s.nodes[id] = pending[k];
  }
  reset_statuses(s.nodes, policy);
  return s;
}

inline Scenario scenario_from_string(const std::string& text, const EnergyPolicy& policy = {}) {
  std::istringstream is(text);
  return read_scenario(is, policy);
}

inline Scenario load_scenario(const std::string& path, const EnergyPolicy& policy = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open scenario file '" + path + "'");
  return read_scenario(in, policy);
}

}  // namespace wsnvbt
