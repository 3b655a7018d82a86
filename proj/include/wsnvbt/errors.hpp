#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsnvbt/core.hpp"

namespace wsnvbt {

/// A backbone could not be formed: some live nodes have no eligible route.
class ConstructionFailed : public std::runtime_error {
 public:
  explicit ConstructionFailed(std::vector<NodeId> unreachable)
      : std::runtime_error("construction failed: " + std::to_string(unreachable.size()) + " unreachable node(s)"),
        unreachable_(std::move(unreachable)) {}

  const std::vector<NodeId>& unreachable() const noexcept { return unreachable_; }

 private:
  std::vector<NodeId> unreachable_;
};

/// Malformed scenario or config text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InstanceTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace wsnvbt
