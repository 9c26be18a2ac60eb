#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vvl {

// Argument outside the mathematical domain of a function (negative density,
// non-positive reference density, vacuum carrying momentum, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Density left the admissible set during a solver update.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, std::size_t cell)
      : std::runtime_error(what + " (cell " + std::to_string(cell) + ")"), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

// Invalid configuration or inconsistent inputs (grids, parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vvl
