#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace optpart {

/// A part lost all of its mass and can no longer be normalized.
class DegeneratePart : public std::runtime_error {
 public:
  DegeneratePart(int part, std::size_t last_support, int iteration = -1);

  int part() const { return part_; }
  std::size_t last_support() const { return last_support_; }
  int iteration() const { return iteration_; }

  /// Copy of this error with the outer iteration index attached.
  DegeneratePart at_iteration(int iteration) const {
    return DegeneratePart(part_, last_support_, iteration);
  }

 private:
  int part_;
  std::size_t last_support_;
  int iteration_;
};

/// Secant update with a vanishing denominator.
class SecantStall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The energy-decrease loop exhausted its iteration budget.
class SecantFailed : public std::runtime_error {
 public:
  SecantFailed(const std::string& what, int iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

class InitFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: flags, config files, masks.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace optpart
