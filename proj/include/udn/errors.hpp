#pragma once

#include <stdexcept>
#include <string>

namespace udn {

/// A caller-supplied value violates a documented precondition.
struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Transmitter and receiver coincide; the link gain is undefined.
struct singular_geometry : std::domain_error {
  using std::domain_error::domain_error;
};

/// The requested path cannot be flown within the given speed and duration.
struct infeasible_trajectory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An exhaustive search would exceed its evaluation budget.
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A relay plan forwards data it has not yet received.
struct infeasible_plan : std::runtime_error {
  infeasible_plan(const std::string& what, int slot_index)
      : std::runtime_error(what), slot(slot_index) {}
  int slot;
};

/// An objective that must not decrease did; indicates a buggy block solver.
struct internal_consistency_error : std::logic_error {
  using std::logic_error::logic_error;
};

/// Two results being compared were not produced under comparable settings.
struct invalid_comparison : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An objective evaluation returned a non-finite value.
struct evaluation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace udn
