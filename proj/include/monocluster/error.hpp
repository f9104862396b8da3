#pragma once

#include <stdexcept>
#include <string>

namespace monocluster {

// Invalid input: bad dimensions, malformed parameters, precondition misuse.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A checked mathematical contract did not hold.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A graph whose omega-product vanishes identically was asked for a quantity
// that only exists for contributing graphs (e.g. the sigma map).
class NonContributingGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation would exceed the configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace monocluster
