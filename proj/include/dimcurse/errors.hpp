#pragma once

#include <stdexcept>
#include <string>

namespace dimcurse {

// Caller broke a documented precondition (wrong step index, counters out of
// range, too few samples, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Argument outside the mathematical domain of the operation (T = 0, L <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A brute-force grid would exceed the configured point limit.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace dimcurse
