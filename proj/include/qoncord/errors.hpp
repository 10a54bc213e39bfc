// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qoncord {

/// Malformed input: bad gate, wrong parameter count, out-of-range probability.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem exceeds what the dense simulators / oracles can hold.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// No device in the fleet meets the fidelity threshold; the task is rejected.
class NoEligibleDeviceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ratio against a zero ground truth.
class DegenerateInstanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace qoncord
