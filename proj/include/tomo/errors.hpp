#pragma once

#include <stdexcept>

namespace tomo {

// A detector cannot run on the given problem size (e.g. the exhaustive
// search guard tripped); the caller should drop that detector.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A detector cannot produce a decision on this input (e.g. rank-deficient
// channel where an inverse is required).
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tomo
