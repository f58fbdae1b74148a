#pragma once

#include <stdexcept>

namespace hdtk {

/// Raised when a numerical property that must hold on every evaluation does not.
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hdtk
