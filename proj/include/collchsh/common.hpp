#pragma once

#include <stdexcept>
#include <string>

namespace collchsh {

// Post-selection left the retained block with (numerically) zero weight, so
// no normalized reduced state exists.
class degenerate_selection_error : public std::runtime_error {
 public:
  explicit degenerate_selection_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Raw optimizer vectors were too close to linearly dependent to produce an
// orthonormal row pair.
class row_degeneracy_error : public std::runtime_error {
 public:
  explicit row_degeneracy_error(const std::string& what)
      : std::runtime_error(what) {}
};

}
