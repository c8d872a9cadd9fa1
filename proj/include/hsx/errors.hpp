#pragma once

#include <stdexcept>
#include <string>

namespace hsx {

// Base class for all recoverable errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A function that should be non-decreasing is not.
struct NonMonotoneError : Error {
  explicit NonMonotoneError(const std::string& what) : Error(what) {}
};

// Comparing measures whose total masses differ.
struct MassMismatchError : Error {
  explicit MassMismatchError(const std::string& what) : Error(what) {}
};

// A quantile function is not absolutely integrable (the cumulative energy
// has divergent tail integrals).
struct NonIntegrableError : Error {
  explicit NonIntegrableError(const std::string& what) : Error(what) {}
};

// Extension by continuity requested on a side where the quantile function
// has an infinite limit.
struct InfiniteBoundaryError : Error {
  explicit InfiniteBoundaryError(const std::string& what) : Error(what) {}
};

// A finite-difference stencil touches a kink or an atom.
struct SingularityProximityError : Error {
  explicit SingularityProximityError(const std::string& what) : Error(what) {}
};

// A state violates a structural requirement (e.g. velocity not constant
// where the transport map is flat).
struct InvalidStateError : Error {
  explicit InvalidStateError(const std::string& what) : Error(what) {}
};

// Malformed argument (unknown scenario name, negative time, bad parameter).
struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error(what) {}
};

}  // namespace hsx
