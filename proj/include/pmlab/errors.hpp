#pragma once

#include <stdexcept>
#include <string>

namespace pmlab {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- coefficients ---
struct EvalDomainError : Error {
  using Error::Error;
};  // cap dropped below its declared lower bound

// --- grid / fields ---
struct EmptySupportError : Error {
  using Error::Error;
};

// --- solver ---
struct CflViolationError : Error {
  using Error::Error;
};
struct NonFiniteError : Error {
  using Error::Error;
};
struct MaxStepsError : Error {
  using Error::Error;
};
struct SupportNearBoundaryError : Error {
  using Error::Error;
};  // domain too small for the run

// --- diagnostics ---
struct NotCongestedError : Error {
  using Error::Error;
};
struct NotAPatchError : Error {
  using Error::Error;
};
struct MultipleFrontsError : Error {
  using Error::Error;
};
struct DegenerateDenominatorError : Error {
  using Error::Error;
};

// --- streamlines ---
struct LeftDomainError : Error {
  using Error::Error;
};

// --- barriers ---
struct InitialOrderingError : Error {
  using Error::Error;
};
struct RegionOutsidePositivityError : Error {
  using Error::Error;
};

// --- io / cli ---
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace pmlab
