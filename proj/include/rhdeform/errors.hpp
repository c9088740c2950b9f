#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rhd {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularStokesData : Error {
  using Error::Error;
};

struct NoDecay : Error {
  using Error::Error;
};

struct Unreachable : Error {
  using Error::Error;
};

struct NotSplittable : Error {
  using Error::Error;
};

struct OnWalk : Error {
  using Error::Error;
};

/// A fixed deformation would sweep over another arc's endpoint.
struct ConditionTwoViolated : Error {
  ConditionTwoViolated(const std::string& msg, std::complex<double> pt)
      : Error(msg), endpoint(pt) {}
  std::complex<double> endpoint;
};

struct RecursionLimit : Error {
  using Error::Error;
};

struct CrossingPaths : Error {
  using Error::Error;
};

struct NoEnclosingWalk : Error {
  using Error::Error;
};

struct AssemblyFailure : Error {
  AssemblyFailure(const std::string& msg, int piece) : Error(msg), piece_id(piece) {}
  int piece_id;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  IllConditioned(const std::string& msg, double kappa) : Error(msg), condition(kappa) {}
  double condition;
};

struct InvalidInput : Error {
  using Error::Error;
};

}  // namespace rhd
