#pragma once

#include <stdexcept>
#include <string>

namespace bsymp {

// Base for everything the library throws on its own behalf.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- symbolic algebra ---

struct ParseError : Error {
  std::size_t position;
  ParseError(std::size_t pos, const std::string& what)
      : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// A substitution or power would leave the closed term algebra
// (composite function arguments, fractional powers of sums, irrational
// coefficients).
struct ClosureViolation : Error {
  using Error::Error;
};

struct ZeroExpression : Error {
  using Error::Error;
};

struct UnboundVariable : Error {
  using Error::Error;
};

// Numeric evaluation outside the domain (negative base with fractional
// exponent, zero base with negative exponent).
struct DomainError : Error {
  using Error::Error;
};

// --- exterior algebra ---

struct ChartMismatch : Error {
  using Error::Error;
};

struct DegreeOverflow : Error {
  using Error::Error;
};

struct DegreeUnderflow : Error {
  using Error::Error;
};

struct OddDimension : Error {
  using Error::Error;
};

struct EvenDimension : Error {
  using Error::Error;
};

// --- classification ---

struct IdenticallyZeroTopPower : Error {
  using Error::Error;
};

struct PoorFit : Error {
  using Error::Error;
};

struct GradientVanishes : Error {
  using Error::Error;
};

struct NotABmForm : Error {
  using Error::Error;
};

struct PoleOnZ : Error {
  using Error::Error;
};

// --- catalog ---

struct InvalidAlpha : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

struct AlphaEqualsTwo : Error {
  using Error::Error;
};

// --- dynamics / contact ---

struct DegenerateForm : Error {
  using Error::Error;
};

// Symbolic linear solve needs a single-term determinant; callers may fall
// back to the pointwise numeric solver when they catch this.
struct NonMonomialDeterminant : Error {
  using Error::Error;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct SingularMatrixAtSample : Error {
  using Error::Error;
};

}  // namespace bsymp
