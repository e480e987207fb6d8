#ifndef IST_ERRORS_HPP
#define IST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ist {

// Base class for all toolkit failures. Validation problems (bad inputs,
// malformed files) derive from ValidationError; runtime numerical failures
// derive from NumericalError. The CLI maps these to exit codes 2 and 3.
struct IstError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : IstError {
  using IstError::IstError;
};

struct NumericalError : IstError {
  using IstError::IstError;
};

// Running Jost/Faddeev solution exceeded the overflow bound; lambda is too
// deep in the half plane for the grid's decay truncation.
struct DivergedIntegration : NumericalError {
  using NumericalError::NumericalError;
};

// The fitted decay envelope cannot dominate the exp(2 Im(lambda) y)
// truncation error at the grid edge; analytic continuation untrustworthy.
struct EnvelopeInsufficient : NumericalError {
  using NumericalError::NumericalError;
};

// Refined zero count disagrees with the argument-principle winding.
struct WindingMismatch : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularLambda : ValidationError {
  using ValidationError::ValidationError;
};

struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct BracketFailure : NumericalError {
  using NumericalError::NumericalError;
};

// Evolution exponent |2 A0(lambda_k) dt| beyond the configured cap.
struct Overflow : NumericalError {
  using NumericalError::NumericalError;
};

struct GridTooShort : NumericalError {
  using NumericalError::NumericalError;
};

// lambda-grid Nyquist bound violated for the requested kernel z-range.
struct AliasWarning : NumericalError {
  using NumericalError::NumericalError;
};

// Nystroem matrix condition number beyond threshold; the flagged
// non-uniqueness/instability regime of the inversion.
struct IllConditioned : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularDeterminant : NumericalError {
  using NumericalError::NumericalError;
};

struct EmptySpectrum : ValidationError {
  using ValidationError::ValidationError;
};

struct NoDecay : NumericalError {
  using NumericalError::NumericalError;
};

struct NotPolynomial : ValidationError {
  using ValidationError::ValidationError;
};

struct CaseMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct CflViolation : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace ist

#endif
