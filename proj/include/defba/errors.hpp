#pragma once

#include <stdexcept>
#include <string>

namespace defba {

// Base class for all library errors. Specific types below so callers can
// distinguish model-construction problems from solver outcomes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// --- model construction / validation ---
class ValidationError : public Error { public: using Error::Error; };
class UnknownSpeciesRef : public ValidationError { public: using ValidationError::ValidationError; };
class MissingKcat : public ValidationError { public: using ValidationError::ValidationError; };
class BlockViolation : public ValidationError { public: using ValidationError::ValidationError; };
class DimensionMismatch : public Error { public: using Error::Error; };
class SchemaError : public Error { public: using Error::Error; };

// --- LP solver ---
class NumericalFailure : public Error { public: using Error::Error; };

// --- rate / horizon analysis ---
class Infeasible : public Error { public: using Error::Error; };
class Unbounded : public Error { public: using Error::Error; };
class InfeasibleComposition : public Error { public: using Error::Error; };
class BracketFailure : public Error { public: using Error::Error; };
class NonpositiveBound : public Error { public: using Error::Error; };

// --- trajectories ---
class StatusNotOptimal : public Error { public: using Error::Error; };
class TooFewPoints : public Error { public: using Error::Error; };

} // namespace defba
