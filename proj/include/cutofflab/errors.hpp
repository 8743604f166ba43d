#pragma once

#include <stdexcept>
#include <string>

namespace cutofflab {

/// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DissipativityViolation : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };

struct EigenvalueInStability : Error { using Error::Error; };
struct DefectiveAmbiguity : Error { using Error::Error; };
struct FlowDidNotEnter : Error { using Error::Error; };

struct InvalidAlpha : Error { using Error::Error; };

struct NonFiniteState : Error { using Error::Error; };
struct StepSizeTooLarge : Error { using Error::Error; };

struct DimensionMismatch : Error { using Error::Error; };
struct SizeCapExceeded : Error { using Error::Error; };
struct UnequalWeights : Error { using Error::Error; };

struct InsufficientSignal : Error { using Error::Error; };
struct NoProfile : Error { using Error::Error; };

struct ConfigInvalid : Error { using Error::Error; };

}  // namespace cutofflab
