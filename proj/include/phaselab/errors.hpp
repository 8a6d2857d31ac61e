#pragma once

#include <stdexcept>
#include <string>

namespace phaselab {

/// Base class for all library failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitianError : Error { using Error::Error; };
struct NotUnitTraceError : Error { using Error::Error; };
struct NotPositiveError : Error { using Error::Error; };
struct NearZeroCrossingError : Error { using Error::Error; };
struct JumpTooLargeError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };

struct EmptySpecError : Error { using Error::Error; };
struct MissingSampleError : Error { using Error::Error; };
struct NonUnitaryPulseError : Error { using Error::Error; };
struct OutOfRangeError : Error { using Error::Error; };
struct NotCyclicError : Error { using Error::Error; };
struct MissingGeneratorsError : Error { using Error::Error; };

struct GridMismatchError : Error { using Error::Error; };
struct CountMismatchError : Error { using Error::Error; };
struct DegenerateSpectrumError : Error { using Error::Error; };

struct SchemaError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

} // namespace phaselab
