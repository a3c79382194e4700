#pragma once

#include <stdexcept>
#include <string>

namespace sphcorr {

// Base class for all library errors; catch this at the CLI boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct NotUnitDiagonal : Error { using Error::Error; };
struct RowNotUnitNorm : Error { using Error::Error; };
struct ZeroDiagonal : Error { using Error::Error; };
struct LogOfZero : Error { using Error::Error; };
struct DivByZero : Error { using Error::Error; };
struct NonPositiveAlpha : Error { using Error::Error; };
struct NonPositiveGamma : Error { using Error::Error; };
struct NonFiniteGradient : Error { using Error::Error; };
struct MaxStepoutExceeded : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };
struct RaggedData : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ChainDiverged : Error { using Error::Error; };

}  // namespace sphcorr
