#pragma once

#include <stdexcept>
#include <string>

namespace tanglemap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSegment : Error { using Error::Error; };
struct NearSingular : Error { using Error::Error; };
struct TooFewSegments : Error { using Error::Error; };
struct AllZeroMatrix : Error { using Error::Error; };
struct EmptyImage : Error { using Error::Error; };
struct NonPositiveDepth : Error { using Error::Error; };
struct WindowLargerThanImage : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidGeometry : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct PlacementFailed : Error { using Error::Error; };
struct MissingTruth : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace tanglemap
