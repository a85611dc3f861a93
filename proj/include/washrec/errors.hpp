#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace washrec {

// Base class for all data and validation failures raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration is rejected before any computation starts. CLI maps this to
// exit code 1, every other Error to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// --- ingest ---
struct MalformedRow : Error {
    MalformedRow(std::size_t line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_no(line) {}
    std::size_t line_no;
};
struct WrongChannelCount : Error { using Error::Error; };
struct NonMonotonicTimestamps : Error { using Error::Error; };
struct ChannelMismatch : Error { using Error::Error; };
struct CalibTooShort : Error { using Error::Error; };
struct AnnotationOutOfRange : Error { using Error::Error; };
struct OverlappingAnnotations : Error { using Error::Error; };

// --- windowing ---
struct TraceTooShort : Error { using Error::Error; };
struct NoMinorityClass : Error { using Error::Error; };
struct ClassTooSmall : Error { using Error::Error; };
struct TooFewSubjects : Error { using Error::Error; };

// --- features ---
struct SeriesTooShort : Error { using Error::Error; };
struct DegenerateSignal : Error { using Error::Error; };
struct EmptyTrainingSet : Error { using Error::Error; };

// --- gaf ---
struct OutOfRange : Error { using Error::Error; };
struct BadTargetLength : Error { using Error::Error; };

// --- classifiers ---
struct SingleClass : Error { using Error::Error; };
struct NonFiniteFeature : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SubspaceTooLarge : Error { using Error::Error; };

// --- evaluation ---
struct LengthMismatch : Error { using Error::Error; };
struct UnknownLabel : Error { using Error::Error; };
struct EmptyMatrix : Error { using Error::Error; };
struct NoDiscordantPairs : Error { using Error::Error; };
struct MisalignedPredictions : Error { using Error::Error; };

// --- synthgen ---
struct BadSpec : Error { using Error::Error; };

}  // namespace washrec
