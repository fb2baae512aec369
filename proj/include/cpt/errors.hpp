#pragma once

#include <stdexcept>
#include <string>

namespace cpt {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct SingularFactor : Error {
    using Error::Error;
};

struct SingleClassTrainingSet : Error {
    using Error::Error;
};

struct KTooLarge : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct FoldTooSmall : Error {
    using Error::Error;
};

struct DegenerateBandwidth : Error {
    using Error::Error;
};

struct PointOutsideSupportOfF : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct EmptyVocabulary : Error {
    using Error::Error;
};

// Generic precondition violation (bad sizes, non-finite input, invalid knobs).
struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace cpt
