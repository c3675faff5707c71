#pragma once

#include <stdexcept>

namespace nmfinit {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad caller input: dimensions, malformed files, negative data. The CLI maps
// these to exit code 2.
struct InputError : Error {
    using Error::Error;
};

struct DimensionMismatch : InputError {
    using InputError::InputError;
};
struct RankTooLarge : InputError {
    using InputError::InputError;
};
struct EmptyMatrix : InputError {
    using InputError::InputError;
};
struct ZeroInputNorm : InputError {
    using InputError::InputError;
};
struct ZeroColumn : InputError {
    using InputError::InputError;
};
struct ParseError : InputError {
    using InputError::InputError;
};
struct NegativeEntry : InputError {
    using InputError::InputError;
};
struct MixedDimensions : InputError {
    using InputError::InputError;
};
struct UnreadableFile : InputError {
    using InputError::InputError;
};

// An iterative routine hit its iteration cap before reaching the requested
// tolerance. The CLI maps this to exit code 3.
struct ConvergenceFailure : Error {
    using Error::Error;
};

}  // namespace nmfinit
