#pragma once

#include <stdexcept>
#include <string>

namespace stab {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed frame, pyramid, or stream data.
struct InvalidInputError : Error {
    using Error::Error;
};

// A tunable outside its documented range.
struct InvalidConfigError : Error {
    using Error::Error;
};

// Non-finite parameters or non-positive scale in a transform.
struct InvalidTransformError : Error {
    using Error::Error;
};

// Too few or coincident point pairs for estimation.
struct DegenerateInputError : Error {
    using Error::Error;
};

// Frames presented out of index order.
struct SequencingError : Error {
    using Error::Error;
};

// File or stream failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace stab
