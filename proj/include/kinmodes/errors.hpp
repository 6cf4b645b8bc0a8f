#pragma once

#include <stdexcept>
#include <string>

namespace kinmodes {

// Error hierarchy. Everything derives from Error so callers can catch the
// whole family; the CLI maps ParameterDomain (and friends) to exit code 3
// and ConfigError to exit code 2.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterDomain : Error {
    using Error::Error;
};

struct NormalizationFailure : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct InsufficientRange : Error {
    using Error::Error;
};

struct NonPositiveValue : Error {
    using Error::Error;
};

struct CountMismatch : Error {
    using Error::Error;
};

struct RootNotConverged : Error {
    using Error::Error;
};

struct RootCollision : Error {
    using Error::Error;
};

struct BranchJump : Error {
    using Error::Error;
};

struct DegenerateNullspace : Error {
    using Error::Error;
};

struct EigendecompositionFailure : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace kinmodes
