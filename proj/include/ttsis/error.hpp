#pragma once

#include <stdexcept>
#include <string>

namespace ttsis {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed network or observation text.
class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EigenSolverError : public Error {
public:
    using Error::Error;
};

/// Requested dense object would exceed the supported state-space size.
class MemoryGuardError : public Error {
public:
    using Error::Error;
};

/// Forward solver failure (substep cap, non-finite values).
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace ttsis
