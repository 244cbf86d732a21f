#pragma once

#include <stdexcept>
#include <string>

namespace qcollapse {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix/vector dimensions are incompatible with the operation.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

/// A requested dimension exceeds the configured maximum.
class SizeError : public Error {
public:
    explicit SizeError(const std::string& what) : Error(what) {}
};

/// A factor, site, or component index is out of range.
class IndexError : public Error {
public:
    explicit IndexError(const std::string& what) : Error(what) {}
};

/// An input fails its structural invariant (not Hermitian, not a
/// projector, not unitary, not finite, ...). Inputs are rejected,
/// never repaired.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// A state with non-positive total weight cannot answer questions.
class DegenerateStateError : public Error {
public:
    explicit DegenerateStateError(const std::string& what) : Error(what) {}
};

} // namespace qcollapse
