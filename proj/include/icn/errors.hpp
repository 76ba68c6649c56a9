// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace icn {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not reach its accuracy target.
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// Winding geometry is invalid (colliding turns, degenerate filaments, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A reduction step hit a singular or non-physical matrix.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Field probe too close to a conductor.
class ProximityError : public Error {
public:
    using Error::Error;
};

/// Circuit topology cannot realize the requested scheme.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Configuration document is malformed, incomplete or has unknown keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Coupling sign incompatible with the requested scheme.
class SignError : public Error {
public:
    using Error::Error;
};

/// MNA system is singular; carries the node names involved.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, std::vector<std::string> nodes)
        : Error(what), nodes_(std::move(nodes)) {}
    const std::vector<std::string>& nodes() const noexcept { return nodes_; }

private:
    std::vector<std::string> nodes_;
};

}  // namespace icn
