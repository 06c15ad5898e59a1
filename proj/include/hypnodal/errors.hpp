#pragma once

#include <stdexcept>
#include <string>

namespace hypnodal {

/// Point on or outside the unit circle, or a topology outside the supported range.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Coincident points, zero vectors and similar inputs with no well-defined answer.
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FeasibilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptySystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class GluingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedSystemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hypnodal
