#pragma once

#include <stdexcept>
#include <string>

namespace hjb {

/// Bad user-facing configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mathematical precondition failed on otherwise valid input (exit code 2).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateMatrix : public DomainError {
public:
    using DomainError::DomainError;
};

class NotPositiveSemidefinite : public DomainError {
public:
    using DomainError::DomainError;
};

class BlowUp : public DomainError {
public:
    using DomainError::DomainError;
};

class NotCovered : public DomainError {
public:
    using DomainError::DomainError;
};

class CflViolation : public DomainError {
public:
    CflViolation(const std::string& what, long required_nt)
        : DomainError(what), required_nt_(required_nt) {}
    long required_nt() const noexcept { return required_nt_; }

private:
    long required_nt_;
};

/// A checked invariant of a computed result did not hold (exit code 3).
class InvariantFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hjb
