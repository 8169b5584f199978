#pragma once
#include <stdexcept>
#include <string>

namespace egad {

// Error classes map to process exit codes in the CLI:
// config 2, ingestion 3, dependency 4, numerical 5, anything else 1.
struct EgadError : std::runtime_error {
    explicit EgadError(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const { return 1; }
};

struct ConfigError : EgadError {
    using EgadError::EgadError;
    int exit_code() const override { return 2; }
};

struct IngestError : EgadError {
    using EgadError::EgadError;
    int exit_code() const override { return 3; }
};

struct DependencyError : EgadError {
    using EgadError::EgadError;
    int exit_code() const override { return 4; }
};

struct NumericalError : EgadError {
    using EgadError::EgadError;
    int exit_code() const override { return 5; }
};

// contract violations (bad shapes, bad arguments); exit code 1
struct DimensionError : EgadError {
    using EgadError::EgadError;
};

struct InputError : EgadError {
    using EgadError::EgadError;
};

struct DomainError : EgadError {
    using EgadError::EgadError;
};

struct UsageError : EgadError {
    using EgadError::EgadError;
};

} // namespace egad
