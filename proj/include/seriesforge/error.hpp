#pragma once

#include <stdexcept>
#include <string>

namespace seriesforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not satisfy a primitive's or operation's shape rule.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input outside the mathematical domain of a primitive (e.g. sqrt of a negative).
class DomainError : public Error {
public:
    using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// Malformed text input (CSV, JSON config).
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Binary artifact failed its integrity checks.
class CorruptionError : public Error {
public:
    using Error::Error;
};

class VersionError : public CorruptionError {
public:
    using CorruptionError::CorruptionError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss.
class TrainingError : public Error {
public:
    TrainingError(std::string phase, std::string term, const std::string& detail)
        : Error(phase + ": non-finite " + term + (detail.empty() ? "" : " (" + detail + ")")),
          phase_(std::move(phase)),
          term_(std::move(term)) {}

    const std::string& phase() const noexcept { return phase_; }
    const std::string& term() const noexcept { return term_; }

private:
    std::string phase_;
    std::string term_;
};

}  // namespace seriesforge
