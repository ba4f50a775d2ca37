#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bisched {

enum class ErrorCode {
    InvalidPayload,
    EmptyAggregate,
    DelimiterOverflow,
    MixedTid,
    MixedDestination,
    MixedReceiver,
    TooManyMpdus,
    LimitExceeded,
    TruncatedSubframe,
    SeqOutOfWindow,
    PreconditionFailed,
    ConfigInvalid,
    ParseError,
    ValidationError,
    InvariantViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised by the scenario loader for malformed lines.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message),
          line_(line), message_(message) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

// Raised when a parsed value violates a field invariant; key is "section.field".
class ValidationError : public Error {
public:
    ValidationError(std::string key, std::string reason)
        : Error(ErrorCode::ValidationError, key + ": " + reason),
          key_(std::move(key)), reason_(std::move(reason)) {}

    const std::string& key() const noexcept { return key_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

}  // namespace bisched
