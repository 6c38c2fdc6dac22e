#pragma once

#include <stdexcept>
#include <string>

namespace wvar {

/// Base of every error raised by the library. Carries the originating module
/// name so front ends can report "module: message".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Caller passed an argument outside an operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data is missing, malformed, or violates a data invariant.
class DataError : public Error {
public:
    using Error::Error;
};

/// A computation produced a nonfinite value or a system could not be solved.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace wvar
