#pragma once

#include <stdexcept>
#include <string>

namespace intentflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Misconfiguration detected before any backend traffic (unbound template
// placeholders, bad config files, invalid flags).
class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Raised by evaluation steps that need artifacts only some methods produce.
class UnsupportedMethodError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    BackendError(std::string message, bool transient)
        : Error(std::move(message)), transient_(transient) {}

    [[nodiscard]] bool transient() const noexcept { return transient_; }

private:
    bool transient_;
};

}  // namespace intentflow
