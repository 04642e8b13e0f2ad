#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aqa {

/// Base of every error thrown by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates an operation's precondition (bad argument, bad config).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Structured text (a record, an LLM response, a persisted file) could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A required artifact, slot or entity does not exist.
class NotFound : public Error {
public:
    using Error::Error;
};

/// Network failure talking to an external provider. Retriable.
class TransportError : public Error {
public:
    TransportError(const std::string& what, std::size_t attempts)
        : Error(what + " (after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}

    std::size_t attempts() const noexcept { return attempts_; }

private:
    std::size_t attempts_;
};

}  // namespace aqa
