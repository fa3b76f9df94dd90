#pragma once

#include <stdexcept>
#include <string>

namespace wmark {

// Failure categories; the CLI maps these one-to-one onto exit codes.
enum class ErrorKind {
    Usage,       // bad arguments or violated preconditions
    Capacity,    // payload does not fit the host
    Format,      // file or container problems
    Extraction,  // strict-mode extraction integrity failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace wmark
