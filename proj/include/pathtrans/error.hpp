#pragma once

#include <stdexcept>
#include <string>

namespace pathtrans {

enum class ErrorKind {
    Config,       // malformed input, bad parameters, validation failures
    Syntax,       // expression parse errors
    Domain,       // parameter outside a path domain, mismatched endpoints
    Evaluation,   // unbound variable, non-real argument where a real one is required
    Singularity,  // division by zero, ln(0), field singular set, singular matrix
    Numerical,    // non-finite intermediate values
    Gate          // existence gate failed (non-flat region, path dependence)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string location = {})
        : std::runtime_error(message), kind_(kind), location_(std::move(location)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& location() const { return location_; }

private:
    ErrorKind kind_;
    std::string location_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, std::string location = {}) {
    throw Error(kind, message, std::move(location));
}

}  // namespace pathtrans
