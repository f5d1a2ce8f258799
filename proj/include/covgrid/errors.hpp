#pragma once

#include <stdexcept>
#include <string>

namespace covgrid {

// Exit-code conventions used by the CLI:
//   2 = bad input (parse errors, unsupported dimensions, infeasible requests)
//   3 = resource limit (cell cap / memory hint exceeded)
// Verification failures are reported results, not exceptions.

enum class ErrorKind {
    EmptyDomain,
    Disconnected,
    MalformedInput,
    DimensionUnsupported,
    Infeasible,
    DomainTooSmall,
    NonpositiveRadius,
    SamePosition,
    MalformedDescriptor,
    BadBoundaryDimension,
    UnknownBoundaryId,
    NotAcyclic,
    BadArgument,
};

class InputError : public std::runtime_error {
public:
    InputError(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    static constexpr int exit_code = 2;

private:
    ErrorKind kind_;
};

class ResourceLimitError : public std::runtime_error {
public:
    ResourceLimitError(const std::string& msg, const std::string& suggestion)
        : std::runtime_error(msg), suggestion_(suggestion) {}
    const std::string& suggestion() const { return suggestion_; }
    static constexpr int exit_code = 3;

private:
    std::string suggestion_;
};

} // namespace covgrid
