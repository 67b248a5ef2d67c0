#pragma once

#include <stdexcept>
#include <string>

namespace countdist {

// Error taxonomy shared by the library and the CLI exit codes:
// input errors -> 2, capacity guards -> 3, internal invariant violations -> 4.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a matrix handed to an extremeness test is not even a member of
// the polytope. Distinct from a negative ("member but not extreme") answer.
class MembershipError : public InputError {
public:
    explicit MembershipError(const std::string& msg) : InputError(msg) {}
};

}  // namespace countdist
