#pragma once

#include <stdexcept>
#include <string>

namespace vmad {

// Error taxonomy shared by the library and the CLI exit codes.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values produced where finite numbers are required
// (e.g. a velocity field returning NaN/Inf).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A metric that is undefined for the given inputs (single-class labels,
// no positives, no anomalous regions).
class undefined_metric : public std::invalid_argument {
public:
    explicit undefined_metric(const std::string& msg) : std::invalid_argument(msg) {}
};

enum class exit_code : int {
    ok = 0,
    failure = 1,
    invalid_argument = 2,
    io = 3,
    numeric = 4,
    check_failure = 5,
};

} // namespace vmad
