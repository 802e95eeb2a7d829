#pragma once

#include <stdexcept>
#include <string>

namespace critspectra {

// Exit-code contract of the command line tool:
//   0 success, 2 config error, 3 precondition error, 4 numerical failure.

/// Malformed or incomplete configuration (file or flags).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A run was rejected before allocation because it would exhaust memory.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates an operation precondition (domain errors also map here).
class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical procedure failed to converge or produced unusable output.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}
