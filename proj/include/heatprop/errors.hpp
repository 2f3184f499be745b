// Error taxonomy shared by the library and the command line tool.
#pragma once

#include <stdexcept>
#include <string>

namespace heatprop {

// Bad invocation: unknown flag combinations, out-of-range parameters.
// Maps to process exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (graph files, label files).
// Maps to process exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: divergent iteration, unsatisfiable solve, invalid
// operator state. Maps to process exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace heatprop
