#pragma once

#include <stdexcept>
#include <string>

namespace hmit {

// Malformed input files or inconsistent data (bad CSV, schema mismatch).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters outside their documented domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An imputation that cannot produce a value (attribute unknown everywhere).
class ImputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hmit
