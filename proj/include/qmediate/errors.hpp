#pragma once

#include <stdexcept>
#include <string>

namespace qmediate {

// Exception taxonomy mirrors the CLI exit-code contract:
//   ConfigError -> 1, DataError family -> 2, NumericGateError -> 3.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IngestError : DataError {
    using DataError::DataError;
};

struct PairingError : DataError {
    using DataError::DataError;
};

struct SplitError : DataError {
    using DataError::DataError;
};

struct PreprocessError : DataError {
    using DataError::DataError;
};

// A run-level numerical diagnostic (consistency or purity check) left its
// configured tolerance.
struct NumericGateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qmediate
