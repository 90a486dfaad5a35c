#pragma once

#include <stdexcept>
#include <string>

namespace lcmflow {

/// Malformed input data (bad magic, truncated payload, unsupported channel layout).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raster or field dimensions that do not agree or are too small for an operation.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter combinations.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values produced during assembly or iteration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lcmflow
