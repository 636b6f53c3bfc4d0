#pragma once

#include <stdexcept>
#include <string>

namespace ldct {

// Typed failures; the CLI maps categories onto exit codes.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ct-io
struct MalformedFile : DataError { using DataError::DataError; };
struct MissingTag : DataError { using DataError::DataError; };
struct UnsupportedEncoding : DataError { using DataError::DataError; };
struct DegenerateRange : ConfigError { using ConfigError::ConfigError; };
struct IndexOutOfRange : DataError { using DataError::DataError; };
struct BadMagic : DataError { using DataError::DataError; };
struct DimMismatch : DataError { using DataError::DataError; };
struct TruncatedPayload : DataError { using DataError::DataError; };
struct EmptyDataset : DataError { using DataError::DataError; };

// model-core
struct SpecMismatch : ConfigError { using ConfigError::ConfigError; };
struct ShapeMismatch : DataError { using DataError::DataError; };
struct AlreadyInflated : ConfigError { using ConfigError::ConfigError; };
struct SpecHashMismatch : ConfigError { using ConfigError::ConfigError; };

// training
struct NonFiniteLoss : NumericError { using NumericError::NumericError; };

// metrics
struct ZeroVariance : NumericError { using NumericError::NumericError; };
struct OverlappingROIs : ConfigError { using ConfigError::ConfigError; };
struct ImageTooSmall : DataError { using DataError::DataError; };

} // namespace ldct
