#pragma once

#include <stdexcept>
#include <string>

namespace fedsim {

/// Mismatched vector/matrix dimensions.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration or construction parameter.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A computation produced NaN or Inf where a finite value is required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterate became non-finite during optimization. Carries the location
/// so step-size sweeps can tell divergence apart from plain slowness.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, int round, int client, int step)
        : std::runtime_error(what), round(round), client(client), step(step) {}
    int round = -1;
    int client = -1;
    int step = -1;
};

/// Operation not supported by this objective (e.g. Hessian of a non-quadratic).
struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Violation of the client/server aggregation protocol.
struct ProtocolError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A metric was requested from data that cannot define it.
struct UndefinedMetricError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Bad experiment config; `field` holds the offending field path.
struct ConfigError : std::invalid_argument {
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field(field) {}
    std::string field;
};

/// Filesystem failure while reading or writing experiment artifacts.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedsim
