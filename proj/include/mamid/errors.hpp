#pragma once

#include <stdexcept>
#include <string>

namespace mamid {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape mismatch or invalid architecture (zero-sized layer, bad batch width).
struct DimensionError : Error {
    using Error::Error;
};

/// Hyperparameter combination that cannot be trained (e.g. softmax on one
/// unit, non-probabilistic output activation paired with a cross-entropy loss).
struct IncompatibleConfigError : Error {
    using Error::Error;
};

/// NaN/Inf reached a place it must not (activation input, gradient).
struct NumericError : Error {
    using Error::Error;
};

/// Training produced a non-finite loss or parameter.
struct TrainingDivergedError : Error {
    int epoch;
    TrainingDivergedError(int epoch_idx, const std::string& msg)
        : Error(msg), epoch(epoch_idx) {}
};

/// CSV header/structure problems.
struct SchemaError : Error {
    using Error::Error;
};

/// Unknown or inconsistent label value.
struct LabelError : Error {
    using Error::Error;
};

/// Dataset content problems (empty feature space, empty input).
struct DataError : Error {
    using Error::Error;
};

/// File read/write failures.
struct IoError : Error {
    using Error::Error;
};

/// Generic precondition violation (epochs = 0, fraction out of range, ...).
struct InvalidArgumentError : Error {
    using Error::Error;
};

}  // namespace mamid
