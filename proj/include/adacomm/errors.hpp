#pragma once

#include <stdexcept>
#include <string>

namespace adacomm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A segmentation window captured no samples (sampling-rate/config mismatch).
struct EmptyWindowError : Error {
    using Error::Error;
};

// Schedule entry lies outside the scenario duration.
struct ScheduleOutOfRangeError : Error {
    using Error::Error;
};

// Frame shorter than the widest convolution filter; caller must reject.
struct FrameTooShortError : Error {
    using Error::Error;
};

// An SGD update produced a non-finite parameter.
struct NonFiniteUpdateError : Error {
    using Error::Error;
};

// Training data contains only one symbol class.
struct SingleClassDatasetError : Error {
    using Error::Error;
};

// Not enough samples to binarize the requested number of windows.
struct InsufficientSamplesError : Error {
    using Error::Error;
};

// Correlation inputs of different length.
struct LengthMismatchError : Error {
    using Error::Error;
};

// Trace ends before the training-sequence payload completes.
struct TruncatedSequenceError : Error {
    using Error::Error;
};

// No training-sequence preamble found within the scan budget.
struct PreambleNotFoundError : Error {
    using Error::Error;
};

// compare() configs do not share scenario and seeds.
struct MismatchedScenariosError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace adacomm
