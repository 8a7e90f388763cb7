// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace siamcut {

// Root of every error thrown by the library. The CLI maps the subclasses
// onto process exit codes (see ErrorCategory).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ErrorCategory { Usage = 1, Data = 2, Numerical = 3 };

/// Bad argument to an operation (wrong channel count, even kernel, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Configuration file or override problem. `block_index` is set when the
/// error is attributable to one backbone block.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, int block_index = -1)
        : Error(block_index >= 0 ? "block " + std::to_string(block_index) + ": " + what : what),
          block_index_(block_index) {}
    int block_index() const noexcept { return block_index_; }

private:
    int block_index_;
};

/// Otsu on an image whose histogram has a single populated bin.
class DegenerateHistogram : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Anything wrong with data on disk: images, manifests, checkpoints.
class DataError : public Error {
public:
    using Error::Error;
};

class MalformedHeader : public DataError {
public:
    using DataError::DataError;
};

class UnsupportedFormat : public DataError {
public:
    using DataError::DataError;
};

class TruncatedFile : public DataError {
public:
    using DataError::DataError;
};

class BadMagic : public DataError {
public:
    using DataError::DataError;
};

class CheckpointShapeMismatch : public DataError {
public:
    using DataError::DataError;
};

class ManifestError : public DataError {
public:
    using DataError::DataError;
};

inline ErrorCategory categorize(const Error& e) {
    if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const DegenerateHistogram*>(&e) ||
        dynamic_cast<const SamplingError*>(&e))
        return ErrorCategory::Data;
    if (dynamic_cast<const NumericalError*>(&e)) return ErrorCategory::Numerical;
    return ErrorCategory::Usage;
}

}  // namespace siamcut
