#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace probekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (files, shapes, configuration).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A probe or projection failed to train (single-class labels, divergence, ...).
class TrainingError : public Error {
public:
    using Error::Error;
};

/// Binary class id. Always 0 or 1 once validated.
using Label = int;

}  // namespace probekit
