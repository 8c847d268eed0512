#pragma once

#include <stdexcept>
#include <string>

namespace qamp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Qubit count outside the supported range.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Dimension mismatch between a state and a mask (or similar pair).
class ShapeError : public Error {
public:
    using Error::Error;
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

/// Decomposition requested against an empty or full mask.
class DegenerateDecompositionError : public Error {
public:
    using Error::Error;
};

/// Search asked to amplify an empty marked set.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class InvalidParamsError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Recommendation could not collect enough distinct items within the resample cap.
class UnderAmplifiedError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace qamp
