#pragma once

#include <stdexcept>
#include <string>

namespace lund {

// Base class for everything this library throws on its own behalf.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParameterError : Error {
    using Error::Error;
};

// A graph row has no usable weight mass (isolated point).
struct DegenerateGraphError : Error {
    using Error::Error;
};

// The weighted graph is disconnected; the message lists the components.
struct ReducibleChainError : Error {
    using Error::Error;
};

// Operation requires a reversible chain and the input is not one.
struct UnsupportedChainError : Error {
    using Error::Error;
};

// Solver failed to reach its tolerance; message carries the residual.
struct NumericalError : Error {
    using Error::Error;
};

// Model-order estimation could not produce an answer (e.g. threshold never crossed).
struct EstimationFailureError : Error {
    using Error::Error;
};

// A needed ratio denominator is zero.
struct DegenerateScoreError : Error {
    using Error::Error;
};

// Parameter outside the supported range of an exact/bruteforce routine.
struct UnsupportedParameterError : Error {
    using Error::Error;
};

// Instance too large for a bruteforce diagnostic.
struct UnsupportedSizeError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace lund
