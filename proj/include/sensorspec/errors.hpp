#pragma once

#include <stdexcept>
#include <string>

namespace sensorspec {

// Base class for everything thrown by the engine, so callers can catch
// engine failures separately from std library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- linear algebra ---
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NonHermitianInput : Error {
    using Error::Error;
};

// --- bath kernels ---
struct NegativeFrequency : Error {
    using Error::Error;
};
struct NonPositiveFrequency : Error {
    using Error::Error;
};
struct QuadratureNonConvergence : Error {
    using Error::Error;
};

// --- model assembly ---
struct TooManySensors : Error {
    using Error::Error;
};

// --- generator / steady state ---
struct NegativeRate : Error {
    using Error::Error;
};
struct NonHermitianCoupling : Error {
    using Error::Error;
};
struct DegenerateKernel : Error {
    using Error::Error;
};
struct SingularSolve : Error {
    using Error::Error;
};
struct StepSizeTooLarge : Error {
    using Error::Error;
};

// --- spectra ---
struct DuplicateSensorIndex : Error {
    using Error::Error;
};
struct AxisMismatch : Error {
    using Error::Error;
};
struct PeaksNotFound : Error {
    using Error::Error;
};

// --- configuration / I/O ---
struct ParseError : Error {
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};
struct ValidationError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace sensorspec
