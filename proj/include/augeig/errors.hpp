#pragma once

#include <stdexcept>
#include <string>

namespace augeig {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or index contract violations (mismatched dimensions, bad ranges).
struct DimensionError : Error {
    using Error::Error;
};

// A matrix required to be SPD failed a Cholesky or pivot test.
struct IndefiniteError : Error {
    using Error::Error;
};

// A factorization or small solve hit a (numerically) singular matrix.
struct SingularError : Error {
    using Error::Error;
};

// Invalid mesh input: non-conforming, inverted, or inconsistent arrays.
struct MeshError : Error {
    using Error::Error;
};

// Spaces passed to prolongation are not related by refinement.
struct NestingError : Error {
    using Error::Error;
};

// An input block lost rank (e.g. after orthogonalization dropped columns).
struct DegenerateInputError : Error {
    using Error::Error;
};

// A spectral shift coincides with an eigenvalue to working precision.
struct ShiftProximityError : Error {
    using Error::Error;
};

// A batch failed to capture its target eigenpairs after retries.
struct CaptureError : Error {
    using Error::Error;
};

// Bad configuration file or option value.
struct ConfigError : Error {
    using Error::Error;
};

// File I/O or format problems (Matrix Market, CSV, config files).
struct IoError : Error {
    using Error::Error;
};

}  // namespace augeig
