#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Base of every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid model or Hamiltonian parameters.
struct ParamError : Error {
    using Error::Error;
};

/// A symbolic expansion produced terms outside the sector (negative powers of x).
struct AssemblyError : Error {
    using Error::Error;
};

/// The assembled operator does not preserve span(1, x, ..., x^N).
struct SubspaceLeak : Error {
    using Error::Error;
};

/// An eigenvector has no usable leading coefficient, so no monic phi exists.
struct DegenerateEigenvector : Error {
    using Error::Error;
};

/// Two Bethe roots coincide to within the collision radius.
struct CollidingRoots : Error {
    using Error::Error;
};

/// Factorial or binomial intermediates left the representable range.
struct OverflowGuard : Error {
    using Error::Error;
};

/// Closed forms are only tabulated for N <= 1.
struct Unsupported : Error {
    using Error::Error;
};

struct NonHermitianInput : Error {
    using Error::Error;
};

/// An oracle eigenvector has weight in both parity classes.
struct MixedParity : Error {
    using Error::Error;
};

/// Scan grid is unsorted, too short, or has invalid step data.
struct GridError : Error {
    using Error::Error;
};

/// An output file could not be opened or written.
struct IoError : Error {
    using Error::Error;
};

} // namespace qes
