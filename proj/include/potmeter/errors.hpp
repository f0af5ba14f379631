#pragma once

#include <stdexcept>
#include <string>

namespace potmeter {

// Base for every failure this library raises on purpose.  Catching
// potmeter::Error at the CLI boundary separates "the physics request was
// invalid" from genuine bugs (which surface as other exception types).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two states / fields defined on different grids were combined.
struct GridMismatch : Error {
    using Error::Error;
};

// A requested plane wave does not fit the ring periodically.
struct IncommensurateMode : Error {
    using Error::Error;
};

// A Gaussian packet narrower than the lattice can represent.
struct DegenerateWidth : Error {
    using Error::Error;
};

// Loop integral of A on a ring is not an integer number of flux quanta,
// so exp(i q/hbar * cumulative integral) would be discontinuous at the seam.
struct FluxMismatch : Error {
    using Error::Error;
};

// A ring-only operation (loop flux, seam twist, ...) was asked of an open grid.
struct NotARing : Error {
    using Error::Error;
};

// The density mask rejected every site (possible only for a zero state).
struct AllMasked : Error {
    using Error::Error;
};

// Weak-value -> wavefunction inversion needs a nonzero mean amplitude.
struct ZeroOverlap : Error {
    using Error::Error;
};

// The pointer grid cannot hold all shifted meter components plus tails.
struct PointerGridTooNarrow : Error {
    using Error::Error;
};

// Post-selection on an exactly-zero-probability outcome.
struct ZeroProbability : Error {
    using Error::Error;
};

// Weak-value estimators divide by the coupling; g = 0 is not estimable.
struct ZeroCoupling : Error {
    using Error::Error;
};

// A below-threshold site was used where the first-order meter formula
// would divide by (nearly) zero density.
struct MaskedSite : Error {
    using Error::Error;
};

// A seam flux twist was requested on a grid without a seam.
struct TwistOnOpenGrid : Error {
    using Error::Error;
};

// The tridiagonal solve met an (effectively) zero pivot.
struct SolverBreakdown : Error {
    using Error::Error;
};

// A scenario file problem; key_path names the offending key.
struct ConfigError : Error {
    ConfigError(const std::string& key, const std::string& what)
        : Error("config error at '" + key + "': " + what), key_path(key) {}
    std::string key_path;
};

}  // namespace potmeter
