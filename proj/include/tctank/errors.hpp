#pragma once

#include <stdexcept>
#include <string>

namespace tctank {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters violate a documented precondition; the message lists the
// offending field(s).
class InvalidParams : public Error {
public:
    using Error::Error;
};

// Lossless evaluation requested exactly at (or within flagging distance of)
// a differential-mode resonance, where the input impedance is unbounded.
class PoleAtFrequency : public Error {
public:
    PoleAtFrequency(const std::string& what, double freq_hz)
        : Error(what), freq_hz(freq_hz) {}
    double freq_hz;
};

// The closed-form effective-impedance denominator is zero: the requested
// frequency is a resonance of the coupled 2-3 sub-network.
class InternalPole : public Error {
public:
    InternalPole(const std::string& what, double freq_hz)
        : Error(what), freq_hz(freq_hz) {}
    double freq_hz;
};

// The branch equation system is numerically singular away from any known
// resonance; the tank description itself is suspect.
class SingularSystem : public Error {
public:
    using Error::Error;
};

// The characteristic cubic produced roots that are not real positive squared
// frequencies. Unreachable for a realizable tank.
class ComplexRoots : public Error {
public:
    using Error::Error;
};

// The impedance-pole search could not isolate the expected number of sign
// changes even after grid refinement.
class BracketingFailure : public Error {
public:
    using Error::Error;
};

// A configuration file or CLI input could not be parsed or failed strict
// key checking.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace tctank
