#pragma once

#include <array>
#include <string>
#include <vector>

#include "tctank/errors.hpp"

namespace tctank {

// det K at or below this is treated as zero: the coupling matrix is
// rank-deficient and the highest resonance degenerates.
inline constexpr double det_k_tolerance = 1e-12;

enum class LossMode { lossless, series_resistance, q_at_reference };

// Branch loss description. Series resistances are frequency independent.
// q_at_reference converts per-coil quality factors at one reference
// frequency into equivalent series resistances r_i = 2*pi*f_ref*L_i/Q_i.
struct LossSpec {
    LossMode mode = LossMode::lossless;
    double r1 = 0.0, r2 = 0.0, r3 = 0.0; // ohms
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
    double f_ref_hz = 0.0;

    static LossSpec lossless();
    static LossSpec series(double r1, double r2, double r3);
    static LossSpec q_at(double q1, double q2, double q3, double f_ref_hz);
};

// Electrical description of the three magnetically coupled LC branches.
// Branch 1 carries the differential input port; branches 2 and 3 are
// floating LC loops closed through their own capacitors. SI base units
// throughout: henries, farads, dimensionless k.
struct TankParams {
    double l1 = 0, l2 = 0, l3 = 0;
    double c1 = 0, c2 = 0, c3 = 0;
    double k12 = 0, k13 = 0, k23 = 0;
    LossSpec loss;
};

struct ValidationReport {
    bool ok = false;
    double det_k = 0.0;
    std::vector<std::string> violations;
};

struct Mutuals {
    double m12 = 0, m13 = 0, m23 = 0; // henries
};

// Uncoupled per-branch resonant frequencies 1/sqrt(L_i*C_i), rad/s.
struct UncoupledFrequencies {
    double nu1 = 0, nu2 = 0, nu3 = 0;
};

// Determinant of the normalized coupling matrix
//   [ 1   k12  k13 ]
//   [ k12  1   k23 ]
//   [ k13  k23  1  ]
// Positive exactly when the three-coil inductance matrix is positive
// definite, i.e. when the coil set is physically realizable.
double coupling_det(double k12, double k13, double k23);

// Collects every violated invariant instead of stopping at the first.
// Never throws.
ValidationReport validate(const TankParams& p);

// M_ij = k_ij * sqrt(L_i * L_j). Requires positive inductances.
Mutuals mutual_inductances(const TankParams& p);

UncoupledFrequencies uncoupled_frequencies(const TankParams& p);

// Effective series resistance per branch implied by the loss spec.
std::array<double, 3> series_resistances(const TankParams& p);

// Parse "300p", "146.6f", "24G" or a plain decimal into an SI value.
// Recognized suffixes (case sensitive): f p n u m k M G.
double parse_quantity(const std::string& text);

// Canonical JSON: plain decimal SI values, alphabetically ordered keys.
// Identical parameter sets serialize to identical bytes.
std::string to_json_string(const TankParams& p);

// Accepts numbers or engineering-notation strings for unit-bearing fields.
// A JSON object carrying a "params" member (e.g. a saved design result) is
// unwrapped transparently.
TankParams params_from_json_string(const std::string& text);

// Stable 16-hex-digit identifier of a parameter set: FNV-1a (64 bit) over
// the canonical JSON text.
std::string params_digest(const TankParams& p);

} // namespace tctank
