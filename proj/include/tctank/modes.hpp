#pragma once

#include <vector>

#include "tctank/tank.hpp"

namespace tctank {

// Adjacent modes closer than this relative spacing are flagged degenerate.
inline constexpr double degenerate_mode_spacing = 1e-9;

// Coefficients of the characteristic equation in x = omega^2, written with
// the alternating signs fixed by construction:
//
//   c3*x^3 - c2*x^2 + c1*x - c0 = 0
//
//   c3 = det K (dimensionless)
//   c2 = (1-k12^2)*nu3^2 + (1-k13^2)*nu2^2 + (1-k23^2)*nu1^2
//   c1 = nu1^2*nu2^2 + nu1^2*nu3^2 + nu2^2*nu3^2
//   c0 = nu1^2 * nu2^2 * nu3^2
//
// with nu_i = 1/sqrt(L_i*C_i). All four are positive for a valid tank, which
// forces three positive real roots (the squared mode frequencies).
struct CubicCoefficients {
    double c3 = 0, c2 = 0, c1 = 0, c0 = 0;
};

enum class ModeMethod { closed_form, numerical_oracle, impedance_poles };

// Resonance mode frequencies, ascending. When det K collapses below
// det_k_tolerance the leading coefficient vanishes, the top mode escapes to
// infinity, and only the two quadratic modes are reported with
// cubic_degenerate set.
struct ModeSet {
    std::vector<double> omega;    // rad/s, ascending
    std::vector<bool> degenerate; // degenerate[i]: omega[i] is within
                                  // degenerate_mode_spacing of a neighbor
    bool cubic_degenerate = false;
    ModeMethod method = ModeMethod::numerical_oracle;
};

// Which coefficient the trigonometric root formula places in the root
// denominators (and squares in the arccos numerator). c3_denominator is the
// form that follows from the characteristic equation and is the only
// dimensionally consistent choice; c1_denominator reproduces a variant seen
// in print and is kept so the disagreement can be demonstrated. On generic
// coupled tanks the variant drives the arccos argument outside [-1, 1].
enum class CubicPlacement { c3_denominator, c1_denominator };

CubicCoefficients characteristic_coefficients(const TankParams& p);

// Trigonometric (Cardano-Viete) solution of the characteristic cubic.
// Returns the three modes sorted ascending, or the two quadratic modes with
// cubic_degenerate set when c3 falls below det_k_tolerance.
ModeSet modes_closed_form(
    const CubicCoefficients& c,
    CubicPlacement placement = CubicPlacement::c3_denominator);

// Independent numerical oracle: eigenvalues of the scaled companion matrix,
// Newton-polished. The cubic route shares no code with modes_closed_form
// (the two-mode degenerate fallback is common).
ModeSet modes_numerical(const CubicCoefficients& c);

// Third route, bypassing the characteristic equation entirely: locates the
// poles of the lossless input impedance as the upward zero crossings of the
// input susceptance, by bracketing and bisection.
ModeSet modes_from_impedance(const TankParams& p);

// Largest relative per-mode difference between two sets. Infinity if the
// sets have different mode counts.
double mode_agreement_rel_err(const ModeSet& a, const ModeSet& b);

} // namespace tctank
