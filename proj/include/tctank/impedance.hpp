#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "tctank/tank.hpp"

namespace tctank {

// Lossless sweep samples within this relative distance of a resonance are
// flagged near_pole instead of being reported as trustworthy values.
inline constexpr double near_pole_rel_distance = 1e-12;

enum class GridSpacing { linear, logarithmic };

struct FrequencyGrid {
    double start_hz = 0;
    double stop_hz = 0;
    int points = 0;
    GridSpacing spacing = GridSpacing::linear;

    // Materialized grid, endpoints included. Throws InvalidParams unless
    // 0 < start < stop and points >= 2.
    std::vector<double> frequencies() const;
};

enum class SampleFlag { ok, near_pole };
enum class SweepMethod { linear_solve, closed_form };

struct ImpedanceSample {
    double freq_hz = 0;
    std::complex<double> z; // ohms
    SampleFlag flag = SampleFlag::ok;
};

struct ImpedanceSweep {
    FrequencyGrid grid;
    SweepMethod method = SweepMethod::linear_solve;
    std::string params_digest;
    std::vector<ImpedanceSample> samples;
};

// Differential-mode input admittance Y_in = I_branch1 + s*C1 obtained by
// solving the three coupled branch equations with unit port voltage.
// Handles any loss mode; finite even at resonance (where it passes through
// zero for the lossless tank).
std::complex<double> yin_linear_solve(const TankParams& p, double freq_hz);

// Z_in = 1 / Y_in via the branch solve. For a lossless tank, evaluation
// within near_pole_rel_distance of a resonance throws PoleAtFrequency.
std::complex<double> zin_linear_solve(const TankParams& p, double freq_hz);

// Effective branch-1 impedance with branches 2 and 3 reflected in:
//
//   Z_eff = s*L1 - s^3 * [ M12^2*C2 + M13^2*C3
//                          + s^2*C2*C3*(L3*M12^2 + L2*M13^2 - 2*M23*M12*M13) ]
//                      / [ 1 + s^2*(L2*C2 + L3*C3) + s^4*C2*C3*(L2*L3 - M23^2) ]
//
// Lossless only. Throws InternalPole at resonances of the 2-3 sub-network
// (those poles are removable in Z_in but not here).
std::complex<double> zeff_closed_form(const TankParams& p, double freq_hz);

// Z_in = Z_eff / (1 + s*C1*Z_eff), lossless closed form.
std::complex<double> zin_closed_form(const TankParams& p, double freq_hz);

// Evaluates the grid with the chosen method. Lossless samples landing within
// near_pole_rel_distance of a mode are flagged near_pole; a sample landing
// exactly on a singularity is nudged by the smallest relative step that
// evaluates cleanly (the flag stays near_pole, the recorded frequency is the
// grid frequency). closed_form with a lossy spec throws InvalidParams.
ImpedanceSweep sweep(const TankParams& p, const FrequencyGrid& grid,
                     SweepMethod method = SweepMethod::linear_solve);

// CSV columns: freq_hz,re_z_ohm,im_z_ohm,mag_z_ohm,flag
void write_csv(const ImpedanceSweep& s, std::ostream& out);
std::string to_csv_string(const ImpedanceSweep& s);
std::string to_json_string(const ImpedanceSweep& s);

} // namespace tctank
