#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tctank/modes.hpp"
#include "tctank/tank.hpp"

namespace tctank {

// Reference coil set used when a design does not pin the inductances.
inline constexpr std::array<double, 3> default_inductances = {300e-12, 210e-12,
                                                              117e-12};

// nu2_equals_nu3 ties the two floating branches to a common uncoupled
// frequency (L2*C2 = L3*C3), which reduces the mode-ratio landscape to the
// four dimensions swept below. free leaves C3 at its base value.
enum class ShapeConstraint { nu2_equals_nu3, free };

struct Range {
    double lo = 0, hi = 0;
};

// Grid specification for the mode-ratio landscape over
// X = (L1*C1)/(L2*C2) and the three coupling coefficients.
struct SweepSpec {
    double x_min = 1.0;
    double x_max = 20.0;
    int x_points = 40;
    std::vector<double> k12_values;
    std::vector<double> k13_values;
    std::vector<double> k23_values;
    ShapeConstraint constraint = ShapeConstraint::nu2_equals_nu3;
};

struct RatioCell {
    double x = 0, k12 = 0, k13 = 0, k23 = 0;
    double r2 = 0, r3 = 0; // mode2/mode1, mode3/mode1; NaN when invalid
    bool valid = false;
};

// Cells in row-major order: x outermost, then k12, k13, k23.
struct RatioMap {
    SweepSpec spec;
    std::vector<RatioCell> cells;
};

struct DesignSpec {
    double f0_target_hz = 24e9;
    double band_center_ratio = 3.0;          // target mode3-ish placement
    double fractional_bandwidth_target = 0.30;
    Range k23_range{0.2, 0.3};
    Range k12_range{0.05, 0.7};
    Range k13_range{0.05, 0.7};
    Range x_range{1.0, 20.0};
    std::optional<std::array<double, 3>> fixed_inductances; // henries
    int search_budget = 20000;               // max mode-solver evaluations
};

struct DesignResult {
    TankParams params;
    double f_mode1_hz = 0, f_mode2_hz = 0, f_mode3_hz = 0;
    double r2 = 0, r3 = 0;
    double band_coverage = 0;   // fraction of the target band inside [r2, r3]
    double objective_value = 0;
    bool feasible = false;      // false: best-effort nearest design returned
};

// Mode ratios over the grid. Inductances and C2 (and C3 under `free`) come
// from `base`; C1 and (under nu2_equals_nu3) C3 follow from X and the
// constraint. Cells whose coupling determinant is non-positive, or whose
// cubic degenerates, are marked invalid with NaN ratios.
RatioMap ratio_map(const SweepSpec& spec, const TankParams& base);

// Searches the DesignSpec ranges for couplings and X placing the two upper modes
// across the band centered on band_center_ratio * f_mode1. Deterministic:
// coarse grid capped by search_budget, then golden-section refinement on X
// around the best cell. Ties broken by band-center distance, then larger
// coupling determinant, then lowest cell index. A result that covers none of
// the band comes back with feasible == false.
DesignResult design_third_harmonic(const DesignSpec& spec);

// Chooses C1..C3 so the fundamental mode lands exactly on f0 for the given
// coil set, couplings and X. The characteristic cubic is homogeneous in the
// capacitance scale (scaling all C by a scales every mode by a^-1/2), so the
// absolute scale is solved analytically. nu3_over_nu2 pins the remaining
// freedom under the `free` constraint and must be 1 under nu2_equals_nu3.
std::array<double, 3> capacitances_for_fundamental(
    double l1, double l2, double l3, double k12, double k13, double k23,
    double x, double f0_hz,
    ShapeConstraint constraint = ShapeConstraint::nu2_equals_nu3,
    double nu3_over_nu2 = 1.0);

// CSV columns: X,k12,k13,k23,r2,r3,valid
std::string to_csv_string(const RatioMap& map);
std::string to_json_string(const RatioMap& map);
std::string to_json_string(const DesignResult& r);

} // namespace tctank
