#include "tctank/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "json_io.hpp"

namespace tctank {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf_v = std::numeric_limits<double>::infinity();

struct NormalizedRatios {
    double r2 = nan_v, r3 = nan_v;
    double det_k = -inf_v;
    bool ok = false;
};

// Under nu2 = nu3 the mode ratios depend only on X = (L1*C1)/(L2*C2) and the
// couplings: normalize nu2^2 = nu3^2 = 1, nu1^2 = 1/X and solve the
// characteristic cubic directly.
NormalizedRatios ratios_normalized(double x, double k12, double k13,
                                   double k23) {
    NormalizedRatios out;
    if (!(x > 0))
        return out;
    out.det_k = coupling_det(k12, k13, k23);
    if (!(out.det_k > det_k_tolerance))
        return out;
    const double w1 = 1.0 / x;
    CubicCoefficients c;
    c.c3 = out.det_k;
    c.c2 = (1.0 - k12 * k12) + (1.0 - k13 * k13) + (1.0 - k23 * k23) * w1;
    c.c1 = 2.0 * w1 + 1.0;
    c.c0 = w1;
    try {
        const ModeSet ms = modes_closed_form(c);
        if (ms.cubic_degenerate || ms.omega.size() != 3)
            return out;
        out.r2 = ms.omega[1] / ms.omega[0];
        out.r3 = ms.omega[2] / ms.omega[0];
        out.ok = true;
    } catch (const ComplexRoots&) {
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    if (n <= 1 || lo == hi) {
        v.push_back(lo);
        return v;
    }
    v.reserve(n);
    for (int i = 0; i < n; ++i)
        v.push_back(lo + (hi - lo) * i / double(n - 1));
    return v;
}

void check_range(const Range& r, const char* name, bool coupling) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi))
        throw InvalidParams(std::string(name) + " range must satisfy lo <= hi");
    if (coupling && !(std::abs(r.lo) < 1.0 && std::abs(r.hi) < 1.0))
        throw InvalidParams(std::string(name) +
                            " range must stay inside (-1, 1)");
    if (!coupling && !(r.lo > 0))
        throw InvalidParams(std::string(name) + " range must be positive");
}

const char* constraint_name(ShapeConstraint c) {
    return c == ShapeConstraint::nu2_equals_nu3 ? "nu2_equals_nu3" : "free";
}

} // namespace

RatioMap ratio_map(const SweepSpec& spec, const TankParams& base) {
    if (!(std::isfinite(spec.x_min) && std::isfinite(spec.x_max) &&
          spec.x_min > 0 && spec.x_max >= spec.x_min))
        throw InvalidParams("sweep requires 0 < x_min <= x_max");
    if (spec.x_points < 1)
        throw InvalidParams("sweep requires x_points >= 1");
    if (spec.k12_values.empty() || spec.k13_values.empty() ||
        spec.k23_values.empty())
        throw InvalidParams("sweep coupling grids must be non-empty");
    for (const auto* vals : {&spec.k12_values, &spec.k13_values,
                             &spec.k23_values})
        for (double k : *vals)
            if (!(std::isfinite(k) && std::abs(k) < 1.0))
                throw InvalidParams("sweep coupling values must satisfy |k| < 1");
    if (!(base.l1 > 0 && base.l2 > 0 && base.l3 > 0 && base.c2 > 0))
        throw InvalidParams("sweep base requires positive L1, L2, L3, C2");
    if (spec.constraint == ShapeConstraint::free && !(base.c3 > 0))
        throw InvalidParams("sweep base requires positive C3 under the free "
                            "constraint");

    RatioMap map;
    map.spec = spec;
    const double l2c2 = base.l2 * base.c2;
    const auto xs = linspace(spec.x_min, spec.x_max, spec.x_points);
    map.cells.reserve(xs.size() * spec.k12_values.size() *
                      spec.k13_values.size() * spec.k23_values.size());

    for (double x : xs)
        for (double k12 : spec.k12_values)
            for (double k13 : spec.k13_values)
                for (double k23 : spec.k23_values) {
                    RatioCell cell;
                    cell.x = x;
                    cell.k12 = k12;
                    cell.k13 = k13;
                    cell.k23 = k23;
                    cell.r2 = nan_v;
                    cell.r3 = nan_v;

                    TankParams q;
                    q.l1 = base.l1;
                    q.l2 = base.l2;
                    q.l3 = base.l3;
                    q.c2 = base.c2;
                    q.c1 = x * l2c2 / base.l1;
                    q.c3 = spec.constraint == ShapeConstraint::nu2_equals_nu3
                               ? l2c2 / base.l3
                               : base.c3;
                    q.k12 = k12;
                    q.k13 = k13;
                    q.k23 = k23;

                    if (coupling_det(k12, k13, k23) > det_k_tolerance) {
                        try {
                            const ModeSet ms = modes_closed_form(
                                characteristic_coefficients(q));
                            if (!ms.cubic_degenerate && ms.omega.size() == 3) {
                                cell.r2 = ms.omega[1] / ms.omega[0];
                                cell.r3 = ms.omega[2] / ms.omega[0];
                                cell.valid = true;
                            }
                        } catch (const ComplexRoots&) {
                        } catch (const InvalidParams&) {
                        }
                    }
                    map.cells.push_back(cell);
                }
    return map;
}

DesignResult design_third_harmonic(const DesignSpec& spec) {
    if (!(std::isfinite(spec.f0_target_hz) && spec.f0_target_hz > 0))
        throw InvalidParams("design requires a positive target frequency");
    if (!(std::isfinite(spec.band_center_ratio) &&
          spec.band_center_ratio > 1.0))
        throw InvalidParams("design requires band_center_ratio > 1");
    if (!(spec.fractional_bandwidth_target >= 0 &&
          spec.fractional_bandwidth_target < 2.0))
        throw InvalidParams(
            "design requires fractional bandwidth in [0, 2)");
    if (spec.search_budget < 100)
        throw InvalidParams("design search budget must be at least 100");
    check_range(spec.k23_range, "k23", true);
    check_range(spec.k12_range, "k12", true);
    check_range(spec.k13_range, "k13", true);
    check_range(spec.x_range, "X", false);

    const std::array<double, 3> coils =
        spec.fixed_inductances.value_or(default_inductances);
    for (double l : coils)
        if (!(std::isfinite(l) && l > 0))
            throw InvalidParams("design inductances must be positive");

    const double ratio = spec.band_center_ratio;
    const double bw = spec.fractional_bandwidth_target;
    const double band_lo = ratio * (1.0 - 0.5 * bw);
    const double band_hi = ratio * (1.0 + 0.5 * bw);

    auto coverage = [&](double r2, double r3) -> double {
        if (bw > 0) {
            const double overlap =
                std::min(r3, band_hi) - std::max(r2, band_lo);
            return std::max(0.0, overlap) / (band_hi - band_lo);
        }
        return (r2 <= ratio && ratio <= r3) ? 1.0 : 0.0;
    };

    struct Cand {
        double cov = -1.0;
        double center_dist = inf_v;
        double det_k = -inf_v;
        long idx = std::numeric_limits<long>::max();
        double x = 0, k12 = 0, k13 = 0, k23 = 0;
        double r2 = nan_v, r3 = nan_v;
    };
    auto better = [](const Cand& a, const Cand& b) {
        if (a.cov != b.cov)
            return a.cov > b.cov;
        if (a.center_dist != b.center_dist)
            return a.center_dist < b.center_dist;
        if (a.det_k != b.det_k)
            return a.det_k > b.det_k;
        return a.idx < b.idx;
    };

    long counter = 0;
    auto eval = [&](double x, double k12, double k13, double k23) -> Cand {
        Cand c;
        c.idx = counter++;
        c.x = x;
        c.k12 = k12;
        c.k13 = k13;
        c.k23 = k23;
        const NormalizedRatios nr = ratios_normalized(x, k12, k13, k23);
        c.det_k = nr.det_k;
        if (!nr.ok)
            return c;
        c.r2 = nr.r2;
        c.r3 = nr.r3;
        c.cov = coverage(nr.r2, nr.r3);
        c.center_dist = std::abs(0.5 * (nr.r2 + nr.r3) - ratio);
        return c;
    };

    // Grid sizes: k23 is a narrow keep-low band, five samples suffice when
    // it is not pinned; the rest of the budget splits evenly across the
    // non-degenerate x/k12/k13 axes. A slice is reserved for refinement.
    const int n23 = spec.k23_range.lo == spec.k23_range.hi ? 1 : 5;
    int free_dims = 0;
    const bool x_free = spec.x_range.lo != spec.x_range.hi;
    const bool k12_free = spec.k12_range.lo != spec.k12_range.hi;
    const bool k13_free = spec.k13_range.lo != spec.k13_range.hi;
    for (bool f : {x_free, k12_free, k13_free})
        free_dims += f ? 1 : 0;

    const long grid_budget =
        std::max<long>((spec.search_budget - 120) / n23, 1);
    int per_dim = 1;
    if (free_dims > 0) {
        per_dim = static_cast<int>(
            std::floor(std::pow(double(grid_budget), 1.0 / free_dims)));
        per_dim = std::clamp(per_dim, 2, 80);
    }

    const auto xs =
        linspace(spec.x_range.lo, spec.x_range.hi, x_free ? per_dim : 1);
    const auto k12s = linspace(spec.k12_range.lo, spec.k12_range.hi,
                               k12_free ? per_dim : 1);
    const auto k13s = linspace(spec.k13_range.lo, spec.k13_range.hi,
                               k13_free ? per_dim : 1);
    const auto k23s = linspace(spec.k23_range.lo, spec.k23_range.hi, n23);

    Cand best;
    for (double x : xs)
        for (double k12 : k12s)
            for (double k13 : k13s)
                for (double k23 : k23s) {
                    const Cand c = eval(x, k12, k13, k23);
                    if (better(c, best))
                        best = c;
                }

    if (best.cov < 0)
        throw InvalidParams(
            "design search box contains no realizable parameter set");

    // Golden-section refinement of X around the best grid cell, couplings
    // held fixed. The comparator, not a scalar, drives the section so the
    // tie-break ordering survives into the refinement.
    if (x_free && xs.size() >= 2) {
        const double step = xs[1] - xs[0];
        double a = std::max(spec.x_range.lo, best.x - step);
        double b = std::min(spec.x_range.hi, best.x + step);
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - invphi * (b - a);
        double x2 = a + invphi * (b - a);
        Cand f1 = eval(x1, best.k12, best.k13, best.k23);
        Cand f2 = eval(x2, best.k12, best.k13, best.k23);
        for (int it = 0; it < 48; ++it) {
            if (better(f1, best))
                best = f1;
            if (better(f2, best))
                best = f2;
            if (better(f1, f2)) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = eval(x1, best.k12, best.k13, best.k23);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = eval(x2, best.k12, best.k13, best.k23);
            }
        }
        if (better(f1, best))
            best = f1;
        if (better(f2, best))
            best = f2;
    }

    const auto cs = capacitances_for_fundamental(
        coils[0], coils[1], coils[2], best.k12, best.k13, best.k23, best.x,
        spec.f0_target_hz, ShapeConstraint::nu2_equals_nu3, 1.0);

    DesignResult res;
    res.params.l1 = coils[0];
    res.params.l2 = coils[1];
    res.params.l3 = coils[2];
    res.params.c1 = cs[0];
    res.params.c2 = cs[1];
    res.params.c3 = cs[2];
    res.params.k12 = best.k12;
    res.params.k13 = best.k13;
    res.params.k23 = best.k23;

    const ModeSet ms =
        modes_closed_form(characteristic_coefficients(res.params));
    res.f_mode1_hz = ms.omega[0] / two_pi;
    res.f_mode2_hz = ms.omega[1] / two_pi;
    res.f_mode3_hz = ms.omega[2] / two_pi;
    res.r2 = ms.omega[1] / ms.omega[0];
    res.r3 = ms.omega[2] / ms.omega[0];
    res.band_coverage = coverage(res.r2, res.r3);
    res.objective_value = res.band_coverage;
    res.feasible = res.band_coverage > 0;
    return res;
}

std::array<double, 3> capacitances_for_fundamental(
    double l1, double l2, double l3, double k12, double k13, double k23,
    double x, double f0_hz, ShapeConstraint constraint, double nu3_over_nu2) {
    for (double l : {l1, l2, l3})
        if (!(std::isfinite(l) && l > 0))
            throw InvalidParams("inductances must be positive");
    if (!(std::isfinite(x) && x > 0))
        throw InvalidParams("X must be positive");
    if (!(std::isfinite(f0_hz) && f0_hz > 0))
        throw InvalidParams("target frequency must be positive");
    for (double k : {k12, k13, k23})
        if (!(std::isfinite(k) && std::abs(k) < 1.0))
            throw InvalidParams("couplings must satisfy |k| < 1");
    if (!(coupling_det(k12, k13, k23) > det_k_tolerance))
        throw InvalidParams("coupling matrix is not positive definite");
    if (constraint == ShapeConstraint::nu2_equals_nu3 && nu3_over_nu2 != 1.0)
        throw InvalidParams(
            "nu3_over_nu2 must be 1 under the nu2_equals_nu3 constraint");
    if (!(std::isfinite(nu3_over_nu2) && nu3_over_nu2 > 0))
        throw InvalidParams("nu3_over_nu2 must be positive");

    // Trial set with the requested shape; nu3 = rho*nu2 means
    // L3*C3 = L2*C2/rho^2.
    const double rho = nu3_over_nu2;
    const double c2t = 1e-12;
    const double c1t = x * l2 * c2t / l1;
    const double c3t = l2 * c2t / (l3 * rho * rho);

    TankParams p;
    p.l1 = l1;
    p.l2 = l2;
    p.l3 = l3;
    p.k12 = k12;
    p.k13 = k13;
    p.k23 = k23;

    auto mode1 = [&](double scale) {
        p.c1 = c1t * scale;
        p.c2 = c2t * scale;
        p.c3 = c3t * scale;
        return modes_closed_form(characteristic_coefficients(p)).omega[0];
    };

    // The cubic is homogeneous in the capacitance scale (all modes go as
    // C^-1/2), so one analytic step lands the fundamental. Iterate a couple
    // of times against floating-point dust.
    const double target = two_pi * f0_hz;
    double scale = 1.0;
    for (int it = 0; it < 4; ++it) {
        const double w1 = mode1(scale);
        const double rel = w1 / target;
        if (std::abs(rel - 1.0) <= 1e-13)
            break;
        scale *= rel * rel;
    }
    return {c1t * scale, c2t * scale, c3t * scale};
}

std::string to_csv_string(const RatioMap& map) {
    std::string out = "X,k12,k13,k23,r2,r3,valid\n";
    for (const auto& c : map.cells) {
        out += detail::format_double(c.x);
        out += ',';
        out += detail::format_double(c.k12);
        out += ',';
        out += detail::format_double(c.k13);
        out += ',';
        out += detail::format_double(c.k23);
        out += ',';
        out += detail::format_double(c.r2);
        out += ',';
        out += detail::format_double(c.r3);
        out += ',';
        out += c.valid ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string to_json_string(const RatioMap& map) {
    detail::json j;
    j["spec"] = {{"x_min", map.spec.x_min},
                 {"x_max", map.spec.x_max},
                 {"x_points", map.spec.x_points},
                 {"k12_values", map.spec.k12_values},
                 {"k13_values", map.spec.k13_values},
                 {"k23_values", map.spec.k23_values},
                 {"constraint", constraint_name(map.spec.constraint)}};
    detail::json cells = detail::json::array();
    for (const auto& c : map.cells) {
        detail::json row = {{"x", c.x},
                            {"k12", c.k12},
                            {"k13", c.k13},
                            {"k23", c.k23},
                            {"valid", c.valid}};
        if (c.valid) {
            row["r2"] = c.r2;
            row["r3"] = c.r3;
        } else {
            row["r2"] = nullptr;
            row["r3"] = nullptr;
        }
        cells.push_back(row);
    }
    j["cells"] = cells;
    return detail::dump_artifact(j);
}

std::string to_json_string(const DesignResult& r) {
    detail::json j;
    j["params"] = detail::params_to_json(r.params);
    j["f_mode1_hz"] = r.f_mode1_hz;
    j["f_mode2_hz"] = r.f_mode2_hz;
    j["f_mode3_hz"] = r.f_mode3_hz;
    j["r2"] = r.r2;
    j["r3"] = r.r3;
    j["band_coverage"] = r.band_coverage;
    j["objective_value"] = r.objective_value;
    j["feasible"] = r.feasible;
    return detail::dump_artifact(j);
}

} // namespace tctank
