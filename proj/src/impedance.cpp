#include "tctank/impedance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json_io.hpp"
#include "tctank/modes.hpp"

namespace tctank {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_positive_frequency(double freq_hz) {
    if (!(std::isfinite(freq_hz) && freq_hz > 0))
        throw InvalidParams("frequency must be finite and positive");
}

void check_params(const TankParams& p) {
    const ValidationReport rep = validate(p);
    if (!rep.ok) {
        std::string msg = "invalid tank parameters";
        for (const auto& v : rep.violations)
            msg += "; " + v;
        throw InvalidParams(msg);
    }
}

bool is_lossless(const TankParams& p) {
    const auto r = series_resistances(p);
    return r[0] == 0 && r[1] == 0 && r[2] == 0;
}

// Branch mesh equations with unit voltage across the branch-1 port:
//
//   (s*L1 + r1)        I1 + s*M12 I2 + s*M13 I3 = 1
//   s*M12 I1 + (s*L2 + r2 + 1/(s*C2)) I2 + s*M23 I3 = 0
//   s*M13 I1 + s*M23 I2 + (s*L3 + r3 + 1/(s*C3)) I3 = 0
//
// C1 sits directly across the port and is added at the admittance level.
Eigen::Vector3cd branch_currents(const TankParams& p, double omega) {
    const Mutuals m = mutual_inductances(p);
    const auto r = series_resistances(p);
    const std::complex<double> s(0.0, omega);

    Eigen::Matrix3cd a;
    a(0, 0) = s * p.l1 + r[0];
    a(0, 1) = s * m.m12;
    a(0, 2) = s * m.m13;
    a(1, 0) = s * m.m12;
    a(1, 1) = s * p.l2 + r[1] + 1.0 / (s * p.c2);
    a(1, 2) = s * m.m23;
    a(2, 0) = s * m.m13;
    a(2, 1) = s * m.m23;
    a(2, 2) = s * p.l3 + r[2] + 1.0 / (s * p.c3);

    Eigen::Vector3cd rhs;
    rhs << 1.0, 0.0, 0.0;

    const Eigen::Vector3cd sol = a.partialPivLu().solve(rhs);
    const double residual = (a * sol - rhs).norm();
    const double scale = a.norm() * sol.norm() + rhs.norm();
    if (!(residual < 1e-8 * scale))
        throw SingularSystem(
            "branch equation system is numerically singular");
    return sol;
}

// Relative distance from f to the nearest lossless mode, given the modes
// in hertz.
double nearest_mode_rel(const std::vector<double>& modes_hz, double freq_hz) {
    double best = std::numeric_limits<double>::infinity();
    for (double fm : modes_hz)
        best = std::min(best, std::abs(freq_hz - fm) / fm);
    return best;
}

std::vector<double> lossless_modes_hz(const TankParams& p) {
    const ModeSet ms = modes_numerical(characteristic_coefficients(p));
    std::vector<double> fs;
    fs.reserve(ms.omega.size());
    for (double w : ms.omega)
        fs.push_back(w / two_pi);
    return fs;
}

std::complex<double> zin_linear_at(const TankParams& p, double freq_hz,
                                   const std::vector<double>* modes_hz) {
    const double omega = two_pi * freq_hz;
    const Eigen::Vector3cd cur = branch_currents(p, omega);
    const std::complex<double> y =
        cur(0) + std::complex<double>(0.0, omega * p.c1);
    if (modes_hz &&
        nearest_mode_rel(*modes_hz, freq_hz) < near_pole_rel_distance)
        throw PoleAtFrequency(
            "lossless input impedance evaluated at a resonance mode",
            freq_hz);
    if (y == std::complex<double>(0.0, 0.0))
        throw PoleAtFrequency("input admittance is exactly zero", freq_hz);
    return 1.0 / y;
}

const char* flag_name(SampleFlag f) {
    return f == SampleFlag::ok ? "ok" : "near_pole";
}

const char* method_name(SweepMethod m) {
    return m == SweepMethod::linear_solve ? "linear_solve" : "closed_form";
}

} // namespace

std::vector<double> FrequencyGrid::frequencies() const {
    if (!(std::isfinite(start_hz) && std::isfinite(stop_hz) && start_hz > 0 &&
          stop_hz > start_hz))
        throw InvalidParams(
            "frequency grid requires 0 < start_hz < stop_hz");
    if (points < 2)
        throw InvalidParams("frequency grid requires at least 2 points");
    std::vector<double> fs(points);
    if (spacing == GridSpacing::linear) {
        const double step = (stop_hz - start_hz) / (points - 1);
        for (int i = 0; i < points; ++i)
            fs[i] = start_hz + step * i;
    } else {
        const double lg = std::log(stop_hz / start_hz);
        for (int i = 0; i < points; ++i)
            fs[i] = start_hz * std::exp(lg * i / double(points - 1));
    }
    fs.front() = start_hz;
    fs.back() = stop_hz;
    return fs;
}

std::complex<double> yin_linear_solve(const TankParams& p, double freq_hz) {
    check_params(p);
    check_positive_frequency(freq_hz);
    const double omega = two_pi * freq_hz;
    const Eigen::Vector3cd cur = branch_currents(p, omega);
    return cur(0) + std::complex<double>(0.0, omega * p.c1);
}

std::complex<double> zin_linear_solve(const TankParams& p, double freq_hz) {
    check_params(p);
    check_positive_frequency(freq_hz);
    if (is_lossless(p)) {
        const auto modes = lossless_modes_hz(p);
        return zin_linear_at(p, freq_hz, &modes);
    }
    return zin_linear_at(p, freq_hz, nullptr);
}

std::complex<double> zeff_closed_form(const TankParams& p, double freq_hz) {
    check_params(p);
    check_positive_frequency(freq_hz);
    if (!is_lossless(p))
        throw InvalidParams("closed-form impedance is lossless only");

    const Mutuals m = mutual_inductances(p);
    const double w = two_pi * freq_hz;
    const double w2 = w * w;

    // With s = j*omega both the bracketed numerator and the denominator are
    // real; Z_eff is purely imaginary as a lossless one-port must be.
    const double cross =
        p.l3 * m.m12 * m.m12 + p.l2 * m.m13 * m.m13 - 2.0 * m.m23 * m.m12 * m.m13;
    const double num =
        m.m12 * m.m12 * p.c2 + m.m13 * m.m13 * p.c3 - w2 * p.c2 * p.c3 * cross;
    const double den = 1.0 - w2 * (p.l2 * p.c2 + p.l3 * p.c3) +
                       w2 * w2 * p.c2 * p.c3 * (p.l2 * p.l3 - m.m23 * m.m23);

    const double den_scale = 1.0 + w2 * (p.l2 * p.c2 + p.l3 * p.c3) +
                             w2 * w2 * p.c2 * p.c3 *
                                 std::abs(p.l2 * p.l3 - m.m23 * m.m23);
    if (std::abs(den) <= 1e-12 * den_scale)
        throw InternalPole(
            "frequency lies on a resonance of the floating 2-3 sub-network",
            freq_hz);

    // -s^3 = j*omega^3 for s = j*omega.
    return std::complex<double>(0.0, w * p.l1 + w * w2 * num / den);
}

std::complex<double> zin_closed_form(const TankParams& p, double freq_hz) {
    const std::complex<double> zeff = zeff_closed_form(p, freq_hz);
    const double w = two_pi * freq_hz;
    // s*C1*Z_eff is real for purely imaginary Z_eff.
    const double d = 1.0 - w * p.c1 * zeff.imag();
    const double d_scale = 1.0 + std::abs(w * p.c1 * zeff.imag());
    if (std::abs(d) <= 1e-12 * d_scale)
        throw PoleAtFrequency(
            "lossless input impedance evaluated at a resonance mode",
            freq_hz);
    return std::complex<double>(0.0, zeff.imag() / d);
}

ImpedanceSweep sweep(const TankParams& p, const FrequencyGrid& grid,
                     SweepMethod method) {
    check_params(p);
    if (method == SweepMethod::closed_form && !is_lossless(p))
        throw InvalidParams("closed-form sweep is lossless only");
    const std::vector<double> fs = grid.frequencies();

    const bool lossless = is_lossless(p);
    std::vector<double> modes_hz;
    if (lossless)
        modes_hz = lossless_modes_hz(p);

    auto eval = [&](double f) -> std::complex<double> {
        if (method == SweepMethod::closed_form)
            return zin_closed_form(p, f);
        return zin_linear_at(p, f, nullptr);
    };

    ImpedanceSweep sw;
    sw.grid = grid;
    sw.method = method;
    sw.params_digest = params_digest(p);
    sw.samples.reserve(fs.size());

    for (double f : fs) {
        ImpedanceSample sample;
        sample.freq_hz = f;
        if (lossless && nearest_mode_rel(modes_hz, f) < near_pole_rel_distance)
            sample.flag = SampleFlag::near_pole;
        try {
            sample.z = eval(f);
        } catch (const Error&) {
            // Exact singularity on the grid: nudge by the smallest relative
            // step that evaluates, keep the grid frequency in the record.
            sample.flag = SampleFlag::near_pole;
            bool done = false;
            for (double rel = 4e-16; rel < 1e-9; rel *= 8) {
                try {
                    sample.z = eval(f * (1.0 + rel));
                    done = true;
                    break;
                } catch (const Error&) {
                }
            }
            if (!done)
                throw;
        }
        sw.samples.push_back(sample);
    }
    return sw;
}

void write_csv(const ImpedanceSweep& s, std::ostream& out) {
    out << "freq_hz,re_z_ohm,im_z_ohm,mag_z_ohm,flag\n";
    for (const auto& sm : s.samples) {
        out << detail::format_double(sm.freq_hz) << ','
            << detail::format_double(sm.z.real()) << ','
            << detail::format_double(sm.z.imag()) << ','
            << detail::format_double(std::abs(sm.z)) << ','
            << flag_name(sm.flag) << '\n';
    }
}

std::string to_csv_string(const ImpedanceSweep& s) {
    std::ostringstream os;
    write_csv(s, os);
    return os.str();
}

std::string to_json_string(const ImpedanceSweep& s) {
    detail::json j;
    j["grid"] = {{"start_hz", s.grid.start_hz},
                 {"stop_hz", s.grid.stop_hz},
                 {"points", s.grid.points},
                 {"spacing", s.grid.spacing == GridSpacing::linear
                                 ? "linear"
                                 : "logarithmic"}};
    j["method"] = method_name(s.method);
    j["params_digest"] = s.params_digest;
    detail::json rows = detail::json::array();
    for (const auto& sm : s.samples) {
        rows.push_back({{"freq_hz", sm.freq_hz},
                        {"re_z_ohm", sm.z.real()},
                        {"im_z_ohm", sm.z.imag()},
                        {"mag_z_ohm", std::abs(sm.z)},
                        {"flag", flag_name(sm.flag)}});
    }
    j["samples"] = rows;
    return detail::dump_artifact(j);
}

} // namespace tctank
