#include "tctank/modes.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "tctank/impedance.hpp"

namespace tctank {

namespace {

// arccos arguments may exceed [-1, 1] by accumulated roundoff; anything past
// this is a genuine complex-root signal, not noise.
constexpr double arccos_clamp_tolerance = 1e-12;

// Companion eigenvalues with relative imaginary parts above this are real
// roots perturbed by roundoff nowhere near; they indicate complex roots.
constexpr double imag_rel_tolerance = 1e-9;

void check_finite(const CubicCoefficients& c) {
    if (!(std::isfinite(c.c3) && std::isfinite(c.c2) && std::isfinite(c.c1) &&
          std::isfinite(c.c0)))
        throw InvalidParams("characteristic coefficients must be finite");
}

// Three positive real roots force every coefficient of
// c3 x^3 - c2 x^2 + c1 x - c0 positive (elementary symmetric functions), so
// a non-positive c2, c1 or c0 rules them out before any root finding.
void check_positive_root_necessary(const CubicCoefficients& c) {
    if (!(c.c2 > 0 && c.c1 > 0 && c.c0 > 0))
        throw ComplexRoots(
            "characteristic coefficients admit no three positive real roots");
}

// Stable solve of c2 x^2 - c1 x + c0 = 0 for the degenerate (det K ~ 0)
// tank, where the top mode has escaped to infinity.
std::array<long double, 2> quadratic_roots(long double c2, long double c1,
                                           long double c0) {
    long double disc = c1 * c1 - 4.0L * c2 * c0;
    if (disc < 0) {
        if (disc > -1e-15L * c1 * c1)
            disc = 0;
        else
            throw ComplexRoots(
                "degenerate quadratic has complex roots");
    }
    const long double big = (c1 + std::sqrt(disc)) / (2.0L * c2);
    const long double small = c0 / (c2 * big);
    return {small, big};
}

template <std::size_t N>
ModeSet build_set(const std::array<long double, N>& xs_in, ModeMethod method,
                  bool cubic_degenerate) {
    std::array<long double, N> xs = xs_in;
    std::sort(xs.begin(), xs.end());
    ModeSet ms;
    ms.method = method;
    ms.cubic_degenerate = cubic_degenerate;
    for (long double x : xs) {
        if (!(x > 0))
            throw ComplexRoots(
                "characteristic root is not a positive squared frequency");
        ms.omega.push_back(static_cast<double>(std::sqrt(x)));
    }
    ms.degenerate.assign(ms.omega.size(), false);
    for (std::size_t i = 0; i + 1 < ms.omega.size(); ++i) {
        const double rel =
            (ms.omega[i + 1] - ms.omega[i]) / ms.omega[i + 1];
        if (rel < degenerate_mode_spacing) {
            ms.degenerate[i] = true;
            ms.degenerate[i + 1] = true;
        }
    }
    return ms;
}

// Trigonometric root extraction, evaluated in long double: root spreads up
// to ~1e7 in x otherwise amplify double roundoff past the 1e-9 cross-method
// comparison budget.
std::array<long double, 3> trig_roots(const CubicCoefficients& c,
                                      CubicPlacement placement) {
    const long double a3 = c.c3, a2 = c.c2, a1 = c.c1, a0 = c.c0;
    const long double den_coeff =
        (placement == CubicPlacement::c1_denominator) ? a1 : a3;

    const long double disc = a2 * a2 - 3.0L * a1 * a3;
    const long double num = 2.0L * a2 * a2 * a2 - 9.0L * a1 * a2 * a3 +
                            27.0L * a0 * den_coeff * den_coeff;

    // disc at roundoff level (either sign) cannot feed the trig form: its
    // 3/2 power would amplify pure noise. Land it in the degenerate branch.
    const long double disc_scale = a2 * a2 + 3.0L * std::fabs(a1 * a3);
    if (disc <= 1e-15L * disc_scale) {
        // Either a triple root (both resolvents vanish) or genuinely
        // complex roots; a lone vanishing discriminant cannot give three
        // real roots.
        const long double num_scale =
            2.0L * std::fabs(a2 * a2 * a2) + 9.0L * std::fabs(a1 * a2 * a3) +
            27.0L * std::fabs(a0 * den_coeff * den_coeff);
        if (disc > -1e-15L * disc_scale && std::fabs(num) <= 1e-12L * num_scale) {
            const long double x = a2 / (3.0L * den_coeff);
            return {x, x, x};
        }
        throw ComplexRoots(
            "characteristic cubic has complex roots (negative discriminant)");
    }

    const long double s = std::sqrt(disc);
    long double u = num / (2.0L * s * s * s);
    if (u > 1.0L) {
        if (u - 1.0L > arccos_clamp_tolerance) {
            std::ostringstream os;
            os << "arccos argument " << static_cast<double>(u)
               << " is outside [-1, 1]: no three real modes with this "
                  "coefficient placement";
            throw ComplexRoots(os.str());
        }
        u = 1.0L;
    } else if (u < -1.0L) {
        if (-1.0L - u > arccos_clamp_tolerance) {
            std::ostringstream os;
            os << "arccos argument " << static_cast<double>(u)
               << " is outside [-1, 1]: no three real modes with this "
                  "coefficient placement";
            throw ComplexRoots(os.str());
        }
        u = -1.0L;
    }

    const long double theta = std::acos(u);
    const long double pi = std::numbers::pi_v<long double>;
    const long double d = 3.0L * den_coeff;
    // theta in [0, pi] orders these ascending by construction.
    return {
        (a2 - 2.0L * s * std::cos((theta - pi) / 3.0L)) / d,
        (a2 - 2.0L * s * std::cos((theta + pi) / 3.0L)) / d,
        (a2 + 2.0L * s * std::cos(theta / 3.0L)) / d,
    };
}

} // namespace

CubicCoefficients characteristic_coefficients(const TankParams& p) {
    const ValidationReport rep = validate(p);
    if (!rep.ok) {
        std::string msg = "invalid tank parameters";
        for (const auto& v : rep.violations)
            msg += "; " + v;
        throw InvalidParams(msg);
    }
    const double w1 = 1.0 / (p.l1 * p.c1);
    const double w2 = 1.0 / (p.l2 * p.c2);
    const double w3 = 1.0 / (p.l3 * p.c3);
    CubicCoefficients c;
    c.c3 = coupling_det(p.k12, p.k13, p.k23);
    c.c2 = (1.0 - p.k12 * p.k12) * w3 + (1.0 - p.k13 * p.k13) * w2 +
           (1.0 - p.k23 * p.k23) * w1;
    c.c1 = w1 * w2 + w1 * w3 + w2 * w3;
    c.c0 = w1 * w2 * w3;
    return c;
}

ModeSet modes_closed_form(const CubicCoefficients& c,
                          CubicPlacement placement) {
    check_finite(c);
    if (c.c3 <= -det_k_tolerance)
        throw InvalidParams(
            "characteristic cubic has a negative leading coefficient");
    check_positive_root_necessary(c);
    if (c.c3 < det_k_tolerance) {
        const auto xs = quadratic_roots(c.c2, c.c1, c.c0);
        return build_set(xs, ModeMethod::closed_form, true);
    }
    const auto xs = trig_roots(c, placement);
    return build_set(xs, ModeMethod::closed_form, false);
}

ModeSet modes_numerical(const CubicCoefficients& c) {
    check_finite(c);
    if (c.c3 <= -det_k_tolerance)
        throw InvalidParams(
            "characteristic cubic has a negative leading coefficient");
    check_positive_root_necessary(c);
    if (c.c3 < det_k_tolerance) {
        const auto xs = quadratic_roots(c.c2, c.c1, c.c0);
        return build_set(xs, ModeMethod::numerical_oracle, true);
    }

    const long double a3 = c.c3, a2 = c.c2, a1 = c.c1, a0 = c.c0;

    // Companion eigenvalues of a (near-)triple root scatter on a circle of
    // radius ~eps^(1/3), far past the reality tolerance below, so coincident
    // roots have to be resolved analytically, as in the closed form.
    const long double disc = a2 * a2 - 3.0L * a1 * a3;
    const long double disc_scale = a2 * a2 + 3.0L * std::fabs(a1 * a3);
    if (disc <= 1e-15L * disc_scale) {
        const long double num = 2.0L * a2 * a2 * a2 - 9.0L * a1 * a2 * a3 +
                                27.0L * a0 * a3 * a3;
        const long double num_scale = 2.0L * std::fabs(a2 * a2 * a2) +
                                      9.0L * std::fabs(a1 * a2 * a3) +
                                      27.0L * std::fabs(a0 * a3 * a3);
        if (disc > -1e-15L * disc_scale &&
            std::fabs(num) <= 1e-12L * num_scale) {
            const long double x = a2 / (3.0L * a3);
            return build_set(std::array<long double, 3>{x, x, x},
                             ModeMethod::numerical_oracle, false);
        }
        throw ComplexRoots(
            "characteristic cubic has complex roots (negative discriminant)");
    }

    // Scale x = sigma*y so the scaled roots have unit product; the companion
    // matrix then stays well conditioned across the ~1e40 dynamic range of
    // raw squared-frequency coefficients.
    const long double sigma = std::cbrt(a0 / a3);
    const double b2 = static_cast<double>(-a2 / (a3 * sigma));
    const double b1 = static_cast<double>(a1 / (a3 * sigma * sigma));
    const double b0 = static_cast<double>(-a0 / (a3 * sigma * sigma * sigma));

    Eigen::Matrix3d comp;
    comp << 0, 0, -b0,
            1, 0, -b1,
            0, 1, -b2;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
    const auto& ev = es.eigenvalues();

    std::array<long double, 3> xs{};
    for (int i = 0; i < 3; ++i) {
        const std::complex<double> lambda = ev(i);
        if (std::abs(lambda.imag()) >
            imag_rel_tolerance * (std::abs(lambda) + 1.0)) {
            std::ostringstream os;
            os << "companion eigenvalue " << lambda.real() << " + "
               << lambda.imag() << "i is not real";
            throw ComplexRoots(os.str());
        }
        long double x = static_cast<long double>(lambda.real()) * sigma;
        // Newton polish against the original coefficients.
        for (int it = 0; it < 8; ++it) {
            const long double pv = ((a3 * x - a2) * x + a1) * x - a0;
            const long double dv = (3.0L * a3 * x - 2.0L * a2) * x + a1;
            if (dv == 0.0L)
                break;
            const long double dx = pv / dv;
            x -= dx;
            if (std::fabs(dx) <= 1e-19L * std::fabs(x))
                break;
        }
        xs[i] = x;
    }
    return build_set(xs, ModeMethod::numerical_oracle, false);
}

ModeSet modes_from_impedance(const TankParams& p) {
    const ValidationReport rep = validate(p);
    if (!rep.ok) {
        std::string msg = "invalid tank parameters";
        for (const auto& v : rep.violations)
            msg += "; " + v;
        throw InvalidParams(msg);
    }
    const auto r = series_resistances(p);
    if (r[0] != 0 || r[1] != 0 || r[2] != 0)
        throw InvalidParams(
            "impedance-pole extraction requires a lossless tank");

    const CubicCoefficients coeffs = characteristic_coefficients(p);
    if (coeffs.c3 < det_k_tolerance)
        throw InvalidParams(
            "impedance-pole extraction expects three finite modes; the "
            "characteristic cubic is degenerate");
    const ModeSet est = modes_numerical(coeffs);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    // The branch solve only goes singular on the measure-zero resonances of
    // the floating sub-network; a one-ulp retreat restores it.
    auto susceptance = [&](double w) -> double {
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double wa = w * (1.0 + attempt * 3e-16);
            try {
                return yin_linear_solve(p, wa / two_pi).imag();
            } catch (const SingularSystem&) {
                continue;
            }
        }
        throw SingularSystem(
            "susceptance evaluation stayed singular after nudging");
    };

    const double lo = 0.1 * est.omega.front();
    const double hi = 2.0 * est.omega.back();

    auto bisect = [&](double wa, double wb) -> double {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (wa + wb);
            if (!(mid > wa && mid < wb))
                break;
            const double bm = susceptance(mid);
            if (bm == 0.0)
                return mid;
            if (bm < 0)
                wa = mid;
            else
                wb = mid;
            if (wb - wa <= 1e-14 * wb)
                break;
        }
        return 0.5 * (wa + wb);
    };

    // Offsets seeded around the cubic estimates resolve mode pairs far
    // closer than the base grid pitch.
    static constexpr double ladder[] = {1e-8, 3e-8, 1e-7, 3e-7, 1e-6, 3e-6,
                                        1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3,
                                        1e-2, 3e-2};

    int n = 2000;
    for (int pass = 0; pass < 2; ++pass, n *= 10) {
        std::vector<double> ws;
        ws.reserve(n + 6 * std::size(ladder) + 2);
        const double ratio = std::log(hi / lo);
        for (int i = 0; i < n; ++i)
            ws.push_back(lo * std::exp(ratio * i / double(n - 1)));
        for (double w : est.omega)
            for (double relOff : ladder) {
                const double up = w * (1.0 + relOff);
                const double dn = w * (1.0 - relOff);
                if (up > lo && up < hi)
                    ws.push_back(up);
                if (dn > lo && dn < hi)
                    ws.push_back(dn);
            }
        std::sort(ws.begin(), ws.end());
        ws.erase(std::unique(ws.begin(), ws.end()), ws.end());

        std::vector<double> roots;
        double prev_w = ws.front();
        double prev_b = susceptance(prev_w);
        for (std::size_t i = 1; i < ws.size(); ++i) {
            const double w = ws[i];
            const double b = susceptance(w);
            if (b == 0.0) {
                roots.push_back(w);
                prev_w = w;
                prev_b = 1.0;
                continue;
            }
            if (prev_b < 0 && b > 0)
                roots.push_back(bisect(prev_w, w));
            prev_w = w;
            prev_b = b;
        }

        if (roots.size() == 3) {
            ModeSet ms;
            ms.method = ModeMethod::impedance_poles;
            ms.omega = roots;
            ms.degenerate.assign(3, false);
            for (std::size_t i = 0; i + 1 < 3; ++i) {
                if ((ms.omega[i + 1] - ms.omega[i]) / ms.omega[i + 1] <
                    degenerate_mode_spacing) {
                    ms.degenerate[i] = true;
                    ms.degenerate[i + 1] = true;
                }
            }
            return ms;
        }
        if (pass == 1)
            throw BracketingFailure(
                "impedance-pole search found " + std::to_string(roots.size()) +
                " susceptance zero crossings, expected 3");
    }
    throw BracketingFailure("impedance-pole search failed"); // unreachable
}

double mode_agreement_rel_err(const ModeSet& a, const ModeSet& b) {
    if (a.omega.size() != b.omega.size())
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.omega.size(); ++i) {
        const double denom = std::max(a.omega[i], b.omega[i]);
        if (denom > 0)
            worst = std::max(worst, std::abs(a.omega[i] - b.omega[i]) / denom);
    }
    return worst;
}

} // namespace tctank
