#include "tctank/metrics.hpp"

#include <cmath>

#include "tctank/errors.hpp"

namespace tctank {

double tuning_range_pct(double f_min_hz, double f_max_hz) {
    if (!(std::isfinite(f_min_hz) && std::isfinite(f_max_hz) &&
          0 < f_min_hz && f_min_hz < f_max_hz))
        throw InvalidParams("tuning range requires 0 < f_min < f_max");
    return 100.0 * (f_max_hz - f_min_hz) / (0.5 * (f_max_hz + f_min_hz));
}

double fom(const OscMetricsInput& in) {
    if (!(std::isfinite(in.pn_dbchz)))
        throw InvalidParams("phase noise must be finite");
    if (!(in.f0_hz > 0 && in.offset_hz > 0 && in.offset_hz < in.f0_hz))
        throw InvalidParams("fom requires 0 < offset < f0");
    if (!(in.p_mw > 0))
        throw InvalidParams("fom requires positive power");
    return -in.pn_dbchz + 20.0 * std::log10(in.f0_hz / in.offset_hz) -
           10.0 * std::log10(in.p_mw);
}

double fom_a(const OscMetricsInput& in) {
    if (!(in.area_mm2 > 0))
        throw InvalidParams("fom_a requires positive area");
    return fom(in) + 10.0 * std::log10(1.0 / in.area_mm2);
}

double fom_t(const OscMetricsInput& in) {
    return fom(in) + 20.0 * std::log10(
                         tuning_range_pct(in.f_min_hz, in.f_max_hz) / 10.0);
}

} // namespace tctank
