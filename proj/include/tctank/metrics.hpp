#pragma once

namespace tctank {

struct OscMetricsInput {
    double pn_dbchz = 0;   // phase noise at offset_hz, dBc/Hz
    double f0_hz = 0;      // carrier
    double offset_hz = 0;
    double p_mw = 0;       // DC power, milliwatts
    double area_mm2 = 0;
    double f_min_hz = 0;   // tuning band edges
    double f_max_hz = 0;
};

// 100 * (f_max - f_min) / band center.
double tuning_range_pct(double f_min_hz, double f_max_hz);

// -PN + 20*log10(f0/offset) - 10*log10(P/1mW)
double fom(const OscMetricsInput& in);

// fom + 10*log10(1mm^2/area)
double fom_a(const OscMetricsInput& in);

// fom + 20*log10(TR%/10)
double fom_t(const OscMetricsInput& in);

} // namespace tctank
