#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tctank/errors.hpp"
#include "tctank/metrics.hpp"

using namespace tctank;

namespace {

OscMetricsInput reference_input() {
    OscMetricsInput in;
    in.pn_dbchz = -115.59;
    in.f0_hz = 23.99e9;
    in.offset_hz = 1e6;
    in.p_mw = 5.4;
    in.area_mm2 = 0.02268;
    in.f_min_hz = 21.03e9;
    in.f_max_hz = 23.99e9;
    return in;
}

} // namespace

TEST_CASE("tuning range") {
    CHECK(tuning_range_pct(10e9, 30e9) == 100.0);
    CHECK(tuning_range_pct(21.03e9, 23.99e9) ==
          doctest::Approx(13.149711239449134).epsilon(1e-14));

    CHECK_THROWS_AS(tuning_range_pct(10e9, 10e9), InvalidParams);
    CHECK_THROWS_AS(tuning_range_pct(30e9, 10e9), InvalidParams);
    CHECK_THROWS_AS(tuning_range_pct(0.0, 10e9), InvalidParams);
}

TEST_CASE("figures of merit, frozen reference point") {
    const OscMetricsInput in = reference_input();
    CHECK(fom(in) == doctest::Approx(195.86666736112693).epsilon(1e-14));
    CHECK(fom_t(in) == doctest::Approx(198.2449916822953).epsilon(1e-14));
    CHECK(fom_a(in) == doctest::Approx(212.31023685891824).epsilon(1e-14));
}

TEST_CASE("fom depends only on the carrier-to-offset ratio") {
    OscMetricsInput a = reference_input();
    OscMetricsInput b = a;
    b.f0_hz *= 7.0;
    b.offset_hz *= 7.0;
    CHECK(fom(b) == doctest::Approx(fom(a)).epsilon(1e-12));
}

TEST_CASE("area and tuning normalizations have exact fixed points") {
    OscMetricsInput in = reference_input();
    in.area_mm2 = 1.0;
    CHECK(fom_a(in) == fom(in));

    // 19..21 GHz is exactly a 10% band, so the tuning bonus vanishes
    in.f_min_hz = 19e9;
    in.f_max_hz = 21e9;
    CHECK(tuning_range_pct(in.f_min_hz, in.f_max_hz) == 10.0);
    CHECK(fom_t(in) == fom(in));
}

TEST_CASE("metric input validation") {
    OscMetricsInput in = reference_input();
    in.p_mw = 0.0;
    CHECK_THROWS_AS(fom(in), InvalidParams);

    in = reference_input();
    in.offset_hz = 30e9; // beyond the carrier
    CHECK_THROWS_AS(fom(in), InvalidParams);

    in = reference_input();
    in.area_mm2 = 0.0;
    CHECK_THROWS_AS(fom_a(in), InvalidParams);

    in = reference_input();
    in.f_min_hz = in.f_max_hz;
    CHECK_THROWS_AS(fom_t(in), InvalidParams);
}
