#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tctank/tank.hpp"

using namespace tctank;

namespace {

TankParams generic_tank() {
    TankParams p;
    p.l1 = 300e-12;
    p.l2 = 210e-12;
    p.l3 = 117e-12;
    p.c1 = 200e-15;
    p.c2 = 150e-15;
    p.c3 = 80e-15;
    p.k12 = 0.3;
    p.k13 = 0.2;
    p.k23 = 0.25;
    return p;
}

} // namespace

TEST_CASE("coupling determinant exact values") {
    CHECK(coupling_det(0, 0, 0) == 1.0);
    CHECK(coupling_det(0.5, 0.5, 0.5) == 0.5);
    // fully symmetric in the three coefficients
    CHECK(coupling_det(0.1, 0.2, 0.3) == coupling_det(0.3, 0.1, 0.2));
    CHECK(coupling_det(0.1, 0.2, 0.3) == coupling_det(0.2, 0.3, 0.1));
    // strong incompatible couplings drive it negative
    CHECK(coupling_det(0.9, 0.9, -0.9) < 0.0);
    // k23 -> 1 with the others zero collapses it to zero
    CHECK(coupling_det(0, 0, 1.0) == 0.0);
}

TEST_CASE("mutual inductances") {
    const TankParams p = generic_tank();
    const Mutuals m = mutual_inductances(p);
    // 0.3 * sqrt(300p * 210p), frozen independently
    CHECK(m.m12 == doctest::Approx(7.529940238806679e-11).epsilon(1e-15));
    CHECK(m.m13 == doctest::Approx(p.k13 * std::sqrt(p.l1 * p.l3)).epsilon(1e-15));
    CHECK(m.m23 == doctest::Approx(p.k23 * std::sqrt(p.l2 * p.l3)).epsilon(1e-15));

    TankParams bad = p;
    bad.l2 = 0.0;
    CHECK_THROWS_AS(mutual_inductances(bad), InvalidParams);
}

TEST_CASE("uncoupled frequencies") {
    TankParams p = generic_tank();
    p.l1 = 300e-12;
    p.c1 = 146.6e-15;
    const UncoupledFrequencies u = uncoupled_frequencies(p);
    const double f1 = u.nu1 / (2.0 * std::numbers::pi);
    CHECK(f1 == doctest::Approx(23998965374.178616).epsilon(1e-14));

    const TankParams g = generic_tank();
    const UncoupledFrequencies ug = uncoupled_frequencies(g);
    CHECK(ug.nu1 / (2.0 * std::numbers::pi) ==
          doctest::Approx(20546814802.049995).epsilon(1e-14));
    CHECK(ug.nu2 / (2.0 * std::numbers::pi) ==
          doctest::Approx(28357298498.160786).epsilon(1e-14));
    CHECK(ug.nu3 / (2.0 * std::numbers::pi) ==
          doctest::Approx(52021420545.533554).epsilon(1e-14));

    TankParams bad = g;
    bad.c3 = -1e-15;
    CHECK_THROWS_AS(uncoupled_frequencies(bad), InvalidParams);
}

TEST_CASE("validation reports every violation at once") {
    const ValidationReport good = validate(generic_tank());
    CHECK(good.ok);
    CHECK(good.violations.empty());
    CHECK(good.det_k == doctest::Approx(0.8375).epsilon(1e-15));

    TankParams bad = generic_tank();
    bad.l2 = 0.0;
    bad.c3 = -1e-15;
    bad.k12 = 1.5;
    const ValidationReport rep = validate(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.violations.size() >= 3);

    bool saw_l2 = false, saw_c3 = false, saw_k12 = false;
    for (const auto& v : rep.violations) {
        if (v.find("L2") != std::string::npos) saw_l2 = true;
        if (v.find("C3") != std::string::npos) saw_c3 = true;
        if (v.find("k12") != std::string::npos) saw_k12 = true;
    }
    CHECK(saw_l2);
    CHECK(saw_c3);
    CHECK(saw_k12);
}

TEST_CASE("validation rejects an indefinite coupling matrix") {
    TankParams p = generic_tank();
    p.k12 = 0.9;
    p.k13 = 0.9;
    p.k23 = -0.9;
    const ValidationReport rep = validate(p);
    CHECK_FALSE(rep.ok);
    CHECK(rep.det_k < 0.0);

    bool saw_det = false;
    for (const auto& v : rep.violations)
        if (v.find("det K") != std::string::npos) saw_det = true;
    CHECK(saw_det);
}

TEST_CASE("loss spec validation") {
    TankParams p = generic_tank();

    p.loss = LossSpec::series(1.0, 2.0, -3.0);
    CHECK_FALSE(validate(p).ok);
    p.loss = LossSpec::series(1.0, 2.0, 3.0);
    CHECK(validate(p).ok);

    p.loss = LossSpec::q_at(15.0, 15.0, 0.0, 24e9);
    CHECK_FALSE(validate(p).ok);
    p.loss = LossSpec::q_at(15.0, 12.0, 10.0, 24e9);
    CHECK(validate(p).ok);
}

TEST_CASE("series resistances per loss mode") {
    TankParams p = generic_tank();
    auto r = series_resistances(p);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == 0.0);

    p.loss = LossSpec::series(0.5, 0.7, 0.9);
    r = series_resistances(p);
    CHECK(r[0] == 0.5);
    CHECK(r[1] == 0.7);
    CHECK(r[2] == 0.9);

    // r_i = 2*pi*f_ref*L_i / Q_i
    p.loss = LossSpec::q_at(15.0, 12.0, 10.0, 24e9);
    r = series_resistances(p);
    const double w = 2.0 * std::numbers::pi * 24e9;
    CHECK(r[0] == doctest::Approx(w * p.l1 / 15.0).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(w * p.l2 / 12.0).epsilon(1e-15));
    CHECK(r[2] == doctest::Approx(w * p.l3 / 10.0).epsilon(1e-15));
}

TEST_CASE("quantity parsing") {
    // exact-power suffixes compare exactly
    CHECK(parse_quantity("1k") == 1000.0);
    CHECK(parse_quantity("2M") == 2e6);
    CHECK(parse_quantity("24G") == 24e9);

    CHECK(parse_quantity("300p") == doctest::Approx(300e-12).epsilon(1e-15));
    CHECK(parse_quantity("146.6f") == doctest::Approx(146.6e-15).epsilon(1e-15));
    CHECK(parse_quantity("2.5n") == doctest::Approx(2.5e-9).epsilon(1e-15));
    CHECK(parse_quantity("3u") == doctest::Approx(3e-6).epsilon(1e-15));
    CHECK(parse_quantity("5.4m") == doctest::Approx(5.4e-3).epsilon(1e-15));

    CHECK(parse_quantity("1.5e-13") == 1.5e-13);
    CHECK(parse_quantity("-0.25") == -0.25);
    CHECK(parse_quantity("  300p  ") == doctest::Approx(300e-12).epsilon(1e-15));

    CHECK_THROWS_AS(parse_quantity(""), ConfigError);
    CHECK_THROWS_AS(parse_quantity("   "), ConfigError);
    CHECK_THROWS_AS(parse_quantity("xyz"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("300q"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("300 p"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("inf"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("nan"), ConfigError);
}

TEST_CASE("json round trip is byte stable") {
    const TankParams p = generic_tank();
    const std::string once = to_json_string(p);
    const TankParams q = params_from_json_string(once);
    CHECK(to_json_string(q) == once);

    TankParams lossy = p;
    lossy.loss = LossSpec::q_at(15.0, 12.0, 10.0, 24e9);
    const std::string lj = to_json_string(lossy);
    const TankParams lq = params_from_json_string(lj);
    CHECK(to_json_string(lq) == lj);
    CHECK(lq.loss.mode == LossMode::q_at_reference);
    CHECK(lq.loss.q2 == 12.0);
    CHECK(lq.loss.f_ref_hz == 24e9);
}

TEST_CASE("json parsing accepts engineering strings") {
    const std::string text = R"({
        "L1": "300p", "L2": "210p", "L3": "117p",
        "C1": "200f", "C2": "150f", "C3": "80f",
        "k12": 0.3, "k13": 0.2, "k23": 0.25
    })";
    const TankParams p = params_from_json_string(text);
    CHECK(p.l1 == doctest::Approx(300e-12).epsilon(1e-15));
    CHECK(p.c3 == doctest::Approx(80e-15).epsilon(1e-15));
    CHECK(p.k23 == 0.25);
    CHECK(p.loss.mode == LossMode::lossless);
}

TEST_CASE("json parsing rejects unknown keys by name") {
    const std::string text = R"({
        "L1": 3e-10, "L2": 2.1e-10, "L3": 1.17e-10,
        "C1": 2e-13, "C2": 1.5e-13, "C3": 8e-14,
        "k12": 0.3, "k13": 0.2, "k23": 0.25,
        "C4": 1e-13
    })";
    CHECK_THROWS_WITH_AS(params_from_json_string(text),
                         doctest::Contains("C4"), ConfigError);
}

TEST_CASE("json parsing unwraps a saved design result") {
    const TankParams p = generic_tank();
    const std::string wrapped =
        "{\"params\": " + to_json_string(p) + ", \"feasible\": true}";
    // the sibling keys belong to the wrapper, not the tank
    const std::string ok = "{\"params\": " + to_json_string(p) + "}";
    const TankParams q = params_from_json_string(ok);
    CHECK(to_json_string(q) == to_json_string(p));
    const TankParams r = params_from_json_string(wrapped);
    CHECK(to_json_string(r) == to_json_string(p));
}

TEST_CASE("parameter digest") {
    const TankParams p = generic_tank();
    const std::string d1 = params_digest(p);
    CHECK(d1.size() == 16);
    CHECK(d1.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(params_digest(p) == d1);

    TankParams q = p;
    q.c2 = p.c2 * (1.0 + 1e-12);
    CHECK(params_digest(q) != d1);
}
