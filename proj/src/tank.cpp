#include "tctank/tank.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "json_io.hpp"

namespace tctank {

LossSpec LossSpec::lossless() { return {}; }

LossSpec LossSpec::series(double r1, double r2, double r3) {
    LossSpec s;
    s.mode = LossMode::series_resistance;
    s.r1 = r1;
    s.r2 = r2;
    s.r3 = r3;
    return s;
}

LossSpec LossSpec::q_at(double q1, double q2, double q3, double f_ref_hz) {
    LossSpec s;
    s.mode = LossMode::q_at_reference;
    s.q1 = q1;
    s.q2 = q2;
    s.q3 = q3;
    s.f_ref_hz = f_ref_hz;
    return s;
}

double coupling_det(double k12, double k13, double k23) {
    return 1.0 - (k12 * k12 + k13 * k13 + k23 * k23) + 2.0 * k12 * k13 * k23;
}

ValidationReport validate(const TankParams& p) {
    ValidationReport rep;
    rep.det_k = coupling_det(p.k12, p.k13, p.k23);

    auto positive = [&](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0))
            rep.violations.push_back(std::string(name) +
                                     " must be finite and positive");
    };
    positive(p.l1, "L1");
    positive(p.l2, "L2");
    positive(p.l3, "L3");
    positive(p.c1, "C1");
    positive(p.c2, "C2");
    positive(p.c3, "C3");

    auto coupling = [&](double k, const char* name) {
        if (!(std::isfinite(k) && std::abs(k) < 1.0))
            rep.violations.push_back(std::string(name) +
                                     " must satisfy |k| < 1");
    };
    coupling(p.k12, "k12");
    coupling(p.k13, "k13");
    coupling(p.k23, "k23");

    if (!(rep.det_k > 0.0))
        rep.violations.push_back(
            "coupling matrix is not positive definite (det K <= 0)");

    auto nonneg = [&](double v, const char* name) {
        if (!(std::isfinite(v) && v >= 0.0))
            rep.violations.push_back(std::string(name) +
                                     " must be finite and non-negative");
    };
    switch (p.loss.mode) {
    case LossMode::lossless:
        break;
    case LossMode::series_resistance:
        nonneg(p.loss.r1, "r1");
        nonneg(p.loss.r2, "r2");
        nonneg(p.loss.r3, "r3");
        break;
    case LossMode::q_at_reference:
        positive(p.loss.q1, "Q1");
        positive(p.loss.q2, "Q2");
        positive(p.loss.q3, "Q3");
        positive(p.loss.f_ref_hz, "f_ref");
        break;
    }

    rep.ok = rep.violations.empty();
    return rep;
}

Mutuals mutual_inductances(const TankParams& p) {
    if (!(p.l1 > 0 && p.l2 > 0 && p.l3 > 0))
        throw InvalidParams("mutual_inductances: inductances must be positive");
    Mutuals m;
    m.m12 = p.k12 * std::sqrt(p.l1 * p.l2);
    m.m13 = p.k13 * std::sqrt(p.l1 * p.l3);
    m.m23 = p.k23 * std::sqrt(p.l2 * p.l3);
    return m;
}

UncoupledFrequencies uncoupled_frequencies(const TankParams& p) {
    if (!(p.l1 > 0 && p.l2 > 0 && p.l3 > 0 && p.c1 > 0 && p.c2 > 0 &&
          p.c3 > 0))
        throw InvalidParams(
            "uncoupled_frequencies: L and C must be positive");
    UncoupledFrequencies u;
    u.nu1 = 1.0 / std::sqrt(p.l1 * p.c1);
    u.nu2 = 1.0 / std::sqrt(p.l2 * p.c2);
    u.nu3 = 1.0 / std::sqrt(p.l3 * p.c3);
    return u;
}

std::array<double, 3> series_resistances(const TankParams& p) {
    switch (p.loss.mode) {
    case LossMode::lossless:
        return {0.0, 0.0, 0.0};
    case LossMode::series_resistance:
        return {p.loss.r1, p.loss.r2, p.loss.r3};
    case LossMode::q_at_reference: {
        if (!(p.loss.q1 > 0 && p.loss.q2 > 0 && p.loss.q3 > 0 &&
              p.loss.f_ref_hz > 0))
            throw InvalidParams(
                "series_resistances: Q factors and f_ref must be positive");
        const double w = 2.0 * std::numbers::pi * p.loss.f_ref_hz;
        return {w * p.l1 / p.loss.q1, w * p.l2 / p.loss.q2,
                w * p.l3 / p.loss.q3};
    }
    }
    throw Error("series_resistances: unreachable");
}

double parse_quantity(const std::string& text) {
    const auto b = text.find_first_not_of(" \t");
    if (b == std::string::npos)
        throw ConfigError("empty quantity");
    const auto e = text.find_last_not_of(" \t");
    std::string t = text.substr(b, e - b + 1);

    static constexpr std::pair<char, double> suffixes[] = {
        {'f', 1e-15}, {'p', 1e-12}, {'n', 1e-9}, {'u', 1e-6},
        {'m', 1e-3},  {'k', 1e3},   {'M', 1e6},  {'G', 1e9}};
    double scale = 1.0;
    for (auto [c, s] : suffixes) {
        if (!t.empty() && t.back() == c) {
            scale = s;
            t.pop_back();
            break;
        }
    }

    double value = 0.0;
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ConfigError("cannot parse quantity '" + text + "'");
    return value * scale;
}

std::string to_json_string(const TankParams& p) {
    return detail::params_to_json(p).dump() + "\n";
}

TankParams params_from_json_string(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ConfigError(std::string("tank parameters: ") + e.what());
    }
    return detail::params_from_json(j, "tank", text);
}

std::string params_digest(const TankParams& p) {
    const std::string s = to_json_string(p);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

} // namespace tctank

namespace tctank::detail {

namespace {

std::string loss_mode_name(LossMode m) {
    switch (m) {
    case LossMode::lossless:
        return "lossless";
    case LossMode::series_resistance:
        return "series_resistance";
    case LossMode::q_at_reference:
        return "q_at_reference";
    }
    return "lossless";
}

int line_of_key(const std::string& text, const std::string& key) {
    if (text.empty())
        return 0;
    const std::string needle = "\"" + key + "\"";
    const auto pos = text.find(needle);
    if (pos == std::string::npos)
        return 0;
    int line = 1;
    for (std::size_t i = 0; i < pos; ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

} // namespace

void require_known_keys(const json& obj,
                        std::initializer_list<const char*> known,
                        const std::string& section,
                        const std::string& source_text) {
    for (const auto& item : obj.items()) {
        bool found = false;
        for (const char* k : known)
            if (item.key() == k) {
                found = true;
                break;
            }
        if (!found) {
            std::string msg =
                "unknown key '" + item.key() + "' in " + section;
            if (int line = line_of_key(source_text, item.key()))
                msg += " (line " + std::to_string(line) + ")";
            throw ConfigError(msg);
        }
    }
}

double quantity_field(const json& obj, const std::string& key,
                      const std::string& section) {
    if (!obj.contains(key))
        throw ConfigError("missing key '" + key + "' in " + section);
    const json& v = obj.at(key);
    if (v.is_number())
        return v.get<double>();
    if (v.is_string())
        return parse_quantity(v.get<std::string>());
    throw ConfigError("key '" + key + "' in " + section +
                      " must be a number or an engineering-notation string");
}

double number_field(const json& obj, const std::string& key,
                    const std::string& section) {
    if (!obj.contains(key))
        throw ConfigError("missing key '" + key + "' in " + section);
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("key '" + key + "' in " + section +
                          " must be a number");
    return v.get<double>();
}

json params_to_json(const TankParams& p) {
    json loss;
    loss["mode"] = loss_mode_name(p.loss.mode);
    if (p.loss.mode == LossMode::series_resistance) {
        loss["r1"] = p.loss.r1;
        loss["r2"] = p.loss.r2;
        loss["r3"] = p.loss.r3;
    } else if (p.loss.mode == LossMode::q_at_reference) {
        loss["q1"] = p.loss.q1;
        loss["q2"] = p.loss.q2;
        loss["q3"] = p.loss.q3;
        loss["f_ref"] = p.loss.f_ref_hz;
    }
    json j;
    j["L1"] = p.l1;
    j["L2"] = p.l2;
    j["L3"] = p.l3;
    j["C1"] = p.c1;
    j["C2"] = p.c2;
    j["C3"] = p.c3;
    j["k12"] = p.k12;
    j["k13"] = p.k13;
    j["k23"] = p.k23;
    j["loss"] = loss;
    return j;
}

TankParams params_from_json(const json& j, const std::string& section,
                            const std::string& source_text) {
    if (!j.is_object())
        throw ConfigError(section + " must be a JSON object");
    // Saved design results wrap the parameter block.
    if (j.contains("params"))
        return params_from_json(j.at("params"), section + ".params",
                                source_text);

    require_known_keys(j,
                       {"L1", "L2", "L3", "C1", "C2", "C3", "k12", "k13",
                        "k23", "loss"},
                       section, source_text);

    TankParams p;
    p.l1 = quantity_field(j, "L1", section);
    p.l2 = quantity_field(j, "L2", section);
    p.l3 = quantity_field(j, "L3", section);
    p.c1 = quantity_field(j, "C1", section);
    p.c2 = quantity_field(j, "C2", section);
    p.c3 = quantity_field(j, "C3", section);
    p.k12 = number_field(j, "k12", section);
    p.k13 = number_field(j, "k13", section);
    p.k23 = number_field(j, "k23", section);

    if (j.contains("loss")) {
        const json& l = j.at("loss");
        const std::string lsec = section + ".loss";
        if (!l.is_object())
            throw ConfigError(lsec + " must be a JSON object");
        if (!l.contains("mode"))
            throw ConfigError("missing key 'mode' in " + lsec);
        const std::string mode = l.at("mode").get<std::string>();
        if (mode == "lossless") {
            require_known_keys(l, {"mode"}, lsec, source_text);
        } else if (mode == "series_resistance") {
            require_known_keys(l, {"mode", "r1", "r2", "r3"}, lsec,
                               source_text);
            p.loss = LossSpec::series(quantity_field(l, "r1", lsec),
                                      quantity_field(l, "r2", lsec),
                                      quantity_field(l, "r3", lsec));
        } else if (mode == "q_at_reference") {
            require_known_keys(l, {"mode", "q1", "q2", "q3", "f_ref"}, lsec,
                               source_text);
            p.loss = LossSpec::q_at(number_field(l, "q1", lsec),
                                    number_field(l, "q2", lsec),
                                    number_field(l, "q3", lsec),
                                    quantity_field(l, "f_ref", lsec));
        } else {
            throw ConfigError("loss mode '" + mode +
                              "' is not one of lossless, series_resistance, "
                              "q_at_reference");
        }
    }
    return p;
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string dump_artifact(const json& j) { return j.dump(2) + "\n"; }

} // namespace tctank::detail
