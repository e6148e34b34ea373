#include "tctank/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json_io.hpp"
#include "tctank/modes.hpp"

namespace tctank {

namespace {

using detail::json;

constexpr double two_pi = 2.0 * std::numbers::pi;

Command command_from_name(const std::string& name) {
    if (name == "analyze")
        return Command::analyze;
    if (name == "modes")
        return Command::modes;
    if (name == "sweep")
        return Command::sweep;
    if (name == "design")
        return Command::design;
    if (name == "fom")
        return Command::fom;
    throw ConfigError("unknown command '" + name + "'");
}

const char* command_name(Command c) {
    switch (c) {
    case Command::analyze:
        return "analyze";
    case Command::modes:
        return "modes";
    case Command::sweep:
        return "sweep";
    case Command::design:
        return "design";
    case Command::fom:
        return "fom";
    }
    return "analyze";
}

int int_field(const json& obj, const std::string& key,
              const std::string& section) {
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError("key '" + key + "' in " + section +
                          " must be an integer");
    return v.get<int>();
}

std::string string_field(const json& obj, const std::string& key,
                         const std::string& section) {
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError("key '" + key + "' in " + section +
                          " must be a string");
    return v.get<std::string>();
}

std::vector<double> number_array(const json& obj, const std::string& key,
                                 const std::string& section) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty())
        throw ConfigError("key '" + key + "' in " + section +
                          " must be a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw ConfigError("key '" + key + "' in " + section +
                              " must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

Range range_field(const json& obj, const std::string& key,
                  const std::string& section) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2)
        throw ConfigError("key '" + key + "' in " + section +
                          " must be a [lo, hi] pair");
    Range r;
    if (!v[0].is_number() || !v[1].is_number())
        throw ConfigError("key '" + key + "' in " + section +
                          " must contain numbers");
    r.lo = v[0].get<double>();
    r.hi = v[1].get<double>();
    return r;
}

FrequencyGrid grid_from_json(const json& g, const std::string& text) {
    detail::require_known_keys(g, {"start_hz", "stop_hz", "points", "spacing"},
                               "grid", text);
    FrequencyGrid grid;
    grid.start_hz = detail::quantity_field(g, "start_hz", "grid");
    grid.stop_hz = detail::quantity_field(g, "stop_hz", "grid");
    if (!g.contains("points"))
        throw ConfigError("missing key 'points' in grid");
    grid.points = int_field(g, "points", "grid");
    if (g.contains("spacing")) {
        const std::string s = string_field(g, "spacing", "grid");
        if (s == "linear")
            grid.spacing = GridSpacing::linear;
        else if (s == "logarithmic")
            grid.spacing = GridSpacing::logarithmic;
        else
            throw ConfigError("grid spacing '" + s +
                              "' is not linear or logarithmic");
    }
    return grid;
}

SweepSpec sweep_from_json(const json& s, const std::string& text) {
    detail::require_known_keys(s,
                               {"x_min", "x_max", "x_points", "k12_values",
                                "k13_values", "k23_values", "constraint"},
                               "sweep", text);
    SweepSpec spec;
    if (s.contains("x_min"))
        spec.x_min = detail::number_field(s, "x_min", "sweep");
    if (s.contains("x_max"))
        spec.x_max = detail::number_field(s, "x_max", "sweep");
    if (s.contains("x_points"))
        spec.x_points = int_field(s, "x_points", "sweep");
    if (s.contains("k12_values"))
        spec.k12_values = number_array(s, "k12_values", "sweep");
    if (s.contains("k13_values"))
        spec.k13_values = number_array(s, "k13_values", "sweep");
    if (s.contains("k23_values"))
        spec.k23_values = number_array(s, "k23_values", "sweep");
    if (s.contains("constraint")) {
        const std::string c = string_field(s, "constraint", "sweep");
        if (c == "nu2_equals_nu3")
            spec.constraint = ShapeConstraint::nu2_equals_nu3;
        else if (c == "free")
            spec.constraint = ShapeConstraint::free;
        else
            throw ConfigError("sweep constraint '" + c +
                              "' is not nu2_equals_nu3 or free");
    }
    return spec;
}

DesignSpec design_from_json(const json& d, const std::string& text) {
    detail::require_known_keys(
        d,
        {"f0_target_hz", "band_center_ratio", "fractional_bandwidth_target",
         "k23_range", "k12_range", "k13_range", "x_range", "fixed_inductances",
         "search_budget"},
        "design", text);
    DesignSpec spec;
    if (d.contains("f0_target_hz"))
        spec.f0_target_hz = detail::quantity_field(d, "f0_target_hz", "design");
    if (d.contains("band_center_ratio"))
        spec.band_center_ratio =
            detail::number_field(d, "band_center_ratio", "design");
    if (d.contains("fractional_bandwidth_target"))
        spec.fractional_bandwidth_target =
            detail::number_field(d, "fractional_bandwidth_target", "design");
    if (d.contains("k23_range"))
        spec.k23_range = range_field(d, "k23_range", "design");
    if (d.contains("k12_range"))
        spec.k12_range = range_field(d, "k12_range", "design");
    if (d.contains("k13_range"))
        spec.k13_range = range_field(d, "k13_range", "design");
    if (d.contains("x_range"))
        spec.x_range = range_field(d, "x_range", "design");
    if (d.contains("fixed_inductances")) {
        const json& v = d.at("fixed_inductances");
        if (!v.is_array() || v.size() != 3)
            throw ConfigError(
                "design fixed_inductances must be an [L1, L2, L3] triple");
        std::array<double, 3> ls{};
        for (int i = 0; i < 3; ++i) {
            if (v[i].is_number())
                ls[i] = v[i].get<double>();
            else if (v[i].is_string())
                ls[i] = parse_quantity(v[i].get<std::string>());
            else
                throw ConfigError("design fixed_inductances entries must be "
                                  "numbers or engineering-notation strings");
        }
        spec.fixed_inductances = ls;
    }
    if (d.contains("search_budget"))
        spec.search_budget = int_field(d, "search_budget", "design");
    return spec;
}

OscMetricsInput fom_from_json(const json& f, const std::string& text) {
    detail::require_known_keys(f,
                               {"pn_dbchz", "f0_hz", "offset_hz", "p_mw",
                                "area_mm2", "f_min_hz", "f_max_hz"},
                               "fom", text);
    OscMetricsInput in;
    if (f.contains("pn_dbchz"))
        in.pn_dbchz = detail::number_field(f, "pn_dbchz", "fom");
    if (f.contains("f0_hz"))
        in.f0_hz = detail::quantity_field(f, "f0_hz", "fom");
    if (f.contains("offset_hz"))
        in.offset_hz = detail::quantity_field(f, "offset_hz", "fom");
    if (f.contains("p_mw"))
        in.p_mw = detail::number_field(f, "p_mw", "fom");
    if (f.contains("area_mm2"))
        in.area_mm2 = detail::number_field(f, "area_mm2", "fom");
    if (f.contains("f_min_hz"))
        in.f_min_hz = detail::quantity_field(f, "f_min_hz", "fom");
    if (f.contains("f_max_hz"))
        in.f_max_hz = detail::quantity_field(f, "f_max_hz", "fom");
    return in;
}

OutputFormat default_format(Command c) {
    switch (c) {
    case Command::analyze:
    case Command::sweep:
        return OutputFormat::csv;
    default:
        return OutputFormat::json;
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot open '" + tmp.string() +
                              "' for writing");
        out << content;
        out.flush();
        if (!out)
            throw ConfigError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw ConfigError("cannot move '" + tmp.string() + "' to '" + path +
                          "': " + ec.message());
}

void emit_error(const std::string& type, const std::string& message) {
    json j;
    j["error"] = {{"type", type}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

std::string fmt(double v) { return detail::format_double(v); }

} // namespace

RunConfig parse_config(const std::string& json_text,
                       const std::string& source_name) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
    if (!j.is_object())
        throw ConfigError(source_name + ": config must be a JSON object");
    detail::require_known_keys(j,
                               {"command", "tank", "grid", "method", "sweep",
                                "design", "fom", "output", "seed"},
                               "config", json_text);
    RunConfig c;
    if (j.contains("command"))
        c.command = command_from_name(string_field(j, "command", "config"));
    if (j.contains("tank"))
        c.tank = detail::params_from_json(j.at("tank"), "tank", json_text);
    if (j.contains("grid"))
        c.grid = grid_from_json(j.at("grid"), json_text);
    if (j.contains("method")) {
        const std::string m = string_field(j, "method", "config");
        if (m == "linear_solve")
            c.method = SweepMethod::linear_solve;
        else if (m == "closed_form")
            c.method = SweepMethod::closed_form;
        else
            throw ConfigError("method '" + m +
                              "' is not linear_solve or closed_form");
    }
    if (j.contains("sweep"))
        c.sweep = sweep_from_json(j.at("sweep"), json_text);
    if (j.contains("design"))
        c.design = design_from_json(j.at("design"), json_text);
    if (j.contains("fom"))
        c.fom = fom_from_json(j.at("fom"), json_text);
    if (j.contains("output")) {
        const json& o = j.at("output");
        detail::require_known_keys(o, {"path", "format"}, "output", json_text);
        if (o.contains("path"))
            c.output.path = string_field(o, "path", "output");
        if (o.contains("format")) {
            const std::string f = string_field(o, "format", "output");
            if (f == "csv")
                c.output.format = OutputFormat::csv;
            else if (f == "json")
                c.output.format = OutputFormat::json;
            else
                throw ConfigError("output format '" + f +
                                  "' is not csv or json");
        }
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer())
            throw ConfigError("seed must be an integer");
        c.seed = s.get<long long>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string config_to_json_string(const RunConfig& c) {
    json j;
    if (c.command)
        j["command"] = command_name(*c.command);
    if (c.tank)
        j["tank"] = detail::params_to_json(*c.tank);
    if (c.grid) {
        j["grid"] = {{"start_hz", c.grid->start_hz},
                     {"stop_hz", c.grid->stop_hz},
                     {"points", c.grid->points},
                     {"spacing", c.grid->spacing == GridSpacing::linear
                                     ? "linear"
                                     : "logarithmic"}};
    }
    if (c.method)
        j["method"] = *c.method == SweepMethod::linear_solve ? "linear_solve"
                                                             : "closed_form";
    if (c.sweep) {
        j["sweep"] = {
            {"x_min", c.sweep->x_min},
            {"x_max", c.sweep->x_max},
            {"x_points", c.sweep->x_points},
            {"k12_values", c.sweep->k12_values},
            {"k13_values", c.sweep->k13_values},
            {"k23_values", c.sweep->k23_values},
            {"constraint",
             c.sweep->constraint == ShapeConstraint::nu2_equals_nu3
                 ? "nu2_equals_nu3"
                 : "free"}};
    }
    if (c.design) {
        json d;
        d["f0_target_hz"] = c.design->f0_target_hz;
        d["band_center_ratio"] = c.design->band_center_ratio;
        d["fractional_bandwidth_target"] =
            c.design->fractional_bandwidth_target;
        d["k23_range"] = {c.design->k23_range.lo, c.design->k23_range.hi};
        d["k12_range"] = {c.design->k12_range.lo, c.design->k12_range.hi};
        d["k13_range"] = {c.design->k13_range.lo, c.design->k13_range.hi};
        d["x_range"] = {c.design->x_range.lo, c.design->x_range.hi};
        if (c.design->fixed_inductances)
            d["fixed_inductances"] = *c.design->fixed_inductances;
        d["search_budget"] = c.design->search_budget;
        j["design"] = d;
    }
    if (c.fom) {
        j["fom"] = {{"pn_dbchz", c.fom->pn_dbchz},
                    {"f0_hz", c.fom->f0_hz},
                    {"offset_hz", c.fom->offset_hz},
                    {"p_mw", c.fom->p_mw},
                    {"area_mm2", c.fom->area_mm2},
                    {"f_min_hz", c.fom->f_min_hz},
                    {"f_max_hz", c.fom->f_max_hz}};
    }
    json o;
    if (!c.output.path.empty())
        o["path"] = c.output.path;
    if (c.output.format)
        o["format"] = *c.output.format == OutputFormat::csv ? "csv" : "json";
    if (!o.empty())
        j["output"] = o;
    if (c.seed != 0)
        j["seed"] = c.seed;
    return detail::dump_artifact(j);
}

int run(const RunConfig& cfg) {
    try {
        if (!cfg.command)
            throw ConfigError("no command specified");
        const Command cmd = *cfg.command;
        const OutputFormat format =
            cfg.output.format.value_or(default_format(cmd));

        std::string artifact;
        std::string summary;
        int status = 0;

        switch (cmd) {
        case Command::analyze: {
            if (!cfg.tank)
                throw ConfigError("analyze requires tank parameters");
            if (!cfg.grid)
                throw ConfigError("analyze requires a frequency grid");
            const SweepMethod method =
                cfg.method.value_or(SweepMethod::linear_solve);
            const ImpedanceSweep sw = sweep(*cfg.tank, *cfg.grid, method);
            artifact = format == OutputFormat::csv ? to_csv_string(sw)
                                                   : to_json_string(sw);
            int flagged = 0;
            for (const auto& s : sw.samples)
                if (s.flag != SampleFlag::ok)
                    ++flagged;
            summary = "analyze: " + std::to_string(sw.samples.size()) +
                      " points " + fmt(cfg.grid->start_hz) + ".." +
                      fmt(cfg.grid->stop_hz) + " Hz, method=" +
                      (method == SweepMethod::linear_solve ? "linear_solve"
                                                           : "closed_form") +
                      ", near-pole " + std::to_string(flagged) + ", params " +
                      sw.params_digest;
            break;
        }
        case Command::modes: {
            if (!cfg.tank)
                throw ConfigError("modes requires tank parameters");
            if (format == OutputFormat::csv)
                throw ConfigError("the modes artifact is JSON only");
            const CubicCoefficients co =
                characteristic_coefficients(*cfg.tank);
            const ModeSet closed = modes_closed_form(co);
            const ModeSet numer = modes_numerical(co);
            const double agreement = mode_agreement_rel_err(closed, numer);

            json a;
            a["coefficients"] = {
                {"c3", co.c3}, {"c2", co.c2}, {"c1", co.c1}, {"c0", co.c0}};
            json modes_hz = json::array();
            json ratios = json::array();
            json degenerate = json::array();
            for (std::size_t i = 0; i < closed.omega.size(); ++i) {
                modes_hz.push_back(closed.omega[i] / two_pi);
                ratios.push_back(closed.omega[i] / closed.omega[0]);
                degenerate.push_back(static_cast<bool>(closed.degenerate[i]));
            }
            a["modes_hz"] = modes_hz;
            a["ratios"] = ratios;
            a["degenerate"] = degenerate;
            a["cubic_degenerate"] = closed.cubic_degenerate;
            a["method_agreement_rel_err"] = agreement;
            artifact = detail::dump_artifact(a);

            std::ostringstream os;
            os << "modes:";
            for (std::size_t i = 0; i < closed.omega.size(); ++i)
                os << " f" << (i + 1) << "=" << fmt(closed.omega[i] / two_pi);
            os << " Hz";
            if (closed.cubic_degenerate)
                os << " (degenerate cubic, third mode unbounded)";
            os << ", agreement " << fmt(agreement);
            summary = os.str();
            break;
        }
        case Command::sweep: {
            if (!cfg.sweep)
                throw ConfigError("sweep requires a sweep spec");
            if (!cfg.tank)
                throw ConfigError(
                    "sweep requires base tank parameters (L1..L3 and C2)");
            const RatioMap map = ratio_map(*cfg.sweep, *cfg.tank);
            artifact = format == OutputFormat::csv ? to_csv_string(map)
                                                   : to_json_string(map);
            std::size_t valid = 0;
            for (const auto& cell : map.cells)
                valid += cell.valid ? 1 : 0;
            summary = "sweep: " + std::to_string(map.cells.size()) +
                      " cells, " + std::to_string(valid) + " valid";
            break;
        }
        case Command::design: {
            const DesignSpec spec = cfg.design.value_or(DesignSpec{});
            if (format == OutputFormat::csv)
                throw ConfigError("the design artifact is JSON only");
            const DesignResult res = design_third_harmonic(spec);
            artifact = to_json_string(res);
            std::ostringstream os;
            os << "design: coverage " << fmt(res.band_coverage) << ", f1 "
               << fmt(res.f_mode1_hz) << " Hz, ratios 1:" << fmt(res.r2)
               << ":" << fmt(res.r3);
            if (!res.feasible) {
                os << " (no feasible design; nearest returned)";
                status = 3;
            }
            summary = os.str();
            break;
        }
        case Command::fom: {
            if (!cfg.fom)
                throw ConfigError("fom requires metric inputs");
            if (format == OutputFormat::csv)
                throw ConfigError("the fom artifact is JSON only");
            const OscMetricsInput& in = *cfg.fom;
            const double tr = tuning_range_pct(in.f_min_hz, in.f_max_hz);
            const double f = fom(in);
            const double ft = fom_t(in);
            const double fa = fom_a(in);
            json a;
            a["tr_pct"] = tr;
            a["fom"] = f;
            a["fom_t"] = ft;
            a["fom_a"] = fa;
            artifact = detail::dump_artifact(a);
            summary = "fom: tr " + fmt(tr) + "%, fom " + fmt(f) + ", fom_t " +
                      fmt(ft) + ", fom_a " + fmt(fa);
            break;
        }
        }

        if (cfg.output.path.empty()) {
            std::cout << artifact;
            std::cerr << summary << "\n";
        } else {
            write_file_atomic(cfg.output.path, artifact);
            std::cout << summary << " -> " << cfg.output.path << "\n";
        }
        return status;
    } catch (const ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const InvalidParams& e) {
        emit_error("validation", e.what());
        return 2;
    } catch (const ComplexRoots& e) {
        emit_error("numerical", e.what());
        return 4;
    } catch (const SingularSystem& e) {
        emit_error("numerical", e.what());
        return 4;
    } catch (const BracketingFailure& e) {
        emit_error("numerical", e.what());
        return 4;
    } catch (const Error& e) {
        emit_error("numerical", e.what());
        return 4;
    }
}

} // namespace tctank
