#include <array>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tctank/config.hpp"
#include "tctank/version.hpp"

namespace {

using tctank::Command;
using tctank::ConfigError;
using tctank::RunConfig;

void emit_cli_error(const std::string& type, const std::string& message) {
    nlohmann::json j;
    j["error"] = {{"type", type}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TankFlags {
    std::string tank_file;
    std::string l1, l2, l3, c1, c2, c3;
    double k12 = 0, k13 = 0, k23 = 0;
    std::string loss_mode;
    std::string r1, r2, r3;
    double q1 = 0, q2 = 0, q3 = 0;
    std::string f_ref;
};

void add_tank_flags(CLI::App* cmd, TankFlags& f) {
    cmd->add_option("--tank", f.tank_file,
                    "tank parameters JSON file (a saved design result works)");
    cmd->add_option("--l1", f.l1, "branch 1 inductance, henries (suffixes ok)");
    cmd->add_option("--l2", f.l2, "branch 2 inductance");
    cmd->add_option("--l3", f.l3, "branch 3 inductance");
    cmd->add_option("--c1", f.c1, "branch 1 capacitance, farads");
    cmd->add_option("--c2", f.c2, "branch 2 capacitance");
    cmd->add_option("--c3", f.c3, "branch 3 capacitance");
    cmd->add_option("--k12", f.k12, "coupling coefficient 1-2");
    cmd->add_option("--k13", f.k13, "coupling coefficient 1-3");
    cmd->add_option("--k23", f.k23, "coupling coefficient 2-3");
    cmd->add_option("--loss", f.loss_mode,
                    "lossless | series_resistance | q_at_reference");
    cmd->add_option("--r1", f.r1, "branch 1 series resistance, ohms");
    cmd->add_option("--r2", f.r2, "branch 2 series resistance");
    cmd->add_option("--r3", f.r3, "branch 3 series resistance");
    cmd->add_option("--q1", f.q1, "branch 1 quality factor at --f-ref");
    cmd->add_option("--q2", f.q2, "branch 2 quality factor");
    cmd->add_option("--q3", f.q3, "branch 3 quality factor");
    cmd->add_option("--f-ref", f.f_ref, "Q reference frequency, hertz");
}

void apply_tank_flags(CLI::App* cmd, const TankFlags& f, RunConfig& cfg) {
    if (cmd->count("--tank"))
        cfg.tank = tctank::params_from_json_string(read_file(f.tank_file));

    const bool any_inline =
        cmd->count("--l1") || cmd->count("--l2") || cmd->count("--l3") ||
        cmd->count("--c1") || cmd->count("--c2") || cmd->count("--c3") ||
        cmd->count("--k12") || cmd->count("--k13") || cmd->count("--k23") ||
        cmd->count("--loss") || cmd->count("--r1") || cmd->count("--r2") ||
        cmd->count("--r3") || cmd->count("--q1") || cmd->count("--q2") ||
        cmd->count("--q3") || cmd->count("--f-ref");
    if (!any_inline)
        return;
    if (!cfg.tank)
        cfg.tank = tctank::TankParams{};
    tctank::TankParams& p = *cfg.tank;

    if (cmd->count("--l1"))
        p.l1 = tctank::parse_quantity(f.l1);
    if (cmd->count("--l2"))
        p.l2 = tctank::parse_quantity(f.l2);
    if (cmd->count("--l3"))
        p.l3 = tctank::parse_quantity(f.l3);
    if (cmd->count("--c1"))
        p.c1 = tctank::parse_quantity(f.c1);
    if (cmd->count("--c2"))
        p.c2 = tctank::parse_quantity(f.c2);
    if (cmd->count("--c3"))
        p.c3 = tctank::parse_quantity(f.c3);
    if (cmd->count("--k12"))
        p.k12 = f.k12;
    if (cmd->count("--k13"))
        p.k13 = f.k13;
    if (cmd->count("--k23"))
        p.k23 = f.k23;

    if (cmd->count("--loss")) {
        if (f.loss_mode == "lossless")
            p.loss.mode = tctank::LossMode::lossless;
        else if (f.loss_mode == "series_resistance")
            p.loss.mode = tctank::LossMode::series_resistance;
        else if (f.loss_mode == "q_at_reference")
            p.loss.mode = tctank::LossMode::q_at_reference;
        else
            throw ConfigError("--loss '" + f.loss_mode +
                              "' is not lossless, series_resistance or "
                              "q_at_reference");
    }
    if (cmd->count("--r1"))
        p.loss.r1 = tctank::parse_quantity(f.r1);
    if (cmd->count("--r2"))
        p.loss.r2 = tctank::parse_quantity(f.r2);
    if (cmd->count("--r3"))
        p.loss.r3 = tctank::parse_quantity(f.r3);
    if (cmd->count("--q1"))
        p.loss.q1 = f.q1;
    if (cmd->count("--q2"))
        p.loss.q2 = f.q2;
    if (cmd->count("--q3"))
        p.loss.q3 = f.q3;
    if (cmd->count("--f-ref"))
        p.loss.f_ref_hz = tctank::parse_quantity(f.f_ref);

    const bool any_r =
        cmd->count("--r1") || cmd->count("--r2") || cmd->count("--r3");
    const bool any_q = cmd->count("--q1") || cmd->count("--q2") ||
                       cmd->count("--q3") || cmd->count("--f-ref");
    if (any_r && p.loss.mode != tctank::LossMode::series_resistance)
        throw ConfigError(
            "--r1/--r2/--r3 need --loss series_resistance");
    if (any_q && p.loss.mode != tctank::LossMode::q_at_reference)
        throw ConfigError("--q1/--q2/--q3/--f-ref need --loss q_at_reference");
}

struct OutputFlags {
    std::string config_file;
    std::string output_path;
    std::string format;
};

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
    cmd->add_option("--config", f.config_file, "JSON run configuration file");
    cmd->add_option("-o,--output", f.output_path,
                    "artifact file (stdout when omitted)");
    cmd->add_option("--format", f.format, "csv | json");
}

RunConfig base_config(CLI::App* cmd, const OutputFlags& f) {
    RunConfig cfg;
    if (cmd->count("--config"))
        cfg = tctank::load_config(f.config_file);
    return cfg;
}

void apply_output_flags(CLI::App* cmd, const OutputFlags& f, RunConfig& cfg) {
    if (cmd->count("--output"))
        cfg.output.path = f.output_path;
    if (cmd->count("--format")) {
        if (f.format == "csv")
            cfg.output.format = tctank::OutputFormat::csv;
        else if (f.format == "json")
            cfg.output.format = tctank::OutputFormat::json;
        else
            throw ConfigError("--format '" + f.format +
                              "' is not csv or json");
    }
}

tctank::Range range_from(const std::vector<double>& v, const char* name) {
    if (v.size() != 2)
        throw ConfigError(std::string(name) + " expects lo,hi");
    return {v[0], v[1]};
}

void print_about() {
    std::cout << "tctank " << tctank::version << "\n\n"
              << "Sixth-order triple-coupled transformer LC tank analysis.\n\n"
              << "Differential-mode input impedance (s = j*2*pi*f):\n"
              << "  Z_in = Z_eff / (1 + s*C1*Z_eff)\n"
              << "  Z_eff = s*L1 - s^3*[M12^2*C2 + M13^2*C3\n"
              << "                      + s^2*C2*C3*(L3*M12^2 + L2*M13^2 - "
                 "2*M23*M12*M13)]\n"
              << "                  / [1 + s^2*(L2*C2 + L3*C3) + "
                 "s^4*C2*C3*(L2*L3 - M23^2)]\n"
              << "  M_ij = k_ij*sqrt(L_i*L_j)\n\n"
              << "Resonance modes: roots of the characteristic cubic in x = "
                 "omega^2,\n"
              << "with nu_i^2 = 1/(L_i*C_i):\n"
              << "  c3*x^3 - c2*x^2 + c1*x - c0 = 0\n"
              << "  c3 = 1 - k12^2 - k13^2 - k23^2 + 2*k12*k13*k23  (det K)\n"
              << "  c2 = (1-k12^2)*nu3^2 + (1-k13^2)*nu2^2 + "
                 "(1-k23^2)*nu1^2\n"
              << "  c1 = nu1^2*nu2^2 + nu1^2*nu3^2 + nu2^2*nu3^2\n"
              << "  c0 = nu1^2*nu2^2*nu3^2\n\n"
              << "Trigonometric root form (Delta = c2^2 - 3*c1*c3):\n"
              << "  theta = arccos[(2*c2^3 - 9*c1*c2*c3 + 27*c0*c3^2) / "
                 "(2*Delta^(3/2))]\n"
              << "  x1 = (c2 - 2*sqrt(Delta)*cos((theta-pi)/3)) / (3*c3)\n"
              << "  x2 = (c2 - 2*sqrt(Delta)*cos((theta+pi)/3)) / (3*c3)\n"
              << "  x3 = (c2 + 2*sqrt(Delta)*cos(theta/3))     / (3*c3)\n\n"
              << "Oscillator metrics:\n"
              << "  TR%   = 100*(f_max - f_min) / ((f_max + f_min)/2)\n"
              << "  FoM   = -PN + 20*log10(f0/offset) - 10*log10(P/1mW)\n"
              << "  FoM_T = FoM + 20*log10(TR%/10)\n"
              << "  FoM_A = FoM + 10*log10(1mm^2/area)\n\n"
              << "Design defaults: coils 300/210/117 pH, f0 24 GHz, band "
                 "3*f1 +/- 15%,\n"
              << "X in [1,20], k12,k13 in [0.05,0.7], k23 in [0.2,0.3].\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"triple-coupled transformer resonator tank analysis"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", tctank::version);
    bool about = false;
    app.add_flag("--about", about, "print the formulas and defaults in use");

    // analyze
    CLI::App* analyze =
        app.add_subcommand("analyze", "impedance sweep over a frequency grid");
    OutputFlags analyze_out;
    TankFlags analyze_tank;
    std::string a_fstart, a_fstop, a_spacing, a_method;
    int a_points = 0;
    add_output_flags(analyze, analyze_out);
    add_tank_flags(analyze, analyze_tank);
    analyze->add_option("--f-start", a_fstart, "grid start, hertz");
    analyze->add_option("--f-stop", a_fstop, "grid stop, hertz");
    analyze->add_option("--points", a_points, "grid point count");
    analyze->add_option("--spacing", a_spacing, "linear | logarithmic");
    analyze->add_option("--method", a_method, "linear_solve | closed_form");

    // modes
    CLI::App* modes = app.add_subcommand(
        "modes", "resonance modes from the characteristic cubic");
    OutputFlags modes_out;
    TankFlags modes_tank;
    add_output_flags(modes, modes_out);
    add_tank_flags(modes, modes_tank);

    // sweep
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "mode-ratio map over X and coupling grids");
    OutputFlags sweep_out;
    TankFlags sweep_tank;
    double s_xmin = 0, s_xmax = 0;
    int s_xpoints = 0;
    std::vector<double> s_k12, s_k13, s_k23;
    std::string s_constraint;
    add_output_flags(sweep_cmd, sweep_out);
    add_tank_flags(sweep_cmd, sweep_tank);
    sweep_cmd->add_option("--x-min", s_xmin, "lowest X = L1*C1/(L2*C2)");
    sweep_cmd->add_option("--x-max", s_xmax, "highest X");
    sweep_cmd->add_option("--x-points", s_xpoints, "X grid size");
    sweep_cmd->add_option("--k12-values", s_k12, "comma-separated k12 grid")
        ->delimiter(',');
    sweep_cmd->add_option("--k13-values", s_k13, "comma-separated k13 grid")
        ->delimiter(',');
    sweep_cmd->add_option("--k23-values", s_k23, "comma-separated k23 grid")
        ->delimiter(',');
    sweep_cmd->add_option("--constraint", s_constraint,
                          "nu2_equals_nu3 | free");

    // design
    CLI::App* design = app.add_subcommand(
        "design", "search couplings and X for third-harmonic mode placement");
    OutputFlags design_out;
    std::string d_f0, d_l1, d_l2, d_l3;
    double d_ratio = 0, d_bw = 0;
    int d_budget = 0;
    std::vector<double> d_k23r, d_k12r, d_k13r, d_xr;
    add_output_flags(design, design_out);
    design->add_option("--f0", d_f0, "fundamental mode target, hertz");
    design->add_option("--ratio", d_ratio, "band center / fundamental");
    design->add_option("--bw", d_bw, "fractional bandwidth target");
    design->add_option("--k23-range", d_k23r, "lo,hi")->delimiter(',');
    design->add_option("--k12-range", d_k12r, "lo,hi")->delimiter(',');
    design->add_option("--k13-range", d_k13r, "lo,hi")->delimiter(',');
    design->add_option("--x-range", d_xr, "lo,hi")->delimiter(',');
    design->add_option("--l1", d_l1, "fixed branch 1 inductance");
    design->add_option("--l2", d_l2, "fixed branch 2 inductance");
    design->add_option("--l3", d_l3, "fixed branch 3 inductance");
    design->add_option("--budget", d_budget, "search evaluation budget");

    // fom
    CLI::App* fom_cmd =
        app.add_subcommand("fom", "oscillator figure-of-merit arithmetic");
    OutputFlags fom_out;
    double f_pn = 0, f_pmw = 0, f_area = 0;
    std::string f_f0, f_offset, f_fmin, f_fmax;
    add_output_flags(fom_cmd, fom_out);
    fom_cmd->add_option("--pn", f_pn, "phase noise at the offset, dBc/Hz");
    fom_cmd->add_option("--f0", f_f0, "carrier frequency, hertz");
    fom_cmd->add_option("--offset", f_offset, "phase-noise offset, hertz");
    fom_cmd->add_option("--power-mw", f_pmw, "DC power, milliwatts");
    fom_cmd->add_option("--area-mm2", f_area, "core area, square millimeters");
    fom_cmd->add_option("--fmin", f_fmin, "tuning band low edge, hertz");
    fom_cmd->add_option("--fmax", f_fmax, "tuning band high edge, hertz");

    CLI11_PARSE(app, argc, argv);

    if (about) {
        print_about();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (analyze->parsed()) {
            RunConfig cfg = base_config(analyze, analyze_out);
            cfg.command = Command::analyze;
            apply_tank_flags(analyze, analyze_tank, cfg);
            if (analyze->count("--f-start") || analyze->count("--f-stop") ||
                analyze->count("--points") || analyze->count("--spacing")) {
                if (!cfg.grid)
                    cfg.grid = tctank::FrequencyGrid{};
                if (analyze->count("--f-start"))
                    cfg.grid->start_hz = tctank::parse_quantity(a_fstart);
                if (analyze->count("--f-stop"))
                    cfg.grid->stop_hz = tctank::parse_quantity(a_fstop);
                if (analyze->count("--points"))
                    cfg.grid->points = a_points;
                if (analyze->count("--spacing")) {
                    if (a_spacing == "linear")
                        cfg.grid->spacing = tctank::GridSpacing::linear;
                    else if (a_spacing == "logarithmic")
                        cfg.grid->spacing = tctank::GridSpacing::logarithmic;
                    else
                        throw ConfigError("--spacing '" + a_spacing +
                                          "' is not linear or logarithmic");
                }
            }
            if (analyze->count("--method")) {
                if (a_method == "linear_solve")
                    cfg.method = tctank::SweepMethod::linear_solve;
                else if (a_method == "closed_form")
                    cfg.method = tctank::SweepMethod::closed_form;
                else
                    throw ConfigError("--method '" + a_method +
                                      "' is not linear_solve or closed_form");
            }
            apply_output_flags(analyze, analyze_out, cfg);
            return tctank::run(cfg);
        }

        if (modes->parsed()) {
            RunConfig cfg = base_config(modes, modes_out);
            cfg.command = Command::modes;
            apply_tank_flags(modes, modes_tank, cfg);
            apply_output_flags(modes, modes_out, cfg);
            return tctank::run(cfg);
        }

        if (sweep_cmd->parsed()) {
            RunConfig cfg = base_config(sweep_cmd, sweep_out);
            cfg.command = Command::sweep;
            apply_tank_flags(sweep_cmd, sweep_tank, cfg);
            if (sweep_cmd->count("--x-min") || sweep_cmd->count("--x-max") ||
                sweep_cmd->count("--x-points") ||
                sweep_cmd->count("--k12-values") ||
                sweep_cmd->count("--k13-values") ||
                sweep_cmd->count("--k23-values") ||
                sweep_cmd->count("--constraint")) {
                if (!cfg.sweep)
                    cfg.sweep = tctank::SweepSpec{};
                if (sweep_cmd->count("--x-min"))
                    cfg.sweep->x_min = s_xmin;
                if (sweep_cmd->count("--x-max"))
                    cfg.sweep->x_max = s_xmax;
                if (sweep_cmd->count("--x-points"))
                    cfg.sweep->x_points = s_xpoints;
                if (sweep_cmd->count("--k12-values"))
                    cfg.sweep->k12_values = s_k12;
                if (sweep_cmd->count("--k13-values"))
                    cfg.sweep->k13_values = s_k13;
                if (sweep_cmd->count("--k23-values"))
                    cfg.sweep->k23_values = s_k23;
                if (sweep_cmd->count("--constraint")) {
                    if (s_constraint == "nu2_equals_nu3")
                        cfg.sweep->constraint =
                            tctank::ShapeConstraint::nu2_equals_nu3;
                    else if (s_constraint == "free")
                        cfg.sweep->constraint = tctank::ShapeConstraint::free;
                    else
                        throw ConfigError("--constraint '" + s_constraint +
                                          "' is not nu2_equals_nu3 or free");
                }
            }
            apply_output_flags(sweep_cmd, sweep_out, cfg);
            return tctank::run(cfg);
        }

        if (design->parsed()) {
            RunConfig cfg = base_config(design, design_out);
            cfg.command = Command::design;
            if (!cfg.design)
                cfg.design = tctank::DesignSpec{};
            if (design->count("--f0"))
                cfg.design->f0_target_hz = tctank::parse_quantity(d_f0);
            if (design->count("--ratio"))
                cfg.design->band_center_ratio = d_ratio;
            if (design->count("--bw"))
                cfg.design->fractional_bandwidth_target = d_bw;
            if (design->count("--k23-range"))
                cfg.design->k23_range = range_from(d_k23r, "--k23-range");
            if (design->count("--k12-range"))
                cfg.design->k12_range = range_from(d_k12r, "--k12-range");
            if (design->count("--k13-range"))
                cfg.design->k13_range = range_from(d_k13r, "--k13-range");
            if (design->count("--x-range"))
                cfg.design->x_range = range_from(d_xr, "--x-range");
            if (design->count("--l1") || design->count("--l2") ||
                design->count("--l3")) {
                if (!(design->count("--l1") && design->count("--l2") &&
                      design->count("--l3")))
                    throw ConfigError(
                        "fixed inductances need all of --l1 --l2 --l3");
                cfg.design->fixed_inductances = {
                    tctank::parse_quantity(d_l1), tctank::parse_quantity(d_l2),
                    tctank::parse_quantity(d_l3)};
            }
            if (design->count("--budget"))
                cfg.design->search_budget = d_budget;
            apply_output_flags(design, design_out, cfg);
            return tctank::run(cfg);
        }

        if (fom_cmd->parsed()) {
            RunConfig cfg = base_config(fom_cmd, fom_out);
            cfg.command = Command::fom;
            if (!cfg.fom)
                cfg.fom = tctank::OscMetricsInput{};
            if (fom_cmd->count("--pn"))
                cfg.fom->pn_dbchz = f_pn;
            if (fom_cmd->count("--f0"))
                cfg.fom->f0_hz = tctank::parse_quantity(f_f0);
            if (fom_cmd->count("--offset"))
                cfg.fom->offset_hz = tctank::parse_quantity(f_offset);
            if (fom_cmd->count("--power-mw"))
                cfg.fom->p_mw = f_pmw;
            if (fom_cmd->count("--area-mm2"))
                cfg.fom->area_mm2 = f_area;
            if (fom_cmd->count("--fmin"))
                cfg.fom->f_min_hz = tctank::parse_quantity(f_fmin);
            if (fom_cmd->count("--fmax"))
                cfg.fom->f_max_hz = tctank::parse_quantity(f_fmax);
            apply_output_flags(fom_cmd, fom_out, cfg);
            return tctank::run(cfg);
        }
    } catch (const ConfigError& e) {
        emit_cli_error("config", e.what());
        return 2;
    } catch (const tctank::InvalidParams& e) {
        emit_cli_error("validation", e.what());
        return 2;
    } catch (const tctank::Error& e) {
        emit_cli_error("numerical", e.what());
        return 4;
    }
    return 2;
}
