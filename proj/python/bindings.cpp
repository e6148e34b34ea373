#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tctank/config.hpp"
#include "tctank/designer.hpp"
#include "tctank/impedance.hpp"
#include "tctank/metrics.hpp"
#include "tctank/modes.hpp"
#include "tctank/tank.hpp"
#include "tctank/version.hpp"

namespace py = pybind11;
using namespace tctank;

PYBIND11_MODULE(_tctank, m) {
    m.doc() = "Sixth-order triple-coupled transformer LC tank analysis";
    m.attr("__version__") = version;

    auto base = py::register_exception<Error>(m, "TankError");
    py::register_exception<InvalidParams>(m, "InvalidParams", base);
    py::register_exception<PoleAtFrequency>(m, "PoleAtFrequency", base);
    py::register_exception<InternalPole>(m, "InternalPole", base);
    py::register_exception<SingularSystem>(m, "SingularSystem", base);
    py::register_exception<ComplexRoots>(m, "ComplexRoots", base);
    py::register_exception<BracketingFailure>(m, "BracketingFailure", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    py::enum_<LossMode>(m, "LossMode")
        .value("lossless", LossMode::lossless)
        .value("series_resistance", LossMode::series_resistance)
        .value("q_at_reference", LossMode::q_at_reference);

    py::enum_<ModeMethod>(m, "ModeMethod")
        .value("closed_form", ModeMethod::closed_form)
        .value("numerical_oracle", ModeMethod::numerical_oracle)
        .value("impedance_poles", ModeMethod::impedance_poles);

    py::enum_<CubicPlacement>(m, "CubicPlacement")
        .value("c3_denominator", CubicPlacement::c3_denominator)
        .value("c1_denominator", CubicPlacement::c1_denominator);

    py::enum_<GridSpacing>(m, "GridSpacing")
        .value("linear", GridSpacing::linear)
        .value("logarithmic", GridSpacing::logarithmic);

    py::enum_<SampleFlag>(m, "SampleFlag")
        .value("ok", SampleFlag::ok)
        .value("near_pole", SampleFlag::near_pole);

    py::enum_<SweepMethod>(m, "SweepMethod")
        .value("linear_solve", SweepMethod::linear_solve)
        .value("closed_form", SweepMethod::closed_form);

    py::enum_<ShapeConstraint>(m, "ShapeConstraint")
        .value("nu2_equals_nu3", ShapeConstraint::nu2_equals_nu3)
        .value("free", ShapeConstraint::free);

    py::class_<LossSpec>(m, "LossSpec")
        .def(py::init<>())
        .def_readwrite("mode", &LossSpec::mode)
        .def_readwrite("r1", &LossSpec::r1)
        .def_readwrite("r2", &LossSpec::r2)
        .def_readwrite("r3", &LossSpec::r3)
        .def_readwrite("q1", &LossSpec::q1)
        .def_readwrite("q2", &LossSpec::q2)
        .def_readwrite("q3", &LossSpec::q3)
        .def_readwrite("f_ref_hz", &LossSpec::f_ref_hz)
        .def_static("lossless", &LossSpec::lossless)
        .def_static("series", &LossSpec::series, py::arg("r1"), py::arg("r2"),
                    py::arg("r3"))
        .def_static("q_at", &LossSpec::q_at, py::arg("q1"), py::arg("q2"),
                    py::arg("q3"), py::arg("f_ref_hz"));

    py::class_<TankParams>(m, "TankParams")
        .def(py::init([](double l1, double l2, double l3, double c1, double c2,
                         double c3, double k12, double k13, double k23,
                         LossSpec loss) {
                 TankParams p;
                 p.l1 = l1;
                 p.l2 = l2;
                 p.l3 = l3;
                 p.c1 = c1;
                 p.c2 = c2;
                 p.c3 = c3;
                 p.k12 = k12;
                 p.k13 = k13;
                 p.k23 = k23;
                 p.loss = loss;
                 return p;
             }),
             py::arg("l1") = 0.0, py::arg("l2") = 0.0, py::arg("l3") = 0.0,
             py::arg("c1") = 0.0, py::arg("c2") = 0.0, py::arg("c3") = 0.0,
             py::arg("k12") = 0.0, py::arg("k13") = 0.0, py::arg("k23") = 0.0,
             py::arg("loss") = LossSpec{})
        .def_readwrite("l1", &TankParams::l1)
        .def_readwrite("l2", &TankParams::l2)
        .def_readwrite("l3", &TankParams::l3)
        .def_readwrite("c1", &TankParams::c1)
        .def_readwrite("c2", &TankParams::c2)
        .def_readwrite("c3", &TankParams::c3)
        .def_readwrite("k12", &TankParams::k12)
        .def_readwrite("k13", &TankParams::k13)
        .def_readwrite("k23", &TankParams::k23)
        .def_readwrite("loss", &TankParams::loss);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("ok", &ValidationReport::ok)
        .def_readonly("det_k", &ValidationReport::det_k)
        .def_readonly("violations", &ValidationReport::violations);

    py::class_<Mutuals>(m, "Mutuals")
        .def_readonly("m12", &Mutuals::m12)
        .def_readonly("m13", &Mutuals::m13)
        .def_readonly("m23", &Mutuals::m23);

    py::class_<UncoupledFrequencies>(m, "UncoupledFrequencies")
        .def_readonly("nu1", &UncoupledFrequencies::nu1)
        .def_readonly("nu2", &UncoupledFrequencies::nu2)
        .def_readonly("nu3", &UncoupledFrequencies::nu3);

    py::class_<CubicCoefficients>(m, "CubicCoefficients")
        .def(py::init([](double c3, double c2, double c1, double c0) {
                 CubicCoefficients c;
                 c.c3 = c3;
                 c.c2 = c2;
                 c.c1 = c1;
                 c.c0 = c0;
                 return c;
             }),
             py::arg("c3") = 0.0, py::arg("c2") = 0.0, py::arg("c1") = 0.0,
             py::arg("c0") = 0.0)
        .def_readwrite("c3", &CubicCoefficients::c3)
        .def_readwrite("c2", &CubicCoefficients::c2)
        .def_readwrite("c1", &CubicCoefficients::c1)
        .def_readwrite("c0", &CubicCoefficients::c0);

    py::class_<ModeSet>(m, "ModeSet")
        .def_readonly("omega", &ModeSet::omega)
        .def_readonly("degenerate", &ModeSet::degenerate)
        .def_readonly("cubic_degenerate", &ModeSet::cubic_degenerate)
        .def_readonly("method", &ModeSet::method);

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init([](double start_hz, double stop_hz, int points,
                         GridSpacing spacing) {
                 FrequencyGrid g;
                 g.start_hz = start_hz;
                 g.stop_hz = stop_hz;
                 g.points = points;
                 g.spacing = spacing;
                 return g;
             }),
             py::arg("start_hz"), py::arg("stop_hz"), py::arg("points"),
             py::arg("spacing") = GridSpacing::linear)
        .def_readwrite("start_hz", &FrequencyGrid::start_hz)
        .def_readwrite("stop_hz", &FrequencyGrid::stop_hz)
        .def_readwrite("points", &FrequencyGrid::points)
        .def_readwrite("spacing", &FrequencyGrid::spacing)
        .def("frequencies", &FrequencyGrid::frequencies);

    py::class_<ImpedanceSample>(m, "ImpedanceSample")
        .def_readonly("freq_hz", &ImpedanceSample::freq_hz)
        .def_readonly("z", &ImpedanceSample::z)
        .def_readonly("flag", &ImpedanceSample::flag);

    py::class_<ImpedanceSweep>(m, "ImpedanceSweep")
        .def_readonly("grid", &ImpedanceSweep::grid)
        .def_readonly("method", &ImpedanceSweep::method)
        .def_readonly("params_digest", &ImpedanceSweep::params_digest)
        .def_readonly("samples", &ImpedanceSweep::samples);

    py::class_<Range>(m, "Range")
        .def(py::init([](double lo, double hi) { return Range{lo, hi}; }),
             py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Range::lo)
        .def_readwrite("hi", &Range::hi);

    py::class_<SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def_readwrite("x_min", &SweepSpec::x_min)
        .def_readwrite("x_max", &SweepSpec::x_max)
        .def_readwrite("x_points", &SweepSpec::x_points)
        .def_readwrite("k12_values", &SweepSpec::k12_values)
        .def_readwrite("k13_values", &SweepSpec::k13_values)
        .def_readwrite("k23_values", &SweepSpec::k23_values)
        .def_readwrite("constraint", &SweepSpec::constraint);

    py::class_<RatioCell>(m, "RatioCell")
        .def_readonly("x", &RatioCell::x)
        .def_readonly("k12", &RatioCell::k12)
        .def_readonly("k13", &RatioCell::k13)
        .def_readonly("k23", &RatioCell::k23)
        .def_readonly("r2", &RatioCell::r2)
        .def_readonly("r3", &RatioCell::r3)
        .def_readonly("valid", &RatioCell::valid);

    py::class_<RatioMap>(m, "RatioMap")
        .def_readonly("spec", &RatioMap::spec)
        .def_readonly("cells", &RatioMap::cells);

    py::class_<DesignSpec>(m, "DesignSpec")
        .def(py::init<>())
        .def_readwrite("f0_target_hz", &DesignSpec::f0_target_hz)
        .def_readwrite("band_center_ratio", &DesignSpec::band_center_ratio)
        .def_readwrite("fractional_bandwidth_target",
                       &DesignSpec::fractional_bandwidth_target)
        .def_readwrite("k23_range", &DesignSpec::k23_range)
        .def_readwrite("k12_range", &DesignSpec::k12_range)
        .def_readwrite("k13_range", &DesignSpec::k13_range)
        .def_readwrite("x_range", &DesignSpec::x_range)
        .def_readwrite("fixed_inductances", &DesignSpec::fixed_inductances)
        .def_readwrite("search_budget", &DesignSpec::search_budget);

    py::class_<DesignResult>(m, "DesignResult")
        .def_readonly("params", &DesignResult::params)
        .def_readonly("f_mode1_hz", &DesignResult::f_mode1_hz)
        .def_readonly("f_mode2_hz", &DesignResult::f_mode2_hz)
        .def_readonly("f_mode3_hz", &DesignResult::f_mode3_hz)
        .def_readonly("r2", &DesignResult::r2)
        .def_readonly("r3", &DesignResult::r3)
        .def_readonly("band_coverage", &DesignResult::band_coverage)
        .def_readonly("objective_value", &DesignResult::objective_value)
        .def_readonly("feasible", &DesignResult::feasible);

    py::class_<OscMetricsInput>(m, "OscMetricsInput")
        .def(py::init([](double pn_dbchz, double f0_hz, double offset_hz,
                         double p_mw, double area_mm2, double f_min_hz,
                         double f_max_hz) {
                 OscMetricsInput in;
                 in.pn_dbchz = pn_dbchz;
                 in.f0_hz = f0_hz;
                 in.offset_hz = offset_hz;
                 in.p_mw = p_mw;
                 in.area_mm2 = area_mm2;
                 in.f_min_hz = f_min_hz;
                 in.f_max_hz = f_max_hz;
                 return in;
             }),
             py::arg("pn_dbchz") = 0.0, py::arg("f0_hz") = 0.0,
             py::arg("offset_hz") = 0.0, py::arg("p_mw") = 0.0,
             py::arg("area_mm2") = 0.0, py::arg("f_min_hz") = 0.0,
             py::arg("f_max_hz") = 0.0)
        .def_readwrite("pn_dbchz", &OscMetricsInput::pn_dbchz)
        .def_readwrite("f0_hz", &OscMetricsInput::f0_hz)
        .def_readwrite("offset_hz", &OscMetricsInput::offset_hz)
        .def_readwrite("p_mw", &OscMetricsInput::p_mw)
        .def_readwrite("area_mm2", &OscMetricsInput::area_mm2)
        .def_readwrite("f_min_hz", &OscMetricsInput::f_min_hz)
        .def_readwrite("f_max_hz", &OscMetricsInput::f_max_hz);

    m.def("coupling_det", &coupling_det, py::arg("k12"), py::arg("k13"),
          py::arg("k23"));
    m.def("validate", &validate, py::arg("params"));
    m.def("mutual_inductances", &mutual_inductances, py::arg("params"));
    m.def("uncoupled_frequencies", &uncoupled_frequencies, py::arg("params"));
    m.def("series_resistances", &series_resistances, py::arg("params"));
    m.def("parse_quantity", &parse_quantity, py::arg("text"));
    m.def("params_to_json",
          static_cast<std::string (*)(const TankParams&)>(&to_json_string),
          py::arg("params"));
    m.def("params_from_json", &params_from_json_string, py::arg("text"));
    m.def("params_digest", &params_digest, py::arg("params"));

    m.def("characteristic_coefficients", &characteristic_coefficients,
          py::arg("params"));
    m.def("modes_closed_form", &modes_closed_form, py::arg("coefficients"),
          py::arg("placement") = CubicPlacement::c3_denominator);
    m.def("modes_numerical", &modes_numerical, py::arg("coefficients"));
    m.def("modes_from_impedance", &modes_from_impedance, py::arg("params"));
    m.def("mode_agreement_rel_err", &mode_agreement_rel_err, py::arg("a"),
          py::arg("b"));

    m.def("yin_linear_solve", &yin_linear_solve, py::arg("params"),
          py::arg("freq_hz"));
    m.def("zin_linear_solve", &zin_linear_solve, py::arg("params"),
          py::arg("freq_hz"));
    m.def("zeff_closed_form", &zeff_closed_form, py::arg("params"),
          py::arg("freq_hz"));
    m.def("zin_closed_form", &zin_closed_form, py::arg("params"),
          py::arg("freq_hz"));
    m.def("sweep", &sweep, py::arg("params"), py::arg("grid"),
          py::arg("method") = SweepMethod::linear_solve);
    m.def("sweep_to_csv",
          static_cast<std::string (*)(const ImpedanceSweep&)>(&to_csv_string),
          py::arg("sweep"));
    m.def("sweep_to_json",
          static_cast<std::string (*)(const ImpedanceSweep&)>(&to_json_string),
          py::arg("sweep"));

    m.def("ratio_map", &ratio_map, py::arg("spec"), py::arg("base"));
    m.def("design_third_harmonic", &design_third_harmonic, py::arg("spec"));
    m.def("capacitances_for_fundamental", &capacitances_for_fundamental,
          py::arg("l1"), py::arg("l2"), py::arg("l3"), py::arg("k12"),
          py::arg("k13"), py::arg("k23"), py::arg("x"), py::arg("f0_hz"),
          py::arg("constraint") = ShapeConstraint::nu2_equals_nu3,
          py::arg("nu3_over_nu2") = 1.0);
    m.def("ratio_map_to_csv",
          static_cast<std::string (*)(const RatioMap&)>(&to_csv_string),
          py::arg("map"));
    m.def("ratio_map_to_json",
          static_cast<std::string (*)(const RatioMap&)>(&to_json_string),
          py::arg("map"));
    m.def("design_to_json",
          static_cast<std::string (*)(const DesignResult&)>(&to_json_string),
          py::arg("result"));

    m.def("tuning_range_pct", &tuning_range_pct, py::arg("f_min_hz"),
          py::arg("f_max_hz"));
    m.def("fom", &fom, py::arg("input"));
    m.def("fom_a", &fom_a, py::arg("input"));
    m.def("fom_t", &fom_t, py::arg("input"));
}
