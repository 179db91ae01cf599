#include "qlorder/errors.hpp"
#include "qlorder/experiments.hpp"
#include "qlorder/likelihood.hpp"
#include "qlorder/montecarlo.hpp"
#include "qlorder/signal_model.hpp"
#include "qlorder/theory.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qlorder;

namespace {

std::vector<Envelope> constant_envelopes(std::size_t n, std::size_t count) {
    return std::vector<Envelope>(count, Envelope::constant(n));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quasi-likelihood order estimation for multi-component signals";

    py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<ComponentParams>(m, "ComponentParams")
        .def(py::init<double, double, double>(), py::arg("amplitude"), py::arg("frequency"), py::arg("phase"))
        .def_readwrite("amplitude", &ComponentParams::amplitude)
        .def_readwrite("frequency", &ComponentParams::frequency)
        .def_readwrite("phase", &ComponentParams::phase)
        .def("__repr__", [](const ComponentParams& p) {
            return "ComponentParams(" + format_double(p.amplitude) + ", " + format_double(p.frequency) + ", " +
                   format_double(p.phase) + ")";
        });

    py::class_<DecisionStats>(m, "DecisionStats")
        .def(py::init<double, double, double>(), py::arg("r"), py::arg("q"), py::arg("rho"))
        .def_readwrite("r", &DecisionStats::r)
        .def_readwrite("q", &DecisionStats::q)
        .def_readwrite("rho", &DecisionStats::rho);

    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("abridged_error_exact", &abridged_error_exact, py::arg("stats"));
    m.def("abridged_error_approx", &abridged_error_approx, py::arg("stats"));
    m.def("approx_valid", &approx_valid, py::arg("stats"));

    m.def(
        "synthesize",
        [](const std::vector<ComponentParams>& params, std::size_t n_samples, std::size_t nu) {
            return synthesize(params, constant_envelopes(n_samples, params.size()), nu);
        },
        py::arg("params"), py::arg("n_samples"), py::arg("nu"));

    m.def(
        "decision_stats",
        [](const std::vector<ComponentParams>& true_params, const std::vector<ComponentParams>& measured,
           std::size_t n_samples, double sigma, std::size_t nu_true) {
            return decision_stats(true_params, measured, constant_envelopes(n_samples, measured.size()), sigma,
                                  nu_true);
        },
        py::arg("true_params"), py::arg("measured"), py::arg("n_samples"), py::arg("sigma"), py::arg("nu_true"));

    m.def(
        "likelihood_profile",
        [](const std::vector<double>& samples, double sigma, const std::vector<ComponentParams>& measured) {
            const Observation x{samples, sigma};
            return likelihood_profile(x, measured, constant_envelopes(samples.size(), measured.size())).values;
        },
        py::arg("samples"), py::arg("sigma"), py::arg("measured"));

    m.def(
        "estimate_order",
        [](const std::vector<double>& samples, double sigma, const std::vector<ComponentParams>& measured) {
            const Observation x{samples, sigma};
            return ql_estimate(x, measured, constant_envelopes(samples.size(), measured.size()));
        },
        py::arg("samples"), py::arg("sigma"), py::arg("measured"));

    py::class_<ExperimentConfig>(m, "Config")
        .def_static("preset", &preset_five_tones)
        .def_static("parse", [](const std::string& text) { return parse_config(text); }, py::arg("text"))
        .def_static("load", &load_config, py::arg("path"))
        .def("serialize", &serialize_config)
        .def_readwrite("n_samples", &ExperimentConfig::n_samples)
        .def_readwrite("nu_true", &ExperimentConfig::nu_true)
        .def_readwrite("nu_max", &ExperimentConfig::nu_max)
        .def_readwrite("snr_grid", &ExperimentConfig::snr_grid)
        .def_readwrite("trials", &ExperimentConfig::trials)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("delta_a", &ExperimentConfig::delta_a)
        .def_readwrite("delta_omega", &ExperimentConfig::delta_omega)
        .def_readwrite("delta_phi", &ExperimentConfig::delta_phi);

    m.def(
        "theory",
        [](const ExperimentConfig& c) {
            py::list out;
            for (const auto& r : theory_rows(c, c.snr_grid)) {
                out.append(py::dict(py::arg("snr_db") = r.snr_db, py::arg("r") = r.stats.r, py::arg("q") = r.stats.q,
                                    py::arg("rho") = r.stats.rho, py::arg("p_exact") = r.result.p_exact,
                                    py::arg("p_approx") = r.result.p_approx,
                                    py::arg("approx_valid") = r.result.approx_valid));
            }
            return out;
        },
        py::arg("config"));

    m.def(
        "simulate",
        [](const ExperimentConfig& c) {
            std::vector<ErrorProbabilityRow> rows;
            {
                py::gil_scoped_release release;
                rows = sweep_error_probability(c);
            }
            py::list out;
            for (const auto& r : rows) {
                out.append(py::dict(py::arg("snr_db") = r.snr_db, py::arg("p_mc") = r.p_mc,
                                    py::arg("std_err") = r.std_err, py::arg("p_exact") = r.p_exact,
                                    py::arg("p_approx") = r.p_approx, py::arg("approx_valid") = r.approx_valid));
            }
            return out;
        },
        py::arg("config"));

    m.def(
        "sweep",
        [](const ExperimentConfig& c, const std::string& var, const std::vector<double>& grid) {
            std::vector<std::pair<double, double>> out;
            for (const auto& r : sweep_normalized(c, parse_sweep_var(var), grid)) out.emplace_back(r.p_a, r.p_a_normalized);
            return out;
        },
        py::arg("config"), py::arg("var"), py::arg("grid"));

    m.def(
        "worst_case",
        [](const ExperimentConfig& c) {
            const auto r = worst_case_report(c, config_box(c));
            return py::dict(py::arg("p_max") = r.p_max, py::arg("delta_a") = r.delta_a,
                            py::arg("delta_omega") = r.delta_omega, py::arg("delta_phi") = r.delta_phi,
                            py::arg("p_at_zero") = r.p_at_zero);
        },
        py::arg("config"));

    m.def("doppler_speed_limit", &doppler_speed_limit, py::arg("delta_omega"), py::arg("carrier_omega"),
          py::arg("wave_speed"));
}
