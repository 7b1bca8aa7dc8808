#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>

#include "subfourier/commands.hpp"
#include "subfourier/config.hpp"
#include "subfourier/errors.hpp"
#include "subfourier/scan.hpp"
#include "subfourier/schedule.hpp"
#include "subfourier/spectrum.hpp"

namespace py = pybind11;
using namespace subfourier;

namespace {

using Settings = std::map<std::string, std::string>;

RunConfig make_config(const std::string& preset_name, const Settings& overrides) {
    RunConfig c = preset_name.empty() ? RunConfig{} : preset(preset_name);
    for (const auto& [k, v] : overrides) apply_setting(c, k, v);
    resolve_units(c);
    validate(c);
    return c;
}

py::dict width_dict(const WidthReport& w) {
    py::dict d;
    d["delta_r"] = w.delta_r;
    d["W"] = w.W;
    d["left"] = w.left;
    d["right"] = w.right;
    d["baseline"] = w.baseline;
    d["peak"] = w.peak;
    d["peak_r"] = w.peak_r;
    d["fourier_width"] = w.fourier_width;
    d["subfourier_factor"] = w.subfourier_factor;
    return d;
}

py::dict curve_dict(const ResonanceCurve& c) {
    py::dict d;
    d["r"] = c.r;
    d["p0"] = c.p0;
    d["se"] = c.se;
    try {
        auto w = width_dict(fwhm(c));
        w["delta_r_error"] = fwhm_error(c);
        d["width"] = w;
    } catch (const AnalysisError& e) {
        d["width"] = py::none();
        d["width_error"] = std::string(e.what());
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kicked-rotor resonance simulator (compiled core)";

    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    auto numerical_error = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);
    (void)config_error;
    (void)numerical_error;

    m.def(
        "resolved_settings",
        [](const std::string& preset_name, const Settings& s) { return settings(make_config(preset_name, s)); },
        py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def(
        "run_command",
        [](const std::string& name, const std::string& preset_name, const Settings& s) {
            const auto c = make_config(preset_name, s);
            CommandResult res;
            {
                py::gil_scoped_release release;
                res = run_command(name, c);
            }
            std::vector<std::string> files;
            for (const auto& f : res.files) files.push_back(f.string());
            return py::make_tuple(files, res.status);
        },
        py::arg("command"), py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def(
        "schedule",
        [](const std::string& preset_name, const Settings& s) {
            const auto c = make_config(preset_name, s);
            const auto sched = build_schedule(c.params, c.strict_overlap);
            std::vector<double> t, k, w;
            for (const auto& e : sched.events) {
                t.push_back(e.time);
                k.push_back(e.strength);
                w.push_back(e.width);
            }
            py::dict d;
            d["time"] = t;
            d["strength"] = k;
            d["width"] = w;
            d["N2"] = c.params.resolved_N2();
            d["total_duration"] = sched.total_duration;
            return d;
        },
        py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def(
        "evolve",
        [](const std::string& preset_name, const Settings& s) {
            const auto c = make_config(preset_name, s);
            EnsembleRun run;
            {
                py::gil_scoped_release release;
                run = run_ensemble(c.params, build_schedule(c.params, c.strict_overlap),
                                   kick_record_times(c.params.N1), run_options(c));
            }
            py::dict d;
            d["n"] = run.times;
            d["mean_P2"] = run.mean_p2;
            d["p0"] = run.p0;
            d["p0_se"] = run.p0_se;
            d["members"] = run.members.size();
            return d;
        },
        py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def(
        "scan",
        [](const std::vector<double>& r, const std::string& preset_name, const Settings& s) {
            const auto c = make_config(preset_name, s);
            ResonanceCurve curve;
            {
                py::gil_scoped_release release;
                curve = scan_resonance(c.params, r, ScanOptions{run_options(c), c.strict_overlap});
            }
            return curve_dict(curve);
        },
        py::arg("r"), py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def(
        "spectrum",
        [](const std::vector<double>& f, const std::string& preset_name, const Settings& s) {
            const auto c = make_config(preset_name, s);
            return sequence_spectrum(build_schedule(c.params, c.strict_overlap), f).power;
        },
        py::arg("f"), py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def(
        "f_half_width",
        [](const std::string& preset_name, const Settings& s) { return f_half_width(make_config(preset_name, s).params); },
        py::arg("preset") = "", py::arg("settings") = Settings{});

    m.def("harmonic_weight", &harmonic_weight, py::arg("tau"), py::arg("j"));
    m.def("in_central_lobe", &in_central_lobe, py::arg("tau"), py::arg("j"));
    m.def("hbar_eff_from_lab", &hbar_eff_from_lab, py::arg("f1_khz"), py::arg("lambda_nm") = cesium_lambda_nm,
          py::arg("mass_kg") = cesium_mass_kg);

    m.def(
        "classical_diffusion",
        [](double K, int kicks, int ensemble, std::uint64_t seed) {
            py::gil_scoped_release release;
            return classical_diffusion(K, kicks, ensemble, seed);
        },
        py::arg("K"), py::arg("kicks"), py::arg("ensemble") = 100000, py::arg("seed") = 1);

    m.def(
        "peak_width",
        [](const std::vector<double>& x, const std::vector<double>& y, std::optional<double> baseline,
           const std::vector<double>& se) {
            const auto w = peak_width(x, y, baseline, se);
            py::dict d;
            d["width"] = w.width;
            d["left"] = w.left;
            d["right"] = w.right;
            d["baseline"] = w.baseline;
            d["peak"] = w.peak;
            d["peak_x"] = w.peak_x;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("baseline") = py::none(), py::arg("se") = std::vector<double>{});
}
