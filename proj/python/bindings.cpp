#include "rdpredict/errors.hpp"
#include "rdpredict/io.hpp"
#include "rdpredict/pipeline.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace rdpredict;

namespace {

Config config_from_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", e.what());
    }
    return parse_config(doc);
}

py::array_t<double> rows_to_array(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n ? rows.front().size() : 0;
    py::array_t<double> out({n, m});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = rows[i][j];
    return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::dict eig(const std::string& text) {
    const Config c = config_from_text(text);
    SpectralBasis b;
    {
        py::gil_scoped_release release;
        b = solve_basis(c);
    }
    py::dict d;
    d["eigenvalues"] = to_array(b.eigenvalues);
    d["xi"] = to_array(b.grid.nodes);
    d["eigenfunctions"] = rows_to_array(b.eigenfunctions);
    return d;
}

std::string certify_json(const std::string& text) {
    const Config c = config_from_text(text);
    py::gil_scoped_release release;
    const SpectralBasis b = solve_basis(c);
    return dump_json(certify(c, b).to_json());
}

py::dict simulate(const std::string& text) {
    const Config c = config_from_text(text);
    SimulationRun r;
    json meta;
    {
        py::gil_scoped_release release;
        const SpectralBasis b = solve_basis(c);
        r = run(make_simulation_config(c, b), b);
        meta = run_metadata_json(c, r, std::nullopt);
    }
    py::dict d;
    d["t"] = to_array(r.times);
    d["x"] = rows_to_array(r.x);
    d["w"] = rows_to_array(r.w);
    d["normX"] = to_array(r.normX);
    d["normU"] = to_array(r.normU);
    d["delta_norm"] = to_array(r.delta_norm);
    d["kappa_est"] = r.kappa_est;
    d["diverged"] = r.diverged;
    d["metadata"] = dump_json(meta);
    return d;
}

std::vector<std::tuple<double, double, bool>> sweep_rows(const std::string& text, const std::vector<double>& deltas) {
    const Config c = config_from_text(text);
    py::gil_scoped_release release;
    const SpectralBasis b = solve_basis(c);
    std::vector<std::tuple<double, double, bool>> out;
    for (const auto& row : sweep(c, b, deltas)) out.emplace_back(row.delta, row.kappa_est, row.diverged);
    return out;
}

std::vector<std::string> run_command(const std::string& command, const std::string& config_path,
                                     const std::string& out_dir) {
    const Config c = load_config(config_path);
    py::gil_scoped_release release;
    RunManifest m;
    if (command == "eig") m = cmd_eig(c, out_dir);
    else if (command == "certify") m = cmd_certify(c, out_dir);
    else if (command == "simulate") m = cmd_simulate(c, out_dir);
    else if (command == "sweep") m = cmd_sweep(c, out_dir);
    else throw InvalidArgument("unknown command '" + command + "'");
    return m.outputs;
}

}  // namespace

PYBIND11_MODULE(_rdpredict, m) {
    m.doc() = "Predictor feedback for reaction-diffusion PDEs with distributed input delay";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def("eig", &eig, py::arg("config_json"));
    m.def("certify_json", &certify_json, py::arg("config_json"));
    m.def("simulate", &simulate, py::arg("config_json"));
    m.def("sweep", &sweep_rows, py::arg("config_json"), py::arg("deltas"));
    m.def("run_command", &run_command, py::arg("command"), py::arg("config_path"), py::arg("out_dir"));
    m.def("config_hash", [](const std::string& text) { return config_hash(config_from_text(text)); });
    m.def("resolve_config", [](const std::string& text) { return dump_json(to_json(config_from_text(text))); });

    m.def(
        "place_poles",
        [](const std::vector<double>& lambdas, double D0, const std::vector<double>& poles) {
            const PolePlacement p = place_poles(lambdas, D0, poles);
            return py::make_tuple(p.Acl, p.K);
        },
        py::arg("lambdas"), py::arg("D0"), py::arg("poles"));
    m.def("small_gain_lhs", &small_gain_lhs, py::arg("Acl"), py::arg("K"), py::arg("M"), py::arg("sigma"),
          py::arg("N"), py::arg("delta"));
    m.def(
        "max_delta",
        [](const Matrix& Acl, const Matrix& K, std::size_t N, double D0, bool sigma_search) {
            const MaxDeltaResult r = max_delta(Acl, K, N, D0, sigma_search);
            return py::dict(py::arg("delta_max") = r.delta_max, py::arg("M") = r.M, py::arg("sigma") = r.sigma,
                            py::arg("capped") = r.capped);
        },
        py::arg("Acl"), py::arg("K"), py::arg("N"), py::arg("D0"), py::arg("sigma_search") = true);
    m.def(
        "paper_delay",
        [](double t, double xi, double D0, double amplitude) {
            return evaluate_delay(DelayField::paper_example(D0, amplitude), t, xi);
        },
        py::arg("t"), py::arg("xi"), py::arg("D0") = 1.0, py::arg("amplitude") = 0.23);
    m.def(
        "fit_decay",
        [](const std::vector<double>& t, const std::vector<double>& x, double fraction) {
            return fit_decay(t, x, fraction);
        },
        py::arg("times"), py::arg("normX"), py::arg("window_fraction") = 1.0 / 3.0);
    m.attr("__version__") = version();
}
