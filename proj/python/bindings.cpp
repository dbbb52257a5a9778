#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sscopic/criteria.hpp"
#include "sscopic/density.hpp"
#include "sscopic/error.hpp"
#include "sscopic/io.hpp"
#include "sscopic/states.hpp"
#include "sscopic/suites.hpp"

namespace py = pybind11;
using namespace sscopic;

namespace {

// Reports cross the boundary as JSON text; the Python wrapper decodes them.
std::string dump(const nlohmann::ordered_json& j) { return j.dump(); }

CriterionId criterion_of(const std::string& name) {
    const auto id = parse_criterion(name);
    require(id.has_value(), ErrorCode::InvalidArgument, "unknown criterion '" + name + "'");
    return *id;
}

Quadrature quadrature_of(const std::string& name) {
    require(name == "x" || name == "p", ErrorCode::InvalidArgument, "quadrature must be x or p");
    return name == "x" ? Quadrature::X : Quadrature::P;
}

}  // namespace

PYBIND11_MODULE(_sscopic, m) {
    m.doc() = "Quadrature statistics and S-scopic superposition criteria";

    static py::exception<Error> error(m, "SscopicError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object type = py::reinterpret_borrow<py::object>(error);
            py::object inst = type(std::string(to_string(e.code())) + ": " + e.what());
            inst.attr("code") = static_cast<int>(e.code());
            inst.attr("category") = to_string(e.code());
            PyErr_SetObject(error.ptr(), inst.ptr());
        }
    });

    m.def("sample", [](const std::string& state, const std::string& quadrature, std::size_t n, std::uint64_t seed) {
        return sample(parse_state(state), quadrature_of(quadrature), n, seed);
    }, py::arg("state"), py::arg("quadrature"), py::arg("n"), py::arg("seed") = 0);

    m.def("sample_joint_p", [](const std::string& state, std::size_t n, std::uint64_t seed) {
        const auto j = sample_joint_p(parse_state(state), n, seed);
        return std::make_pair(std::vector<double>(j.pa().begin(), j.pa().end()),
                              std::vector<double>(j.pb().begin(), j.pb().end()));
    }, py::arg("state"), py::arg("n"), py::arg("seed") = 0);

    m.def("sample_sum", [](const std::string& state, const std::string& quadrature, std::size_t n, std::uint64_t seed) {
        return sample_sum(parse_state(state), quadrature_of(quadrature), n, seed);
    }, py::arg("state"), py::arg("quadrature"), py::arg("n"), py::arg("seed") = 0);

    m.def("moments", [](const std::string& state, const std::string& quadrature) {
        const auto s = parse_state(state);
        const auto mo = quadrature_of(quadrature) == Quadrature::X ? pdf_x(s).moments() : pdf_p(s).moments();
        return std::make_pair(mo.mean, mo.variance);
    }, py::arg("state"), py::arg("quadrature"), "(mean, variance) of a quadrature law");

    m.def("bin_stats", [](const std::vector<double>& x, double S) {
        const auto b = bin_stats(Distribution::empirical(x), S);
        py::dict d;
        d["S"] = b.S;
        d["p_minus"] = b.p_minus;
        d["p_zero"] = b.p_zero;
        d["p_plus"] = b.p_plus;
        d["mu_minus"] = b.mu_minus;
        d["mu_plus"] = b.mu_plus;
        d["var_minus"] = b.var_minus;
        d["var_plus"] = b.var_plus;
        d["var_ave"] = b.var_ave;
        d["delta"] = b.delta;
        return d;
    }, py::arg("x"), py::arg("S"));

    m.def("evaluate_binned", [](const std::string& criterion, const std::vector<double>& x, double S, double var_p_like) {
        return dump(to_json(evaluate_binned(criterion_of(criterion), bin_stats(Distribution::empirical(x), S), var_p_like)));
    }, py::arg("criterion"), py::arg("x"), py::arg("S"), py::arg("var_p_like"));

    m.def("theorem4_smax", [](double dp) { return dump(to_json(theorem4_smax(dp))); }, py::arg("delta_p"));
    m.def("theorem5_smax", [](double stdev, const std::string& variant) {
        require(variant == "inference" || variant == "sum", ErrorCode::UnsupportedVariant,
                "variant must be inference or sum");
        return dump(to_json(theorem5_smax(stdev, variant == "sum" ? Theorem5Variant::Sum : Theorem5Variant::Inference)));
    }, py::arg("stdev"), py::arg("variant") = "inference");
    m.def("coherent_superposition_size", [](double var_p) { return dump(to_json(coherent_superposition_size(var_p))); },
          py::arg("var_p"));

    m.def("tmss_inference", [](double r) {
        const auto t = tmss_inference(r);
        return std::make_pair(t.gain, t.variance);
    }, py::arg("r"), "(gain, inference variance) of the two-mode squeezed state");

    m.def("smax", [](const std::string& state, const std::string& criterion, std::optional<double> s_hi) {
        SMaxOptions opts;
        opts.s_hi = s_hi;
        return dump(to_json(state_smax(parse_state(state), criterion_of(criterion), opts)));
    }, py::arg("state"), py::arg("criterion"), py::arg("s_hi") = py::none());

    m.def("analyze", [](const std::string& config_json, const std::vector<double>& x, std::optional<std::vector<double>> p,
                        std::optional<std::pair<std::vector<double>, std::vector<double>>> joint) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::Parse, std::string("config: ") + e.what());
        }
        auto config = config_from_json(j);
        if (config.criteria.empty()) config.criteria = criteria_for(config.mode);
        AnalysisInput in;
        in.x = x;
        if (p) in.p = std::move(*p);
        if (joint) in.joint.emplace(joint->first, joint->second);
        py::gil_scoped_release release;
        return dump(to_json(run_analysis(config, in)));
    }, py::arg("config_json"), py::arg("x"), py::arg("p") = py::none(), py::arg("joint") = py::none());

    m.def("curve", [](const std::string& task, std::optional<double> from, std::optional<double> to,
                      std::optional<std::size_t> points) {
        const auto t = parse_curve_task(task);
        require(t.has_value(), ErrorCode::InvalidArgument, "unknown curve task '" + task + "'");
        auto params = default_curve_params(*t);
        if (from) params.from = *from;
        if (to) params.to = *to;
        if (points) params.points = *points;
        std::ostringstream os;
        write_csv(os, emit_curve(*t, params));
        return os.str();
    }, py::arg("task"), py::arg("start") = py::none(), py::arg("stop") = py::none(), py::arg("points") = py::none(),
       "CSV text with a one-line header");

    m.def("verify", [](const std::string& suite, std::size_t trials, std::uint64_t seed) {
        py::gil_scoped_release release;
        const std::vector<double> caps{1.0, 2.0, 4.0, 8.0};
        if (suite == "fuzz") return dump(to_json(verify_fuzz(caps, trials, seed)));
        if (suite == "grid") return dump(to_json(verify_grid()));
        if (suite == "appendix-a") return dump(to_json(verify_appendix_a(trials, 6, seed)));
        if (suite == "appendix-b") return dump(to_json(verify_appendix_b(trials, 2000, seed)));
        fail(ErrorCode::InvalidArgument, "unknown suite '" + suite + "'");
    }, py::arg("suite"), py::arg("trials") = 100, py::arg("seed") = 0);

    m.def("decompose", [](const Eigen::MatrixXcd& rho, std::size_t i, std::size_t j) {
        const DensityMatrix dm(rho);
        const auto d = appendix_a_decompose(dm, i, j);
        py::dict out;
        out["w1"] = d.w1;
        out["w2"] = d.w2;
        out["rho1"] = d.rho1 ? py::cast(Eigen::MatrixXcd(d.rho1->matrix())) : py::none();
        out["rho2"] = d.rho2 ? py::cast(Eigen::MatrixXcd(d.rho2->matrix())) : py::none();
        out["reconstruction_error"] = reconstruction_error(dm, d);
        return out;
    }, py::arg("rho"), py::arg("i"), py::arg("j"));
}
