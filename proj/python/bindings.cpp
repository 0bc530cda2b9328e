#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "compreg/divergences.hpp"
#include "compreg/evalsim.hpp"
#include "compreg/io.hpp"
#include "compreg/plot.hpp"
#include "compreg/zeros.hpp"

namespace py = pybind11;
using namespace compreg;

namespace {

Composition as_composition(const Eigen::VectorXd& v)
{
    return Composition(v);
}

ZeroPolicy policy_of(const std::string& zero_replace, double delta_fraction)
{
    if (zero_replace.empty() || zero_replace == "none") {
        return ZeroPolicy::none();
    }
    if (zero_replace == "multiplicative") {
        return ZeroPolicy::multiplicative(delta_fraction);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown zero replacement '" + zero_replace + "'");
}

py::dict report_dict(const SimReport& report)
{
    py::dict out;
    const auto scores = [](const std::vector<std::optional<double>>& s) {
        py::list list;
        for (const auto& v : s) {
            list.append(v ? py::cast(*v) : py::none());
        }
        return list;
    };
    out["esov"] = scores(report.esov_scores);
    out["aitchison"] = scores(report.aitchison_scores);
    out["win_proportion"] = report.win_proportion;
    out["mean_esov"] = report.mean_esov;
    out["mean_aitchison"] = report.mean_aitchison;
    out["valid_replications"] = report.valid_replications;
    out["failures"] = report.failures;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Divergence-based regression for compositional data";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result(
        [&]() { return py::exception<Error>(m, "CompregError", PyExc_ValueError); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            const std::string message = std::string(to_string(e.code())) + ": " + e.what();
            py::set_error(error_type.get_stored(), message.c_str());
        }
    });

    m.def("closure", [](const Eigen::VectorXd& raw) { return closure(raw).parts(); }, py::arg("raw"));
    m.def("alr", [](const Eigen::VectorXd& y) { return alr(as_composition(y)); }, py::arg("y"),
          "log(y[1:] / y[0]); the first part is the base");
    m.def("alr_inverse", [](const Eigen::VectorXd& z) { return alr_inverse(z).parts(); }, py::arg("z"));
    m.def("clr", [](const Eigen::VectorXd& x) { return clr(as_composition(x)); }, py::arg("x"));
    m.def("helmert_submatrix", [](int parts) { return helmert_submatrix(parts); }, py::arg("parts"));

    m.def("esov", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return esov(as_composition(x), as_composition(y));
    });
    m.def("kl", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return kl(as_composition(x), as_composition(y));
    });
    m.def("weighted_js", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda) {
        return weighted_js(as_composition(x), as_composition(y), lambda);
    }, py::arg("x"), py::arg("y"), py::arg("lam"));
    m.def("jeffreys", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return jeffreys(as_composition(x), as_composition(y));
    });
    m.def("hellinger", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return hellinger(as_composition(x), as_composition(y));
    });
    m.def("chi_square", [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return chi_square(as_composition(x), as_composition(y));
    });

    py::class_<FitResult>(m, "FitResult")
        .def_property_readonly("model", [](const FitResult& f) { return to_string(f.model); })
        .def_property_readonly("coefficients", [](const FitResult& f) { return f.coefficients.values; })
        .def_readonly("fitted", &FitResult::fitted)
        .def_readonly("objective", &FitResult::objective)
        .def_readonly("initial_objective", &FitResult::initial_objective)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("restarts", &FitResult::restarts)
        .def_readonly("converged", &FitResult::converged)
        .def("to_json", [](const FitResult& f) { return io::fit_to_json(f).dump(); });

    m.def("fit",
          [](const Eigen::MatrixXd& responses, const Eigen::MatrixXd& design, const std::string& model,
             int multistart) {
              FitOptions options;
              options.multistart = multistart;
              return fit(CompositionalDataset(responses, design), parse_model_kind(model), options);
          },
          py::arg("responses"), py::arg("design"), py::arg("model") = "esov", py::arg("multistart") = 0,
          "Fit a regression; `design` includes the leading column of ones.");
    m.def("predict", [](const FitResult& f, const Eigen::MatrixXd& design) { return predict(f, design); },
          py::arg("fit"), py::arg("design"));

    m.def("replace_zeros",
          [](const Eigen::MatrixXd& y, double delta_fraction) {
              return replace_zeros(y, ZeroPolicy::multiplicative(delta_fraction));
          },
          py::arg("responses"), py::arg("delta_fraction") = 0.65);
    m.def("inject_zeros", &inject_zeros, py::arg("responses"), py::arg("component_count"),
          py::arg("row_fraction"), py::arg("seed"));

    m.def("generate_logistic_normal",
          [](int n, int parts, int covariates, std::uint64_t seed, double noise_scale) {
              SimConfig config;
              config.n = n;
              config.parts = parts;
              config.covariates = covariates;
              config.validate();
              const GeneratedData gen = generate_logistic_normal(config, seed, noise_scale);
              return py::make_tuple(gen.data.responses(), gen.data.design(), gen.coefficients.values);
          },
          py::arg("n"), py::arg("parts"), py::arg("covariates") = 2, py::arg("seed") = 1,
          py::arg("noise_scale") = 1.0, "Returns (responses, design, coefficients).");
    m.def("loocv_kl",
          [](const Eigen::MatrixXd& responses, const Eigen::MatrixXd& design, const std::string& model,
             const std::string& zero_replace, double delta_fraction) {
              return loocv_kl(CompositionalDataset(responses, design), parse_model_kind(model),
                              policy_of(zero_replace, delta_fraction));
          },
          py::arg("responses"), py::arg("design"), py::arg("model") = "esov", py::arg("zero_replace") = "none",
          py::arg("delta_fraction") = 0.65);
    m.def("run_comparison",
          [](int n, int parts, int covariates, int replications, std::uint64_t seed, bool zeros, int workers) {
              SimConfig config;
              config.n = n;
              config.parts = parts;
              config.covariates = covariates;
              config.replications = replications;
              config.seed = seed;
              config.workers = workers;
              if (zeros) {
                  config.zero_injection = ZeroInjection{default_zero_components(parts), 0.5};
              }
              py::gil_scoped_release release;
              const SimReport report = run_comparison(config);
              py::gil_scoped_acquire acquire;
              return report_dict(report);
          },
          py::arg("n"), py::arg("parts"), py::arg("covariates") = 2, py::arg("replications") = 200,
          py::arg("seed") = 1, py::arg("zeros") = false, py::arg("workers") = 0);

    m.def("ternary_point", [](double w1, double w2, double w3) {
        const plot::PlanePoint p = plot::ternary_point(w1, w2, w3);
        return py::make_tuple(p.x, p.y);
    });
}
