// Python bindings for the bellrv core.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bellrv/chsh.hpp"
#include "bellrv/commands.hpp"
#include "bellrv/hidden_variables.hpp"
#include "bellrv/moment_lp.hpp"
#include "bellrv/quantum.hpp"

namespace py = pybind11;
using namespace bellrv;

namespace {

// A setting from Python: a float is a planar angle in radians, a triple is a direction.
using PySetting = std::variant<double, std::array<double, 3>>;

UnitVector3 direction(const std::array<double, 3>& v) { return UnitVector3::normalized(v[0], v[1], v[2]); }

UnitVector3 as_direction(const PySetting& s)
{
    if (const auto* angle = std::get_if<double>(&s)) return UnitVector3::planar(*angle);
    return direction(std::get<std::array<double, 3>>(s));
}

Setting as_setting(const PySetting& s)
{
    if (const auto* angle = std::get_if<double>(&s)) return Setting::angle(*angle);
    return Setting(direction(std::get<std::array<double, 3>>(s)));
}

MeasurementQuad as_quad(const std::array<PySetting, 4>& q)
{
    return {as_direction(q[0]), as_direction(q[1]), as_direction(q[2]), as_direction(q[3])};
}

py::dict feasibility_dict(const MomentInstance& inst, const FeasibilityResult& r)
{
    py::dict d;
    d["status"] = r.status == FeasibilityStatus::feasible ? "Feasible" : "Infeasible";
    d["phase_one_objective"] = r.phase_one_objective;
    if (r.certificate) {
        d["coefficients"] = r.certificate->coefficients;
        d["classical_bound"] = r.certificate->classical_bound;
        d["target_value"] = r.certificate->target_value;
        d["gap"] = r.certificate->gap();
    } else {
        d["weights"] = r.weights;
    }
    d["audit"] = verify_result(inst, r);
    return d;
}

py::dict report_dict(const RunReport& r) { return py::module_::import("json").attr("loads")(r.to_json().dump()); }

}  // namespace

PYBIND11_MODULE(_bellrv, m)
{
    m.doc() = "Bell correlations, hidden-variable models and moment feasibility.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<NonHermitian>(m, "NonHermitian", base.ptr());
    py::register_exception<NonCommuting>(m, "NonCommuting", base.ptr());
    py::register_exception<Marginal>(m, "Marginal", base.ptr());
    py::register_exception<CapExceeded>(m, "CapExceeded", base.ptr());

    m.def("quantum_correlation",
          [](const PySetting& a, const PySetting& b) { return quantum_correlation(as_direction(a), as_direction(b)); },
          py::arg("a"), py::arg("b"), "Singlet correlation <psi| sigma.a x sigma.b |psi> = -a.b.");
    m.def("triple_correlation",
          [](const PySetting& a, const PySetting& b) {
              return triple_correlation(triple_spin_model(), as_direction(a), as_direction(b));
          },
          py::arg("a"), py::arg("b"));
    m.def("cosine_correlation", &cosine_correlation, py::arg("alpha"), py::arg("beta"));
    m.def("scalar_sign_correlation",
          [](const PySetting& a, const PySetting& b) {
              return scalar_sign_correlation(as_direction(a), as_direction(b));
          },
          py::arg("a"), py::arg("b"));
    m.def("gram_matrix", [] {
        const auto g = triple_spin_model().gram();
        std::vector<std::vector<std::string>> out(3, std::vector<std::string>(3));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) out[i][j] = g[i][j].str();
        return out;
    }, "Exact Gram matrix of the triple model as rational strings.");

    m.def("chsh_value",
          [](const std::string& source, const std::array<PySetting, 4>& quad) {
              return chsh_value(CorrelationSource::parse(source), as_quad(quad));
          },
          py::arg("source"), py::arg("quad"), "Signed CHSH value for settings (a, a', b, b').");
    m.def("tsirelson_chsh", [](const std::string& source) {
        return chsh_value(CorrelationSource::parse(source), tsirelson_quad());
    }, py::arg("source") = "quantum");
    m.def("max_chsh",
          [](const std::string& source, int grid_steps, int refine_iters) {
              const ChshOptimum best = max_chsh(CorrelationSource::parse(source), grid_steps, refine_iters);
              py::dict d;
              d["value"] = best.value;
              d["angles"] = best.angles;
              return d;
          },
          py::arg("source") = "quantum", py::arg("grid_steps") = 24, py::arg("refine_iters") = 60);

    m.def("check_feasibility",
          [](const std::vector<double>& party1, const std::vector<double>& party2, const Eigen::MatrixXd& targets,
             double tol) {
              const MomentInstance inst{party1, party2, targets};
              return feasibility_dict(inst, check_feasibility(inst, tol));
          },
          py::arg("party1"), py::arg("party2"), py::arg("targets"), py::arg("tol") = kDefaultFeasibilityTolerance,
          "Moment feasibility for planar angles (radians) and an m x n target table.");
    m.def("quantum_targets", [](const std::vector<double>& party1, const std::vector<double>& party2) {
        return quantum_targets(party1, party2);
    });

    m.def("mc_correlation",
          [](const std::string& model, const PySetting& a, const PySetting& b, std::uint64_t n, std::uint64_t seed,
             unsigned lanes) {
              const LHVModelSpec spec{parse_model_kind(model)};
              const McResult r = mc_correlation(spec, as_setting(a), as_setting(b), n, seed, lanes);
              py::dict d;
              d["estimate"] = r.estimate;
              d["std_error"] = r.std_error;
              d["exact"] = exact_correlation(spec, as_setting(a), as_setting(b));
              d["n"] = r.n;
              return d;
          },
          py::arg("model"), py::arg("a"), py::arg("b"), py::arg("n"), py::arg("seed") = 42, py::arg("lanes") = 1);

    m.def("spectral_representation",
          [](const std::vector<ComplexMatrix>& ops, const ComplexVector& state, double tol) {
              const DiscreteProbabilitySpace s = spectral_representation(ops, StateVector(state), tol);
              return py::make_tuple(s.weights, s.value_table);
          },
          py::arg("ops"), py::arg("state"), py::arg("tol") = kDefaultOperatorTolerance,
          "Returns (P, f) with P[w] the weights and f[i][w] the eigenvalue of operator i.");

    m.def("verify_quantum", [](int trials, std::uint64_t seed, double tol) {
        return report_dict(cmd_verify_quantum(trials, seed, tol));
    }, py::arg("trials") = 1000, py::arg("seed") = 42, py::arg("tol") = 1e-12);
    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::vector<std::string> argv{"bellrv"};
              argv.insert(argv.end(), args.begin(), args.end());
              std::ostringstream out;
              std::ostringstream err;
              const int code = run_cli(argv, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Runs the command-line front end; returns (exit_code, stdout, stderr).");
}
