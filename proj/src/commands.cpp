#include "bellrv/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "bellrv/rng.hpp"

namespace bellrv {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr double kSigmaThreshold = 5.0;

Json vector_json(const UnitVector3& v)
{
    return Json::array({v.x(), v.y(), v.z()});
}

Json setting_json(const Setting& s)
{
    if (s.is_angle()) {
        Json j;
        j["angle_rad"] = s.as_angle();
        return j;
    }
    Json j;
    j["vector"] = vector_json(s.as_vector());
    return j;
}

Json matrix_json(const Eigen::MatrixXd& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json quad_json(const MeasurementQuad& q)
{
    Json j;
    j["a"] = vector_json(q.a);
    j["a_prime"] = vector_json(q.a_prime);
    j["b"] = vector_json(q.b);
    j["b_prime"] = vector_json(q.b_prime);
    return j;
}

UnitVector3 random_unit(std::uint64_t seed, std::uint64_t index)
{
    CounterRng rng(seed, index);
    double g0, g1, g2, unused;
    rng.gaussian_pair(g0, g1);
    rng.gaussian_pair(g2, unused);
    return UnitVector3::normalized(g0, g1, g2);
}

std::vector<double> parse_numbers(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("not a number: '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
            throw InvalidArgument("not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

PartySettings parse_party(const Json& j, const char* name)
{
    if (!j.is_object()) {
        throw SchemaError(std::string(name) + " must be an object");
    }
    if (j.contains("angles_deg") || j.contains("angles_rad")) {
        const bool deg = j.contains("angles_deg");
        std::vector<double> angles;
        for (const auto& a : j.at(deg ? "angles_deg" : "angles_rad")) {
            if (!a.is_number()) throw SchemaError(std::string(name) + " angles must be numbers");
            angles.push_back(a.get<double>() * (deg ? kDegree : 1.0));
        }
        return angles;
    }
    if (j.contains("vectors")) {
        std::vector<UnitVector3> vectors;
        for (const auto& v : j.at("vectors")) {
            if (!v.is_array() || v.size() != 3) throw SchemaError(std::string(name) + " vectors must be [x,y,z]");
            vectors.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
        }
        return vectors;
    }
    throw SchemaError(std::string(name) + " needs angles_deg, angles_rad or vectors");
}

Json party_json(const PartySettings& p)
{
    Json j;
    if (const auto* angles = std::get_if<std::vector<double>>(&p)) {
        j["angles_rad"] = *angles;
    } else {
        Json list = Json::array();
        for (const auto& v : std::get<std::vector<UnitVector3>>(p)) list.push_back(vector_json(v));
        j["vectors"] = std::move(list);
    }
    return j;
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open '" + path.string() + "'");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void require_schema(const Json& doc)
{
    if (!doc.is_object() || !doc.contains("schema") || doc.at("schema") != kSchemaVersion) {
        throw SchemaError("document must be an object with \"schema\": 1");
    }
}

ComplexMatrix parse_complex_matrix(const Json& j)
{
    const Json& re = j.at("real");
    const auto rows = static_cast<Eigen::Index>(re.size());
    if (rows == 0) throw SchemaError("operator must be non-empty");
    ComplexMatrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (re[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(rows)) {
            throw SchemaError("operators must be square");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            const double im = j.contains("imag") ? j.at("imag").at(r).at(c).get<double>() : 0.0;
            m(r, c) = Complex(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(), im);
        }
    }
    return m;
}

double reference_chsh(SourceKind kind, const MeasurementQuad& q)
{
    // Closed forms evaluated from geometry alone, independent of the source code path.
    auto c = [kind](const UnitVector3& x, const UnitVector3& y) {
        switch (kind) {
        case SourceKind::quantum:
        case SourceKind::triple:
            return -x.dot(y);
        case SourceKind::cosine_planar:
            return x.dot(y);
        case SourceKind::scalar_sign:
            return -1.0 + 2.0 * std::acos(std::clamp(x.dot(y), -1.0, 1.0)) / std::numbers::pi;
        case SourceKind::table:
            break;
        }
        return 0.0;
    };
    return c(q.a, q.b) - c(q.a, q.b_prime) + c(q.a_prime, q.b) + c(q.a_prime, q.b_prime);
}

void print_human(const RunReport& report, std::ostream& err)
{
    err << report.command << ": " << (report.overall_pass() ? "PASS" : "FAIL") << '\n';
    for (const auto& c : report.checks) {
        err << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << std::left << std::setw(32) << c.name
            << " expected=" << c.expected.dump() << " actual=" << c.actual.dump() << " tol=" << c.tolerance << '\n';
    }
}

}  // namespace

MomentInstance parse_instance(const Json& doc)
{
    require_schema(doc);
    try {
        MomentInstance inst{parse_party(doc.at("party1"), "party1"), parse_party(doc.at("party2"), "party2"), {}};
        const Json& t = doc.at("targets");
        if (!t.is_array() || t.empty() || !t[0].is_array()) {
            throw SchemaError("targets must be a non-empty m x n array");
        }
        const std::size_t m = t.size();
        const std::size_t n = t[0].size();
        inst.targets.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < m; ++i) {
            if (!t[i].is_array() || t[i].size() != n) throw SchemaError("targets rows must have equal length");
            for (std::size_t j = 0; j < n; ++j) {
                if (!t[i][j].is_number()) throw SchemaError("targets must be numbers");
                inst.targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t[i][j].get<double>();
            }
        }
        inst.validate();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("instance schema violation: ") + e.what());
    } catch (const CapExceeded&) {
        throw;
    } catch (const SchemaError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
}

MomentInstance load_instance(const std::filesystem::path& path)
{
    return parse_instance(read_json_file(path));
}

Json instance_to_json(const MomentInstance& instance)
{
    Json j;
    j["schema"] = kSchemaVersion;
    j["party1"] = party_json(instance.party1);
    j["party2"] = party_json(instance.party2);
    j["targets"] = matrix_json(instance.targets);
    return j;
}

OperatorSet parse_operator_set(const Json& doc)
{
    require_schema(doc);
    try {
        std::vector<ComplexMatrix> ops;
        for (const auto& op : doc.at("operators")) ops.push_back(parse_complex_matrix(op));
        if (ops.empty()) throw SchemaError("need at least one operator");
        const Json& st = doc.at("state");
        ComplexVector amp(static_cast<Eigen::Index>(st.at("real").size()));
        for (Eigen::Index k = 0; k < amp.size(); ++k) {
            const double im = st.contains("imag") ? st.at("imag").at(k).get<double>() : 0.0;
            amp(k) = Complex(st.at("real").at(k).get<double>(), im);
        }
        return {std::move(ops), StateVector::normalized(amp)};
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("operator file schema violation: ") + e.what());
    }
}

OperatorSet spectral_preset(const std::string& name)
{
    if (name == "singlet-zz") {
        return {{tensor(pauli(3), identity(2)), tensor(identity(2), pauli(3))}, singlet()};
    }
    if (name == "singlet-xx") {
        return {{tensor(pauli(1), identity(2)), tensor(identity(2), pauli(1))}, singlet()};
    }
    if (name == "diagonal") {
        ComplexMatrix d = ComplexMatrix::Zero(3, 3);
        d.diagonal() << 1.0, 2.0, 3.0;
        return {{d}, StateVector::normalized(ComplexVector::Ones(3))};
    }
    throw InvalidArgument("unknown spectral preset '" + name + "'");
}

Setting parse_setting(const std::string& text, bool radians)
{
    if (text == "x") return UnitVector3(1.0, 0.0, 0.0);
    if (text == "y") return UnitVector3(0.0, 1.0, 0.0);
    if (text == "z") return UnitVector3(0.0, 0.0, 1.0);
    const std::vector<double> v = parse_numbers(text);
    if (v.size() == 1) return Setting::angle(radians ? v[0] : v[0] * kDegree);
    if (v.size() == 3) return UnitVector3::normalized(v[0], v[1], v[2]);
    throw InvalidArgument("setting must be x, y, z, an angle, or x,y,z");
}

RunReport cmd_verify_quantum(int trials, std::uint64_t seed, double tolerance)
{
    if (trials < 1) {
        throw InvalidArgument("trials must be at least 1");
    }
    RunReport report;
    report.command = "verify-quantum";
    report.parameters["trials"] = trials;
    report.parameters["seed"] = seed;
    report.parameters["tolerance"] = tolerance;

    const StateVector psi = singlet();
    double max_dev = 0.0;
    double max_residual = 0.0;
    for (int k = 0; k < trials; ++k) {
        const UnitVector3 a = random_unit(seed, 2 * static_cast<std::uint64_t>(k));
        const UnitVector3 b = random_unit(seed, 2 * static_cast<std::uint64_t>(k) + 1);
        max_dev = std::max(max_dev, std::abs(quantum_correlation(a, b) + a.dot(b)));
        const ComplexMatrix total = tensor(spin_operator(a), identity(2)) + tensor(identity(2), spin_operator(a));
        max_residual = std::max(max_residual, (total * psi.amplitudes()).cwiseAbs().maxCoeff());
    }
    const UnitVector3 z(0.0, 0.0, 1.0);
    const double zz = quantum_correlation(z, z);

    report.results["max_correlation_deviation"] = max_dev;
    report.results["max_total_spin_residual"] = max_residual;
    report.results["q_z_z"] = zz;
    report.check_close("correlation_equals_minus_dot", 0.0, max_dev, tolerance);
    report.check_close("singlet_total_spin_zero", 0.0, max_residual, tolerance);
    report.check_close("aligned_z_z_anticorrelated", -1.0, zz, tolerance);
    return report;
}

RunReport cmd_chsh(const ChshOptions& options)
{
    const CorrelationSource source =
        options.table ? CorrelationSource::from_table(*options.table) : CorrelationSource::parse(options.source);
    const double tol = options.tolerance.value_or(options.search ? 1e-6 : 1e-12);

    RunReport report;
    report.command = "chsh";
    report.parameters["source"] = std::string(to_string(source.kind()));
    report.parameters["search"] = options.search;
    report.parameters["tolerance"] = tol;
    report.results["classical_bound"] = 2.0;

    if (options.search) {
        report.parameters["grid_steps"] = options.grid_steps;
        report.parameters["refine_iters"] = options.refine_iters;
        const ChshOptimum best = max_chsh(source, options.grid_steps, options.refine_iters);
        report.results["optimum"] = best.value;
        report.results["angles_rad"] = best.angles;
        report.results["quad"] = quad_json(best.quad);
        double expected = 2.0 * std::numbers::sqrt2;
        if (source.kind() == SourceKind::scalar_sign) expected = 2.0;
        if (source.kind() == SourceKind::table) expected = std::abs(chsh_value(source, tsirelson_quad()));
        report.check_close("optimum", expected, best.value, tol);
        return report;
    }

    const MeasurementQuad quad = options.angles ? MeasurementQuad::planar((*options.angles)[0], (*options.angles)[1],
                                                                          (*options.angles)[2], (*options.angles)[3])
                                                : tsirelson_quad();
    if (options.angles) report.parameters["angles_rad"] = *options.angles;
    const double s = chsh_value(source, quad);
    report.results["quad"] = quad_json(quad);
    report.results["S"] = s;
    report.results["abs_S"] = std::abs(s);
    report.results["exceeds_classical_bound"] = std::abs(s) > 2.0 + tol;

    switch (source.kind()) {
    case SourceKind::table:
        report.check_at_most("within_algebraic_bound", 4.0, std::abs(s), tol);
        break;
    case SourceKind::scalar_sign:
        report.check_close("abs_S", std::abs(reference_chsh(source.kind(), quad)), std::abs(s), tol);
        report.check_at_most("respects_classical_bound", 2.0, std::abs(s), tol);
        break;
    default:
        report.check_close("abs_S", std::abs(reference_chsh(source.kind(), quad)), std::abs(s), tol);
        break;
    }
    return report;
}

RunReport cmd_moment_check(const std::filesystem::path& instance_path, double tolerance)
{
    const MomentInstance instance = load_instance(instance_path);
    RunReport report;
    report.command = "moment-check";
    report.parameters["instance"] = instance_path.string();
    report.parameters["tolerance"] = tolerance;

    const FeasibilityResult result = check_feasibility(instance, tolerance);
    const bool audit = verify_result(instance, result);

    report.results["m"] = instance.m();
    report.results["n"] = instance.n();
    report.results["status"] = result.status == FeasibilityStatus::feasible ? "Feasible" : "Infeasible";
    report.results["phase_one_objective"] = result.phase_one_objective;
    if (result.status == FeasibilityStatus::feasible) {
        Json weights = Json::array();
        for (std::size_t s = 0; s < result.weights.size(); ++s) {
            if (result.weights[s] <= 0.0) continue;
            const DeterministicStrategy st = strategy_at(instance.m(), instance.n(), s);
            Json w;
            w["strategy"] = s;
            w["u"] = st.u;
            w["v"] = st.v;
            w["weight"] = result.weights[s];
            weights.push_back(std::move(w));
        }
        report.results["weights"] = std::move(weights);
    } else {
        const BellCertificate& cert = *result.certificate;
        Json c;
        c["coefficients"] = matrix_json(cert.coefficients);
        c["classical_bound"] = cert.classical_bound;
        c["target_value"] = cert.target_value;
        c["gap"] = cert.gap();
        report.results["certificate"] = std::move(c);
    }
    report.results["audit"] = audit;
    report.check_equal("audit", true, audit);
    return report;
}

RunReport cmd_simulate(const std::string& model, const Setting& a, const Setting& b, std::uint64_t n,
                       std::uint64_t seed, unsigned lanes)
{
    const LHVModelSpec spec{parse_model_kind(model)};
    RunReport report;
    report.command = "simulate";
    report.parameters["model"] = model;
    report.parameters["a"] = setting_json(a);
    report.parameters["b"] = setting_json(b);
    report.parameters["n"] = n;
    report.parameters["seed"] = seed;

    const McResult mc = mc_correlation(spec, a, b, n, seed, lanes);
    const double exact = exact_correlation(spec, a, b);
    const double diff = mc.estimate - exact;
    report.results["estimate"] = mc.estimate;
    report.results["std_error"] = mc.std_error;
    report.results["exact"] = exact;
    report.results["z_score"] = mc.std_error > 0.0 ? diff / mc.std_error : 0.0;
    const double band = mc.std_error > 0.0 ? kSigmaThreshold * mc.std_error : 1e-12;
    report.check_close("estimate_within_5_sigma", exact, mc.estimate, band);
    return report;
}

RunReport cmd_spectral_demo(const std::string& source, double tolerance)
{
    OperatorSet set = [&] {
        if (std::filesystem::exists(source)) return parse_operator_set(read_json_file(source));
        return spectral_preset(source);
    }();

    RunReport report;
    report.command = "spectral-demo";
    report.parameters["source"] = source;
    report.parameters["tolerance"] = tolerance;

    const DiscreteProbabilitySpace space = spectral_representation(set.ops, set.state, tolerance);
    report.results["omega_size"] = space.size();
    report.results["P"] = space.weights;
    report.results["f"] = space.value_table;

    // Every nonempty product of the observables against the direct sandwich.
    const std::size_t count = std::min<std::size_t>(set.ops.size(), 10);
    double max_dev = 0.0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << count); ++mask) {
        std::vector<std::size_t> subset;
        ComplexMatrix product = identity(set.state.dim());
        for (std::size_t i = 0; i < count; ++i) {
            if ((mask >> i) & 1U) {
                subset.push_back(i);
                product = product * set.ops[i];
            }
        }
        max_dev = std::max(max_dev, std::abs(space.moment(subset) - expectation(product, set.state).real()));
    }
    ComplexMatrix full = identity(set.state.dim());
    for (const auto& op : set.ops) full = full * op;
    const double direct = expectation(full, set.state).real();
    report.results["product_moment"] = space.full_moment();
    report.results["direct_sandwich"] = direct;

    const double mass = std::accumulate(space.weights.begin(), space.weights.end(), 0.0);
    report.check_close("weights_sum_to_one", 1.0, mass, 1e-12);
    report.check_close("product_moment_identity", direct, space.full_moment(), tolerance);
    report.check_close("all_subset_moments", 0.0, max_dev, tolerance);
    return report;
}

Json error_json(const std::string& command, const std::exception& e)
{
    Json j;
    j["command"] = command;
    j["error"]["type"] = dynamic_cast<const Marginal*>(&e)          ? "Marginal"
                         : dynamic_cast<const NonCommuting*>(&e)    ? "NonCommuting"
                         : dynamic_cast<const NonHermitian*>(&e)    ? "NonHermitian"
                         : dynamic_cast<const SchemaError*>(&e)     ? "SchemaError"
                         : dynamic_cast<const CapExceeded*>(&e)     ? "CapExceeded"
                         : dynamic_cast<const InvalidArgument*>(&e) ? "InvalidArgument"
                                                                    : "Error";
    j["error"]["message"] = e.what();
    return j;
}

int exit_code_for(const std::exception& e)
{
    return dynamic_cast<const Marginal*>(&e) != nullptr ? kExitMarginal : kExitUsage;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bell-inequality and hidden-variable verification toolkit", "bellrv"};
    app.fallthrough();
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    double tol = 0.0;
    bool json_only = false;
    bool radians = false;
    app.add_option("--seed", seed, "RNG seed");
    auto* tol_opt = app.add_option("--tol", tol, "Tolerance for checks");
    app.add_flag("--json-only", json_only, "Suppress the human-readable summary on stderr");
    app.add_flag("--radians", radians, "Interpret angles as radians instead of degrees");

    auto* verify = app.add_subcommand("verify-quantum", "Check Q(a,b) = -a.b on random unit pairs");
    int trials = 1000;
    verify->add_option("--trials", trials, "Number of random pairs")->check(CLI::PositiveNumber);

    auto* chsh = app.add_subcommand("chsh", "Evaluate or maximize the CHSH combination");
    ChshOptions chsh_opts;
    std::string angles_text;
    std::string table_text;
    chsh->add_option("--source", chsh_opts.source, "quantum, triple, cosine-planar or scalar-sign");
    chsh->add_option("--angles", angles_text, "Planar angles a,a',b,b'");
    chsh->add_option("--table", table_text, "Explicit correlations C(a,b),C(a,b'),C(a',b),C(a',b')");
    chsh->add_flag("--search", chsh_opts.search, "Maximize over coplanar quads");
    chsh->add_option("--grid", chsh_opts.grid_steps, "Grid points per angle");
    chsh->add_option("--refine", chsh_opts.refine_iters, "Coordinate-descent step sizes");

    auto* moment = app.add_subcommand("moment-check", "Decide LHV feasibility of a correlation table");
    std::string instance_path;
    moment->add_option("instance", instance_path, "Instance file")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a model correlation");
    std::string model;
    std::string a_text;
    std::string b_text;
    std::uint64_t samples = 10000;
    unsigned lanes = 1;
    simulate->add_option("--model", model, "triple, cosine or scalar-sign")->required();
    simulate->add_option("--a", a_text, "Party-1 setting")->required();
    simulate->add_option("--b", b_text, "Party-2 setting")->required();
    simulate->add_option("--n", samples, "Sample count")->check(CLI::PositiveNumber);
    simulate->add_option("--lanes", lanes, "Worker threads (results do not depend on it)");

    auto* spectral = app.add_subcommand("spectral-demo", "Spectral representation of commuting observables");
    std::string preset;
    std::string matrix_file;
    auto* preset_opt = spectral->add_option("--preset", preset, "singlet-zz, singlet-xx or diagonal");
    auto* file_opt = spectral->add_option("--file", matrix_file, "Operator file");
    preset_opt->excludes(file_opt);

    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
        if (spectral->parsed() && preset.empty() && matrix_file.empty()) {
            throw CLI::RequiredError("spectral-demo needs --preset or --file");
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const double angle_unit = radians ? 1.0 : kDegree;
    try {
        RunReport report;
        if (verify->parsed()) {
            report = cmd_verify_quantum(trials, seed, tol_opt->count() ? tol : 1e-12);
        } else if (chsh->parsed()) {
            if (!angles_text.empty()) {
                const auto v = parse_numbers(angles_text);
                if (v.size() != 4) throw InvalidArgument("--angles needs four values");
                chsh_opts.angles = std::array<double, 4>{v[0] * angle_unit, v[1] * angle_unit, v[2] * angle_unit,
                                                         v[3] * angle_unit};
            }
            if (!table_text.empty()) {
                const auto v = parse_numbers(table_text);
                if (v.size() != 4) throw InvalidArgument("--table needs four values");
                chsh_opts.table = CorrelationTable{{{v[0], v[1]}, {v[2], v[3]}}};
            }
            if (tol_opt->count()) chsh_opts.tolerance = tol;
            report = cmd_chsh(chsh_opts);
        } else if (moment->parsed()) {
            report = cmd_moment_check(instance_path, tol_opt->count() ? tol : kDefaultFeasibilityTolerance);
        } else if (simulate->parsed()) {
            report = cmd_simulate(model, parse_setting(a_text, radians), parse_setting(b_text, radians), samples,
                                  seed, lanes);
        } else {
            report = cmd_spectral_demo(preset.empty() ? matrix_file : preset,
                                       tol_opt->count() ? tol : kDefaultOperatorTolerance);
        }
        out << report.to_json().dump(2) << '\n';
        if (!json_only) print_human(report, err);
        return report.overall_pass() ? kExitPass : kExitCheckFailed;
    } catch (const std::exception& e) {
        out << error_json(command, e).dump(2) << '\n';
        err << command << ": error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace bellrv
