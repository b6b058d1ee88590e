#pragma once

// Command implementations behind the `bellrv` executable. Each returns a
// RunReport; run_cli wires them to argv, stdout/stderr and exit codes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bellrv/chsh.hpp"
#include "bellrv/errors.hpp"
#include "bellrv/hidden_variables.hpp"
#include "bellrv/moment_lp.hpp"
#include "bellrv/report.hpp"

namespace bellrv {

enum ExitCode : int {
    kExitPass = 0,
    kExitCheckFailed = 1,
    kExitUsage = 2,
    kExitMarginal = 3,
};

/// Instance or operator file that does not follow its schema.
class SchemaError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

inline constexpr int kSchemaVersion = 1;

/// Parses a moment-check instance document:
///   { "schema": 1,
///     "party1": {"angles_deg": [...]} | {"angles_rad": [...]} | {"vectors": [[x,y,z], ...]},
///     "party2": same,
///     "targets": [[...], ...] }
MomentInstance parse_instance(const Json& doc);
MomentInstance load_instance(const std::filesystem::path& path);
Json instance_to_json(const MomentInstance& instance);

struct OperatorSet {
    std::vector<ComplexMatrix> ops;
    StateVector state;
};

/// Operator file: { "schema": 1, "operators": [{"real": [[..]], "imag": [[..]]}, ...],
///                  "state": {"real": [..], "imag": [..]} }; "imag" is optional.
OperatorSet parse_operator_set(const Json& doc);
OperatorSet spectral_preset(const std::string& name);

RunReport cmd_verify_quantum(int trials, std::uint64_t seed, double tolerance);

struct ChshOptions {
    std::string source = "quantum";
    std::optional<std::array<double, 4>> angles;  // radians: a, a', b, b'
    std::optional<CorrelationTable> table;
    bool search = false;
    int grid_steps = 24;
    int refine_iters = 60;
    std::optional<double> tolerance;
};
RunReport cmd_chsh(const ChshOptions& options);

/// Throws Marginal for near-boundary instances.
RunReport cmd_moment_check(const std::filesystem::path& instance_path, double tolerance);

/// "x", "y", "z"; a single angle (degrees unless `radians`); or "x,y,z",
/// which is normalized onto the sphere.
Setting parse_setting(const std::string& text, bool radians);

RunReport cmd_simulate(const std::string& model, const Setting& a, const Setting& b, std::uint64_t n,
                       std::uint64_t seed, unsigned lanes = 1);

/// `source` is a preset name (singlet-zz, singlet-xx, diagonal) or a path to an operator file.
RunReport cmd_spectral_demo(const std::string& source, double tolerance);

/// Error document and exit code for an exception escaping a command.
Json error_json(const std::string& command, const std::exception& e);
int exit_code_for(const std::exception& e);

/// Parses argv (argv[0] is the program name), runs the command, writes the
/// JSON report to `out` and a human summary to `err`; returns the exit code.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace bellrv
