#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace bellrv {

using Json = nlohmann::ordered_json;

struct Check {
    std::string name;
    Json expected;
    Json actual;
    double tolerance = 0.0;
    bool pass = false;

    friend bool operator==(const Check&, const Check&) = default;
};

/// Structured outcome of one CLI command. Serializes to a single JSON object
/// with a fixed key order; overall_pass is the conjunction of the checks.
struct RunReport {
    std::string command;
    Json parameters = Json::object();
    Json results = Json::object();
    std::vector<Check> checks;

    bool overall_pass() const;

    /// Records |actual - expected| <= tolerance.
    void check_close(const std::string& name, double expected, double actual, double tolerance);
    /// Records actual <= bound (expected holds the bound).
    void check_at_most(const std::string& name, double bound, double actual, double tolerance);
    void check_equal(const std::string& name, const Json& expected, const Json& actual);

    Json to_json() const;
    /// Throws InvalidArgument on missing fields or an inconsistent overall_pass.
    static RunReport from_json(const Json& j);

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

}  // namespace bellrv
