#include "bellrv/report.hpp"

#include <algorithm>
#include <cmath>

#include "bellrv/errors.hpp"

namespace bellrv {

bool RunReport::overall_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void RunReport::check_close(const std::string& name, double expected, double actual, double tolerance)
{
    checks.push_back({name, expected, actual, tolerance, std::abs(actual - expected) <= tolerance});
}

void RunReport::check_at_most(const std::string& name, double bound, double actual, double tolerance)
{
    checks.push_back({name, bound, actual, tolerance, actual <= bound + tolerance});
}

void RunReport::check_equal(const std::string& name, const Json& expected, const Json& actual)
{
    checks.push_back({name, expected, actual, 0.0, expected == actual});
}

Json RunReport::to_json() const
{
    Json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["results"] = results;
    Json list = Json::array();
    for (const auto& c : checks) {
        Json item;
        item["name"] = c.name;
        item["expected"] = c.expected;
        item["actual"] = c.actual;
        item["tolerance"] = c.tolerance;
        item["pass"] = c.pass;
        list.push_back(std::move(item));
    }
    j["checks"] = std::move(list);
    j["overall_pass"] = overall_pass();
    return j;
}

RunReport RunReport::from_json(const Json& j)
{
    try {
        RunReport r;
        r.command = j.at("command").get<std::string>();
        r.parameters = j.at("parameters");
        r.results = j.at("results");
        for (const auto& item : j.at("checks")) {
            r.checks.push_back({item.at("name").get<std::string>(), item.at("expected"), item.at("actual"),
                                item.at("tolerance").get<double>(), item.at("pass").get<bool>()});
        }
        if (j.at("overall_pass").get<bool>() != r.overall_pass()) {
            throw InvalidArgument("overall_pass disagrees with the individual checks");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed report: ") + e.what());
    }
}

}  // namespace bellrv
