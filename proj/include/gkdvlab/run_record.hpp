#pragma once

// Run records: every experiment emits a JSON document echoing its
// configuration and listing each numerical check with the measured value,
// the target, the tolerance, and the anchor string (the formula or bound
// the check instantiates). Exit codes derive from all_pass().

#include <fstream>

#include <json.hpp>

#include "core.hpp"

namespace gkdvlab {

struct Check {
    std::string name;
    std::string anchor; // formula / bound being checked, e.g. "(P,Q) = m0^2"
    double measured = 0.0;
    double expected = 0.0;
    double tol = 0.0;
    bool pass = false;
};

inline Check check_abs(std::string name, std::string anchor, double measured, double expected,
                       double tol) {
    const bool ok = std::isfinite(measured) && std::abs(measured - expected) <= tol;
    return {std::move(name), std::move(anchor), measured, expected, tol, ok};
}

inline Check check_rel(std::string name, std::string anchor, double measured, double expected,
                       double tol) {
    const bool ok =
        std::isfinite(measured) && std::abs(measured - expected) <= tol * std::abs(expected);
    return {std::move(name), std::move(anchor), measured, expected, tol, ok};
}

// One-sided bound: pass iff measured <= bound (use -measured for >=).
inline Check check_below(std::string name, std::string anchor, double measured, double bound) {
    const bool ok = std::isfinite(measured) && measured <= bound;
    return {std::move(name), std::move(anchor), measured, bound, 0.0, ok};
}

struct RunRecord {
    std::string experiment;
    nlohmann::json config;
    std::vector<Check> checks;
    std::vector<std::string> artifacts;
    double wall_seconds = 0.0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["experiment"] = experiment;
        j["config"] = config;
        j["wall_seconds"] = wall_seconds;
        j["artifacts"] = artifacts;
        j["all_pass"] = all_pass();
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"name", c.name},
                                   {"anchor", c.anchor},
                                   {"measured", c.measured},
                                   {"expected", c.expected},
                                   {"tol", c.tol},
                                   {"pass", c.pass}});
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ConfigInvalid("RunRecord: cannot open " + path);
        out << to_json().dump(2) << "\n";
    }
};

} // namespace gkdvlab
