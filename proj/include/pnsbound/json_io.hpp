// SPDX-License-Identifier: Apache-2.0
//
// Strict JSON reading and writing for the dataset summaries and results.
// Unknown fields are rejected so that typos such as delta_x in a stratum
// (which expects delta_x_c) fail loudly instead of defaulting to zero.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnsbound/classic_bounds.hpp"
#include "pnsbound/core.hpp"
#include "pnsbound/merge_bounds.hpp"
#include "pnsbound/oracle.hpp"
#include "pnsbound/scm_sim.hpp"

namespace pnsbound::json_io {

using nlohmann::json;

/// Malformed or schema-violating JSON input.
class SchemaError : public DomainError {
public:
    using DomainError::DomainError;
};

namespace detail {

inline void require_object(const json& j, const std::string& what) {
    if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
}

inline void require_fields(const json& j, const std::string& what,
                           std::initializer_list<const char*> required,
                           std::initializer_list<const char*> optional = {}) {
    require_object(j, what);
    for (const char* key : required) {
        if (!j.contains(key)) throw SchemaError(what + " is missing field '" + key + "'");
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : required) known = known || item.key() == key;
        for (const char* key : optional) known = known || item.key() == key;
        if (!known) throw SchemaError("unknown field '" + item.key() + "' in " + what);
    }
}

inline double number(const json& j, const char* key, const std::string& what) {
    const json& v = j.at(key);
    if (!v.is_number()) throw SchemaError(what + "." + key + " must be a number");
    return v.get<double>();
}

inline std::vector<double> numbers(const json& v, const std::string& what) {
    if (!v.is_array()) throw SchemaError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw SchemaError(what + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace detail

[[nodiscard]] inline TargetMarginal parse_target(const json& j) {
    detail::require_fields(j, "target", {"p_x", "p_z1_given_x1", "p_z1_given_x0"});
    return {detail::number(j, "p_x", "target"), detail::number(j, "p_z1_given_x1", "target"),
            detail::number(j, "p_z1_given_x0", "target")};
}

[[nodiscard]] inline ExternalMarginal parse_external(const json& j) {
    detail::require_fields(j, "external", {"p_y", "p_z1_given_y"}, {"delta_x"});
    ExternalMarginal out;
    out.p_y = detail::numbers(j.at("p_y"), "external.p_y");
    out.p_e1 = detail::numbers(j.at("p_z1_given_y"), "external.p_z1_given_y");
    if (j.contains("delta_x")) out.delta_x = detail::number(j, "delta_x", "external");
    return out;
}

[[nodiscard]] inline StratifiedInput parse_stratified(const json& j) {
    detail::require_fields(j, "stratified", {"p_x", "p_y", "strata"});
    StratifiedInput out;
    out.p_x = detail::number(j, "p_x", "stratified");
    out.p_y = detail::numbers(j.at("p_y"), "stratified.p_y");
    const json& strata = j.at("strata");
    if (!strata.is_array()) throw SchemaError("stratified.strata must be an array");
    for (std::size_t c = 0; c < strata.size(); ++c) {
        const std::string what = "stratified.strata[" + std::to_string(c) + "]";
        const json& s = strata[c];
        detail::require_fields(s, what,
                               {"p_c", "p_z1_given_x1", "p_z1_given_x0", "p_z1_given_y", "delta_x_c"});
        out.strata.push_back({detail::number(s, "p_c", what), detail::number(s, "p_z1_given_x1", what),
                              detail::number(s, "p_z1_given_x0", what),
                              detail::numbers(s.at("p_z1_given_y"), what + ".p_z1_given_y"),
                              detail::number(s, "delta_x_c", what)});
    }
    return out;
}

/// p_z1 is indexed [c][x][y].
[[nodiscard]] inline JointDistribution parse_joint(const json& j) {
    detail::require_fields(j, "joint", {"p_c", "p_y", "p_z1"});
    JointDistribution out;
    out.p_c = detail::numbers(j.at("p_c"), "joint.p_c");
    out.p_y = detail::numbers(j.at("p_y"), "joint.p_y");
    const json& z = j.at("p_z1");
    if (!z.is_array()) throw SchemaError("joint.p_z1 must be an array indexed [c][x][y]");
    for (std::size_t c = 0; c < z.size(); ++c) {
        const std::string what = "joint.p_z1[" + std::to_string(c) + "]";
        if (!z[c].is_array() || z[c].size() != 2) {
            throw SchemaError(what + " must hold two rows, for X = 0 and X = 1");
        }
        out.z1.push_back({detail::numbers(z[c][0], what + "[0]"), detail::numbers(z[c][1], what + "[1]")});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// Rounds to `digits` significant digits so the serialized form is short.
[[nodiscard]] inline double round_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

class Writer {
public:
    explicit Writer(int digits = 9) : digits_(digits) {}

    [[nodiscard]] json num(double v) const { return round_sig(v, digits_); }

    [[nodiscard]] json nums(const std::vector<double>& v) const {
        json out = json::array();
        for (double x : v) out.push_back(num(x));
        return out;
    }

    [[nodiscard]] json interval(const BoundResult& b) const {
        return {{"lower", num(b.lower)}, {"upper", num(b.upper)}};
    }

    [[nodiscard]] json bounds(const BoundResult& b) const {
        json out = interval(b);
        out["phi"] = nums(b.phi);
        out["theta"] = nums(b.theta);
        return out;
    }

    [[nodiscard]] json stratified(const StratifiedBoundResult& r) const {
        json out = bounds(r.aggregate);
        out["per_stratum"] = json::array();
        for (const auto& s : r.per_stratum) out["per_stratum"].push_back(bounds(s));
        return out;
    }

    [[nodiscard]] json joint(const JointBounds& r) const {
        json out = interval(r.bounds);
        out["components"] = {{"delta_c", nums(r.components.delta_c)},
                             {"gamma_c", nums(r.components.gamma_c)}};
        return out;
    }

    [[nodiscard]] json tightness(const TightnessReport& r) const {
        json out{{"contained", r.contained},
                 {"strictly_tighter_lower", r.strictly_tighter_lower},
                 {"strictly_tighter_upper", r.strictly_tighter_upper},
                 {"joint", interval(r.joint)},
                 {"covariate_only", interval(r.covariate_only)}};
        out["per_stratum"] = json::array();
        for (const auto& s : r.per_stratum) {
            out["per_stratum"].push_back(
                {{"lower_sign_varies", s.lower_sign_varies}, {"upper_sign_varies", s.upper_sign_varies}});
        }
        return out;
    }

    [[nodiscard]] json oracle(const OracleResult& r) const {
        return {{"lower", num(r.lower)},
                {"upper", num(r.upper)},
                {"argmin_delta", nums(r.argmin_delta.values)},
                {"argmin_gamma", nums(r.argmin_gamma.values)},
                {"grid_points_per_dim", r.grid_points_per_dim},
                {"slack_lower", num(r.slack_lower)},
                {"slack_upper", num(r.slack_upper)}};
    }

    [[nodiscard]] json oracle(const StratifiedOracleResult& r) const {
        json out{{"lower", num(r.lower)},
                 {"upper", num(r.upper)},
                 {"slack_lower", num(r.slack_lower)},
                 {"slack_upper", num(r.slack_upper)}};
        out["per_stratum"] = json::array();
        for (const auto& s : r.per_stratum) out["per_stratum"].push_back(oracle(s));
        return out;
    }

    [[nodiscard]] json coverage(const CoverageReport& r) const {
        json out{{"trials", r.trials},
                 {"violations", r.violations},
                 {"mean_width_merged", num(r.mean_width_merged)},
                 {"mean_width_tian_pearl", num(r.mean_width_tian_pearl)},
                 {"violations_by_check", r.violations_by_check}};
        if (!r.first_failures.empty()) out["first_failures"] = r.first_failures;
        return out;
    }

private:
    int digits_;
};

}  // namespace pnsbound::json_io
