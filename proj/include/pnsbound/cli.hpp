// SPDX-License-Identifier: Apache-2.0
//
// Subcommand dispatch for the pnsbound tool. Every subcommand writes a single
// JSON document to the output stream. Exit status is 0 on success, 2 on
// invalid or incompatible input ({"error": ...} is written) and 3 when the
// oracle grid exceeds its budget.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pnsbound/classic_bounds.hpp"
#include "pnsbound/core.hpp"
#include "pnsbound/json_io.hpp"
#include "pnsbound/merge_bounds.hpp"
#include "pnsbound/oracle.hpp"
#include "pnsbound/scm_sim.hpp"

namespace pnsbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitBudget = 3;

enum class Subcommand {
    tian_pearl,
    merge,
    merge_delta,
    merge_stratified,
    joint,
    tightness,
    oracle,
    simulate,
};

[[nodiscard]] inline std::optional<Subcommand> parse_subcommand(const std::string& name) {
    if (name == "tian-pearl") return Subcommand::tian_pearl;
    if (name == "merge") return Subcommand::merge;
    if (name == "merge-delta") return Subcommand::merge_delta;
    if (name == "merge-stratified") return Subcommand::merge_stratified;
    if (name == "joint") return Subcommand::joint;
    if (name == "tightness") return Subcommand::tightness;
    if (name == "oracle") return Subcommand::oracle;
    if (name == "simulate") return Subcommand::simulate;
    return std::nullopt;
}

struct Command {
    Subcommand subcommand = Subcommand::merge;
    std::string input_path;
    double tol = kDefaultTol;
    std::size_t grid = 0;  ///< 0 selects default_grid(N)
    int output_precision = 9;
    unsigned threads = 0;

    // simulate
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::size_t support_y = 2;
    std::size_t support_c = 1;
    DeltaPolicy delta_policy = DeltaPolicy::zero;
};

namespace detail {

using nlohmann::json;

inline json load(const std::string& path) {
    if (path.empty()) throw json_io::SchemaError("--input is required for this subcommand");
    std::ifstream in(path);
    if (!in) throw json_io::SchemaError("cannot open input file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw json_io::SchemaError(std::string("input is not valid JSON: ") + e.what());
    }
}

inline void allow_only(const json& doc, std::initializer_list<const char*> keys) {
    json_io::detail::require_object(doc, "input");
    for (const auto& item : doc.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw json_io::SchemaError("unknown top-level field '" + item.key() + "'");
    }
}

inline const json& field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw json_io::SchemaError(std::string("input is missing '") + key + "'");
    return doc.at(key);
}

inline json dispatch(const Command& cmd) {
    const json_io::Writer out(cmd.output_precision);
    if (!(cmd.tol > 0.0)) throw DomainError("tol must be positive");
    if (cmd.grid == 1) throw DomainError("grid must have at least 2 points per dimension");

    switch (cmd.subcommand) {
        case Subcommand::tian_pearl: {
            const json doc = load(cmd.input_path);
            allow_only(doc, {"target", "external"});
            const TargetMarginal target = json_io::parse_target(field(doc, "target"));
            validate(target);
            return out.interval(tian_pearl_bounds(target));
        }
        case Subcommand::merge:
        case Subcommand::merge_delta: {
            const json doc = load(cmd.input_path);
            allow_only(doc, {"target", "external"});
            const TargetMarginal target = json_io::parse_target(field(doc, "target"));
            const ExternalMarginal external = json_io::parse_external(field(doc, "external"));
            const BoundResult r = cmd.subcommand == Subcommand::merge
                                      ? theorem2_bounds(target, external, cmd.tol)
                                      : theorem3_bounds(target, external, cmd.tol);
            json j = out.bounds(r);
            j["tian_pearl"] = out.interval(tian_pearl_bounds(target));
            return j;
        }
        case Subcommand::merge_stratified: {
            const json doc = load(cmd.input_path);
            allow_only(doc, {"stratified"});
            return out.stratified(
                theorem6_bounds(json_io::parse_stratified(field(doc, "stratified")), cmd.tol));
        }
        case Subcommand::joint: {
            const json doc = load(cmd.input_path);
            allow_only(doc, {"joint"});
            const JointDistribution joint = json_io::parse_joint(field(doc, "joint"));
            validate(joint, cmd.tol);
            return out.joint(joint_covariate_bounds(joint));
        }
        case Subcommand::tightness: {
            const json doc = load(cmd.input_path);
            allow_only(doc, {"joint"});
            const JointDistribution joint = json_io::parse_joint(field(doc, "joint"));
            validate(joint, cmd.tol);
            return out.tightness(tightness_check(joint));
        }
        case Subcommand::oracle: {
            const json doc = load(cmd.input_path);
            allow_only(doc, {"target", "external", "stratified"});
            if (doc.contains("stratified")) {
                if (doc.contains("target") || doc.contains("external")) {
                    throw json_io::SchemaError("give either target/external or stratified, not both");
                }
                return out.oracle(oracle_bounds_stratified(json_io::parse_stratified(doc.at("stratified")),
                                                           cmd.grid, cmd.threads, cmd.tol));
            }
            return out.oracle(oracle_bounds(json_io::parse_target(field(doc, "target")),
                                            json_io::parse_external(field(doc, "external")), cmd.grid,
                                            cmd.threads, cmd.tol));
        }
        case Subcommand::simulate: {
            CoverageOptions options;
            options.seed = cmd.seed;
            options.trials = cmd.trials;
            options.support_y = cmd.support_y;
            options.support_c = cmd.support_c;
            options.delta_policy = cmd.delta_policy;
            options.grid = cmd.grid;
            options.threads = cmd.threads;
            options.tol = cmd.tol;
            if (cmd.support_y < 2) throw DomainError("--support-y must be at least 2");
            if (cmd.support_c < 1) throw DomainError("--support-c must be at least 1");
            if (2 * cmd.support_y * cmd.support_c > kMaxResponseCells) {
                throw DomainError("support-y * support-c must not exceed 9");
            }
            return out.coverage(coverage_trial(options));
        }
    }
    throw DomainError("unknown subcommand");
}

}  // namespace detail

/// Runs one command, writing its JSON result or {"error": ...} to `out`.
inline int run(const Command& cmd, std::ostream& out) {
    try {
        out << detail::dispatch(cmd).dump() << '\n';
        return kExitOk;
    } catch (const BudgetError& e) {
        out << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return kExitBudget;
    } catch (const Error& e) {
        out << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return kExitInvalid;
    } catch (const nlohmann::json::exception& e) {
        out << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return kExitInvalid;
    }
}

}  // namespace pnsbound::cli
