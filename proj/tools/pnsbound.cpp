// SPDX-License-Identifier: Apache-2.0
//
// pnsbound: bounds on the probability of necessity and sufficiency from a
// target dataset merged with an external dataset.
//
// Usage: pnsbound <subcommand> [--input FILE] [options]

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pnsbound/cli.hpp"

using pnsbound::cli::Command;
using pnsbound::cli::Subcommand;

int main(int argc, char** argv) {
    CLI::App app{"Bounds on the probability of necessity and sufficiency"};
    app.require_subcommand(1);

    Command cmd;
    const std::map<std::string, std::string> help = {
        {"tian-pearl", "Bounds from the target marginal alone"},
        {"merge", "Merged bounds, equal treatment mechanisms"},
        {"merge-delta", "Merged bounds with external prevalence p_x + delta_x"},
        {"merge-stratified", "Merged bounds per covariate stratum, weighted by P(C)"},
        {"joint", "Bounds from the full table P(Z | X, Y, C)"},
        {"tightness", "Compare joint bounds against covariate-only bounds"},
        {"oracle", "Brute-force grid minimization over the coherence box"},
        {"simulate", "Coverage trials on random response-function SCMs"},
    };

    for (const auto& [name, description] : help) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->callback([&cmd, name = name] { cmd.subcommand = *pnsbound::cli::parse_subcommand(name); });
        sub->add_option("--tol", cmd.tol, "Absolute tolerance for probability identities")
            ->check(CLI::PositiveNumber);
        sub->add_option("--precision", cmd.output_precision, "Significant digits in output")
            ->check(CLI::Range(1, 17));
        if (name == "simulate") {
            sub->add_option("--trials", cmd.trials, "Number of random SCMs");
            sub->add_option("--seed", cmd.seed, "Seed of the first trial");
            sub->add_option("--support-y", cmd.support_y, "Number of levels of Y")
                ->check(CLI::Range(2, 9));
            sub->add_option("--support-c", cmd.support_c, "Number of levels of C")
                ->check(CLI::Range(1, 4));
            sub->add_option("--delta-policy", cmd.delta_policy, "Treatment-mechanism shift")
                ->transform(CLI::CheckedTransformer(
                    std::map<std::string, pnsbound::DeltaPolicy>{
                        {"zero", pnsbound::DeltaPolicy::zero}, {"random", pnsbound::DeltaPolicy::random}},
                    CLI::ignore_case));
        } else {
            sub->add_option("--input,-i", cmd.input_path, "JSON input file")->required();
        }
        if (name == "oracle" || name == "simulate") {
            sub->add_option("--grid", cmd.grid, "Grid points per free parameter (default by N)")
                ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
            sub->add_option("--threads", cmd.threads, "Worker threads (0 = all cores)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pnsbound::cli::kExitInvalid;
    }
    return pnsbound::cli::run(cmd, std::cout);
}
