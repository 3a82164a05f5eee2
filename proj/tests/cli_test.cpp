// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "pnsbound/cli.hpp"

using namespace pnsbound;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(PNSBOUND_DATA_DIR) + "/" + name; }

struct Outcome {
    int code;
    json doc;
};

Outcome run(cli::Subcommand sub, const std::string& input, std::size_t grid = 0) {
    cli::Command cmd;
    cmd.subcommand = sub;
    cmd.input_path = input.empty() ? "" : data(input);
    cmd.grid = grid;
    cmd.threads = 1;
    std::ostringstream out;
    const int code = cli::run(cmd, out);
    return {code, json::parse(out.str())};
}

}  // namespace

TEST(Cli, SubcommandNames) {
    EXPECT_EQ(cli::parse_subcommand("merge-delta"), cli::Subcommand::merge_delta);
    EXPECT_EQ(cli::parse_subcommand("tian-pearl"), cli::Subcommand::tian_pearl);
    EXPECT_FALSE(cli::parse_subcommand("merge_delta").has_value());
}

TEST(Cli, MergeReportsBothIntervals) {
    const auto r = run(cli::Subcommand::merge, "ex_c.json");
    ASSERT_EQ(r.code, cli::kExitOk) << r.doc.dump();
    EXPECT_NEAR(r.doc["lower"].get<double>(), 0.3, 1e-9);
    EXPECT_NEAR(r.doc["upper"].get<double>(), 0.35, 1e-9);
    EXPECT_NEAR(r.doc["phi"][1].get<double>(), 0.45, 1e-9);
    EXPECT_NEAR(r.doc["tian_pearl"]["upper"].get<double>(), 0.5, 1e-9);
}

TEST(Cli, MergeRejectsShiftButMergeDeltaAcceptsIt) {
    EXPECT_EQ(run(cli::Subcommand::merge, "ex_c_shifted.json").code, cli::kExitInvalid);
    const auto r = run(cli::Subcommand::merge_delta, "ex_c_shifted.json");
    ASSERT_EQ(r.code, cli::kExitOk) << r.doc.dump();
    EXPECT_NEAR(r.doc["upper"].get<double>(), 0.35, 1e-9);
}

TEST(Cli, IncompatibleInputExitsWithError) {
    const auto r = run(cli::Subcommand::merge, "incompatible.json");
    EXPECT_EQ(r.code, cli::kExitInvalid);
    EXPECT_NE(r.doc["error"].get<std::string>().find("compatibility identity violated"),
              std::string::npos);
}

TEST(Cli, StratifiedJointAndTightness) {
    const auto s = run(cli::Subcommand::merge_stratified, "stratified.json");
    ASSERT_EQ(s.code, cli::kExitOk) << s.doc.dump();
    EXPECT_NEAR(s.doc["lower"].get<double>(), 0.15, 1e-9);
    EXPECT_NEAR(s.doc["upper"].get<double>(), 0.375, 1e-9);
    EXPECT_EQ(s.doc["per_stratum"].size(), 2u);

    const auto j = run(cli::Subcommand::joint, "joint.json");
    ASSERT_EQ(j.code, cli::kExitOk) << j.doc.dump();
    EXPECT_NEAR(j.doc["lower"].get<double>(), 0.15, 1e-9);
    EXPECT_NEAR(j.doc["upper"].get<double>(), 0.375, 1e-9);

    const auto t = run(cli::Subcommand::tightness, "joint.json");
    ASSERT_EQ(t.code, cli::kExitOk) << t.doc.dump();
    EXPECT_TRUE(t.doc["contained"].get<bool>());
    EXPECT_TRUE(t.doc["strictly_tighter_upper"].get<bool>());
}

TEST(Cli, OracleAndBudget) {
    const auto r = run(cli::Subcommand::oracle, "ex_c.json", 1001);
    ASSERT_EQ(r.code, cli::kExitOk) << r.doc.dump();
    EXPECT_NEAR(r.doc["lower"].get<double>(), 0.3, 1e-6);
    EXPECT_NEAR(r.doc["upper"].get<double>(), 0.35, 1e-6);
    EXPECT_EQ(r.doc["grid_points_per_dim"].get<std::size_t>(), 1001u);
    EXPECT_EQ(run(cli::Subcommand::oracle, "ex_n6.json", 30).code, cli::kExitBudget);
    EXPECT_EQ(run(cli::Subcommand::oracle, "stratified.json", 101).code, cli::kExitOk);
}

TEST(Cli, MissingOrMalformedInput) {
    EXPECT_EQ(run(cli::Subcommand::merge, "does_not_exist.json").code, cli::kExitInvalid);
    EXPECT_EQ(run(cli::Subcommand::merge, "").code, cli::kExitInvalid);
    EXPECT_EQ(run(cli::Subcommand::merge, "joint.json").code, cli::kExitInvalid);
}

TEST(JsonIo, UnknownFieldsAreRejected) {
    const json stratum = {{"p_c", 1.0},         {"p_z1_given_x1", 0.8}, {"p_z1_given_x0", 0.5},
                          {"p_z1_given_y", {0.45, 0.97}}, {"delta_x", 0.0}};
    const json doc = {{"p_x", 0.7}, {"p_y", {0.5, 0.5}}, {"strata", {stratum}}};
    EXPECT_THROW((void)json_io::parse_stratified(doc), json_io::SchemaError);
    EXPECT_THROW((void)json_io::parse_target({{"p_x", "0.5"}, {"p_z1_given_x1", 0.9}, {"p_z1_given_x0", 0.3}}),
                 json_io::SchemaError);
}

TEST(JsonIo, WriterRoundsToRequestedDigits) {
    EXPECT_EQ(json_io::round_sig(0.123456789012, 4), 0.1235);
    const json_io::Writer w(3);
    EXPECT_EQ(w.num(1.0 / 3.0).get<double>(), 0.333);
}
