// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "pnsbound/merge_bounds.hpp"
#include "pnsbound/oracle.hpp"
#include "pnsbound/scm_sim.hpp"
#include "support/brute_force.hpp"

using namespace pnsbound;

namespace {

const TargetMarginal kTargetC{0.7, 0.8, 0.5};
const ExternalMarginal kExternalC{{0.5, 0.5}, {0.45, 0.97}, 0.0};

}  // namespace

TEST(GammaDeltaTerms, HandEvaluatedAtBoxCorner) {
    // f_1 = 1 gives the table [[0.1, 0.9], [0.6, 1.0]].
    const auto terms = gamma_delta_terms(kTargetC, kExternalC, {{1.0}});
    ASSERT_EQ(terms.gamma_terms.size(), 2u);
    EXPECT_NEAR(terms.gamma_terms[0], -0.3, 1e-12);
    EXPECT_NEAR(terms.gamma_terms[1], 0.9, 1e-12);
    EXPECT_NEAR(terms.delta_terms[0], 0.5, 1e-12);
    EXPECT_NEAR(terms.delta_terms[1], 0.1, 1e-12);
    const auto obj = objectives_at(kTargetC, kExternalC, {{1.0}});
    EXPECT_NEAR(obj.gamma, 0.45, 1e-12);
    EXPECT_NEAR(obj.delta, 0.3, 1e-12);
}

TEST(Oracle, RecoversClosedFormOnUnequalPrevalenceInstance) {
    const auto r = oracle_bounds(kTargetC, kExternalC, 1001, 1);
    EXPECT_NEAR(r.lower, 0.3, 1e-9);
    EXPECT_NEAR(r.upper, 0.35, 1e-9);
    EXPECT_EQ(r.grid_points_per_dim, 1001u);
    ASSERT_EQ(r.argmin_gamma.values.size(), 1u);
    EXPECT_NEAR(r.argmin_gamma.values[0], 1.0, 1e-9);
}

TEST(Oracle, PointIdentifiedWithTwoPoints) {
    const TargetMarginal t{0.5, 0.9, 0.3};
    const ExternalMarginal e{{0.5, 0.5}, {0.4, 0.8}, 0.0};
    const auto r = oracle_bounds(t, e, 2, 1);
    EXPECT_NEAR(r.lower, 0.6, 1e-12);
    EXPECT_NEAR(r.upper, 0.6, 1e-12);
}

TEST(Oracle, SlackShrinksWithGrid) {
    const auto coarse = oracle_bounds(kTargetC, kExternalC, 11, 1);
    const auto fine = oracle_bounds(kTargetC, kExternalC, 101, 1);
    EXPECT_GT(coarse.slack_lower, fine.slack_lower);
    EXPECT_NEAR(coarse.slack_lower / fine.slack_lower, 10.0, 1e-9);
}

TEST(Oracle, ErrorsAreTyped) {
    EXPECT_THROW((void)oracle_bounds(kTargetC, {{0.5, 0.5}, {0.5, 0.97}, 0.0}), InfeasibleError);
    EXPECT_THROW((void)oracle_bounds({0.5, 1.0, 0.0}, {{0.5, 0.5}, {0.9, 0.1}, 0.0}), InfeasibleError);
    EXPECT_THROW((void)oracle_bounds(kTargetC, {{1.0}, {0.71}, 0.0}), ArityError);
    EXPECT_THROW((void)oracle_bounds(kTargetC, kExternalC, 1), DomainError);
    const auto m = marginalize(random_scm(3, 6, 1));
    EXPECT_THROW((void)oracle_bounds(m.target, m.external, 100), BudgetError);
}

TEST(Oracle, ParallelScanEqualsSerialScan) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = marginalize(random_scm(seed, 3, 1));
        const auto a = oracle_bounds(m.target, m.external, 301, 1);
        const auto b = oracle_bounds(m.target, m.external, 301, 4);
        EXPECT_EQ(a.lower, b.lower);
        EXPECT_EQ(a.upper, b.upper);
        EXPECT_EQ(a.argmin_delta.values, b.argmin_delta.values);
        EXPECT_EQ(a.argmin_gamma.values, b.argmin_gamma.values);
    }
}

TEST(Oracle, AgreesWithIndependentBruteForce) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n_y = 2 + seed % 2;
        const auto m = marginalize(random_scm(seed + 77, n_y, 1));
        const auto r = oracle_bounds(m.target, m.external, 0, 1);
        const auto bf = reference::brute_force_bounds(m.target.p_x, m.target.p11, m.target.p10,
                                                    m.external.p_y, m.external.p_e1, 0.0,
                                                    n_y == 2 ? 20000 : 400);
        ASSERT_GT(bf.coherent_points, 0u);
        EXPECT_NEAR(r.lower, bf.lower, 5e-3) << "seed " << seed;
        EXPECT_NEAR(r.upper, bf.upper, 5e-3) << "seed " << seed;
    }
}

TEST(Oracle, MatchesClosedFormWithinSlack) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n_y = 2 + seed % 3;
        const auto m = marginalize(random_scm(seed + 3000, n_y, 1));
        const auto closed = theorem2_bounds(m.target, m.external);
        const auto r = oracle_bounds(m.target, m.external, 0, 0);
        EXPECT_LE(std::abs(r.lower - closed.lower), r.slack_lower + 1e-9) << "seed " << seed;
        EXPECT_LE(std::abs(r.upper - closed.upper), r.slack_upper + 1e-9) << "seed " << seed;
    }
}

TEST(Oracle, StratifiedAggregatesWithWeights) {
    const StratifiedInput in{0.7,
                             {0.5, 0.5},
                             {{0.5, 0.8, 0.5, {0.45, 0.97}, 0.0}, {0.5, 0.4, 0.4, {0.4, 0.4}, 0.0}}};
    const auto r = oracle_bounds_stratified(in, 1001, 1);
    const auto closed = theorem6_bounds(in).aggregate;
    ASSERT_EQ(r.per_stratum.size(), 2u);
    EXPECT_NEAR(r.lower, closed.lower, 1e-9);
    EXPECT_NEAR(r.upper, closed.upper, 1e-9);
}
