// SPDX-License-Identifier: Apache-2.0
//
// Bounds that need no external dataset: the exogenous two-sided bound from
// P(Z | X) alone, and the covariate-adjusted bounds available when the full
// conditional table P(Z | X, Y[, C]) is observed.
#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "pnsbound/core.hpp"

namespace pnsbound {

/// Tolerance for sign tests on contrasts in tightness_check.
inline constexpr double kContrastTol = 1e-12;

/// max{0, p11 - p10} <= PNS <= min{p11, p00}.
[[nodiscard]] inline BoundResult tian_pearl_bounds(const TargetMarginal& target) {
    BoundResult out;
    out.lower = std::max(0.0, target.p11 - target.p10);
    out.upper = std::min(target.p11, target.p00());
    return out;
}

/// Weighted hinge sums of one conditional table.
struct HingeSums {
    double delta = 0.0;  ///< sum_y P(y) max{0, P(Z=1|X=1,y) - P(Z=1|X=0,y)}
    double gamma = 0.0;  ///< sum_y P(y) max{0, P(Z=1|X=1,y) - P(Z=0|X=0,y)}
    double p11 = 0.0;    ///< sum_y P(y) P(Z=1|X=1,y)
};

[[nodiscard]] inline HingeSums hinge_sums(const ConditionalTable& table,
                                          const std::vector<double>& p_y) {
    HingeSums out;
    for (std::size_t y = 0; y < p_y.size(); ++y) {
        const double treated = table.given_x1[y];
        const double control = table.given_x0[y];
        out.delta += p_y[y] * std::max(0.0, treated - control);
        out.gamma += p_y[y] * std::max(0.0, treated - (1.0 - control));
        out.p11 += p_y[y] * treated;
    }
    return out;
}

/// Bounds from the observed table P(Z | X, Y) of a single covariate level:
/// [Delta, P(Z=1|X=1) - Gamma].
[[nodiscard]] inline BoundResult dawid_bounds(const ConditionalTable& table,
                                              const std::vector<double>& p_y) {
    const HingeSums s = hinge_sums(table, p_y);
    BoundResult out;
    out.lower = s.delta;
    out.upper = s.p11 - s.gamma;
    return out;
}

struct JointBoundComponents {
    std::vector<double> delta_c;
    std::vector<double> gamma_c;
};

struct JointBounds {
    BoundResult bounds;
    JointBoundComponents components;
};

/// sum_C P(C) Delta_C <= PNS <= p11 - sum_C P(C) Gamma_C, with the hinge sums
/// taken over Y inside each level of C.
[[nodiscard]] inline JointBounds joint_covariate_bounds(const JointDistribution& joint) {
    validate(joint);
    JointBounds out;
    double p11 = 0.0;
    double lower = 0.0;
    double gamma = 0.0;
    for (std::size_t c = 0; c < joint.p_c.size(); ++c) {
        const HingeSums s = hinge_sums(joint.z1[c], joint.p_y);
        out.components.delta_c.push_back(s.delta);
        out.components.gamma_c.push_back(s.gamma);
        lower += joint.p_c[c] * s.delta;
        gamma += joint.p_c[c] * s.gamma;
        p11 += joint.p_c[c] * s.p11;
    }
    out.bounds.lower = lower;
    out.bounds.upper = p11 - gamma;
    return out;
}

/// Same bound family with Y marginalized away inside each level of C, so only
/// P(Z | X, C) is used.
[[nodiscard]] inline BoundResult covariate_only_bounds(const JointDistribution& joint) {
    validate(joint);
    double p11 = 0.0;
    double lower = 0.0;
    double gamma = 0.0;
    for (std::size_t c = 0; c < joint.p_c.size(); ++c) {
        const ConditionalTable& t = joint.z1[c];
        double treated = 0.0;
        double control = 0.0;
        for (std::size_t y = 0; y < joint.p_y.size(); ++y) {
            treated += joint.p_y[y] * t.given_x1[y];
            control += joint.p_y[y] * t.given_x0[y];
        }
        lower += joint.p_c[c] * std::max(0.0, treated - control);
        gamma += joint.p_c[c] * std::max(0.0, treated - (1.0 - control));
        p11 += joint.p_c[c] * treated;
    }
    return {lower, p11 - gamma, {}, {}};
}

struct StratumTightness {
    bool lower_sign_varies = false;  ///< Delta contrasts take both signs across Y
    bool upper_sign_varies = false;  ///< Gamma contrasts take both signs across Y
};

struct TightnessReport {
    bool contained = false;
    bool strictly_tighter_lower = false;
    bool strictly_tighter_upper = false;
    std::vector<StratumTightness> per_stratum;
    BoundResult joint;           ///< bounds using Y and C
    BoundResult covariate_only;  ///< bounds using C alone
};

namespace detail {

template <typename Contrast>
bool sign_varies(std::size_t n, Contrast&& contrast) {
    bool pos = false;
    bool neg = false;
    for (std::size_t y = 0; y < n; ++y) {
        const double d = contrast(y);
        pos = pos || d > kContrastTol;
        neg = neg || d < -kContrastTol;
    }
    return pos && neg;
}

}  // namespace detail

/// Compares joint_covariate_bounds against covariate_only_bounds. A stratum
/// tightens a side exactly when its contrasts change sign across Y, since the
/// weighted sum of hinges then exceeds the hinge of the weighted sum.
[[nodiscard]] inline TightnessReport tightness_check(const JointDistribution& joint) {
    TightnessReport out;
    out.joint = joint_covariate_bounds(joint).bounds;
    out.covariate_only = covariate_only_bounds(joint);
    out.contained = out.covariate_only.interval().contains(out.joint.interval(), kContrastTol);
    const std::size_t n = joint.p_y.size();
    for (const ConditionalTable& t : joint.z1) {
        StratumTightness s;
        s.lower_sign_varies =
            detail::sign_varies(n, [&](std::size_t y) { return t.given_x1[y] - t.given_x0[y]; });
        s.upper_sign_varies = detail::sign_varies(
            n, [&](std::size_t y) { return t.given_x1[y] - (1.0 - t.given_x0[y]); });
        out.strictly_tighter_lower = out.strictly_tighter_lower || s.lower_sign_varies;
        out.strictly_tighter_upper = out.strictly_tighter_upper || s.upper_sign_varies;
        out.per_stratum.push_back(s);
    }
    return out;
}

}  // namespace pnsbound
