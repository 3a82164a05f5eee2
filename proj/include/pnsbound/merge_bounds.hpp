// SPDX-License-Identifier: Apache-2.0
//
// Closed-form PNS bounds on the target dataset after merging it with an
// external dataset that records a different treatment or covariate Y.
//
// With q = P^E(X = 1) = p_x + delta_x, hi = max{q, 1 - q}, lo = min{q, 1 - q}:
//
//   Phi_i   = 1[p_e1[i] >= hi] * p_y[i] * (p_e1[i] - hi) / lo
//   Theta_i = 1[p_e1[i] <= lo] * p_y[i] * (lo - p_e1[i]) / lo
//
//   max{0, p11 - p10} <= PNS <= min{p11 - sum Phi_i, p00 - sum Theta_i}
//
// The lower bound is the exogenous one; the external data can only tighten
// the upper bound.
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "pnsbound/classic_bounds.hpp"
#include "pnsbound/core.hpp"

namespace pnsbound {

/// Stratified result: P(C)-weighted aggregate plus each stratum.
struct StratifiedBoundResult {
    BoundResult aggregate;
    std::vector<BoundResult> per_stratum;
};

namespace detail {

inline BoundResult merged_bounds(const TargetMarginal& target, const ExternalMarginal& external,
                                 double tol, const std::string& where = {}) {
    validate(target, external, tol);
    require_compatible(target, external, tol, where);

    const double q = target.p_x + external.delta_x;
    const double hi = std::max(1.0 - q, q);
    const double lo = std::min(1.0 - q, q);

    BoundResult out;
    out.phi.resize(external.support(), 0.0);
    out.theta.resize(external.support(), 0.0);
    double phi_sum = 0.0;
    double theta_sum = 0.0;
    for (std::size_t i = 0; i < external.support(); ++i) {
        const double pe = external.p_e1[i];
        if (pe >= hi) out.phi[i] = external.p_y[i] * (pe - hi) / lo;
        if (pe <= lo) out.theta[i] = external.p_y[i] * (lo - pe) / lo;
        phi_sum += out.phi[i];
        theta_sum += out.theta[i];
    }
    out.lower = std::max(0.0, target.p11 - target.p10);
    out.upper = std::min(target.p11 - phi_sum, target.p00() - theta_sum);

    if (out.lower > out.upper + tol) {
        throw IncompatibleError(where + "merged bounds cross (lower " + std::to_string(out.lower) +
                                " > upper " + std::to_string(out.upper) +
                                "); marginals admit no common joint");
    }
    // Rounding-level crossings only occur at point identification.
    out.upper = std::clamp(out.upper, out.lower, 1.0);
    return out;
}

}  // namespace detail

/// Binary Y, equal treatment mechanisms.
[[nodiscard]] inline BoundResult theorem1_bounds(const TargetMarginal& target,
                                                 const ExternalMarginal& external,
                                                 double tol = kDefaultTol) {
    if (external.support() != 2) throw ArityError("binary-Y bounds need exactly two levels of Y");
    if (external.delta_x != 0.0) {
        throw DomainError("binary-Y bounds assume delta_x = 0; use the shifted bounds instead");
    }
    return detail::merged_bounds(target, external, tol);
}

/// Y with N + 1 levels, equal treatment mechanisms.
[[nodiscard]] inline BoundResult theorem2_bounds(const TargetMarginal& target,
                                                 const ExternalMarginal& external,
                                                 double tol = kDefaultTol) {
    if (external.support() < 2) throw ArityError("Y must take at least two values");
    if (external.delta_x != 0.0) {
        throw DomainError("multi-valued-Y bounds assume delta_x = 0; use the shifted bounds instead");
    }
    return detail::merged_bounds(target, external, tol);
}

/// Y with N + 1 levels, external treatment prevalence p_x + delta_x.
[[nodiscard]] inline BoundResult theorem3_bounds(const TargetMarginal& target,
                                                 const ExternalMarginal& external,
                                                 double tol = kDefaultTol) {
    if (external.support() < 2) throw ArityError("Y must take at least two values");
    return detail::merged_bounds(target, external, tol);
}

/// Observed covariate C confounding X in the external dataset. Each stratum is
/// bounded with its own shift delta_x_c and the results are weighted by P(C).
[[nodiscard]] inline StratifiedBoundResult theorem6_bounds(const StratifiedInput& input,
                                                           double tol = kDefaultTol) {
    validate(input, tol);
    if (input.p_y.size() < 2) throw ArityError("Y must take at least two values");

    StratifiedBoundResult out;
    out.aggregate.lower = 0.0;
    out.aggregate.upper = 0.0;
    out.aggregate.phi.assign(input.p_y.size(), 0.0);
    out.aggregate.theta.assign(input.p_y.size(), 0.0);
    for (std::size_t c = 0; c < input.strata.size(); ++c) {
        const double w = input.strata[c].p_c;
        BoundResult s = detail::merged_bounds(input.target(c), input.external(c), tol,
                                              "stratum " + std::to_string(c) + ": ");
        out.aggregate.lower += w * s.lower;
        out.aggregate.upper += w * s.upper;
        for (std::size_t i = 0; i < input.p_y.size(); ++i) {
            out.aggregate.phi[i] += w * s.phi[i];
            out.aggregate.theta[i] += w * s.theta[i];
        }
        out.per_stratum.push_back(std::move(s));
    }
    return out;
}

}  // namespace pnsbound
