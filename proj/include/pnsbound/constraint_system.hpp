// SPDX-License-Identifier: Apache-2.0
//
// The set of joint tables P(Z | X, Y) consistent with a target marginal and
// an external marginal. The tables are parameterized by the free parameters
// f_i = P(Z = 1 | X = 1, Y = i), i = 1..N; every other entry is solved from
// the marginal constraints:
//
//   P(Z=1 | X=1, Y=0) = (p11 - S) / p_y0,            S = sum_{n>=1} p_yn f_n
//   P(Z=1 | X=0, Y=i) = (p_e1[i] - q f_i) / (1 - q), i >= 1
//   P(Z=1 | X=0, Y=0) = (p_e1[0] - q P(Z=1|X=1,Y=0)) / (1 - q)
//
// where q = p_x + delta_x is the external treatment prevalence.
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "pnsbound/core.hpp"

namespace pnsbound {

/// Region of free-parameter values that yields a coherent table.
struct FreeParameterBox {
    std::vector<Interval> per_param;  ///< bounds on f_1..f_N
    Interval sum_interval;            ///< bounds on sum_{n>=1} p_yn f_n

    [[nodiscard]] std::size_t dimension() const { return per_param.size(); }
};

/// Values of f_1..f_N.
struct FreeParameterAssignment {
    std::vector<double> values;
};

enum class BoxCheck { enforce, skip };

namespace detail {

inline double weighted_free_sum(const std::vector<double>& p_y, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t n = 1; n < p_y.size(); ++n) s += p_y[n] * f[n - 1];
    return s;
}

/// P(Z=1 | X=1, Y=0) from the weighted free-parameter sum S.
inline double baseline_treated(double p11, double free_sum, double py0) {
    return (p11 - free_sum) / py0;
}

/// P(Z=1 | X=0, Y=i) from the external conditional and P(Z=1 | X=1, Y=i).
inline double control_entry(double pe, double q, double treated) {
    return (pe - q * treated) / (1.0 - q);
}

inline void require_free_parameters(std::size_t support) {
    if (support < 2) {
        throw ArityError("Y must take at least two values; a constant Y leaves no free parameter");
    }
}

}  // namespace detail

[[nodiscard]] inline FreeParameterBox parameter_box(const TargetMarginal& target,
                                                    const ExternalMarginal& external,
                                                    double tol = kDefaultTol) {
    validate(target, external, tol);
    detail::require_free_parameters(external.support());

    const double q = target.p_x + external.delta_x;
    const double py0 = external.p_y[0];
    const double pe0 = external.p_e1[0];
    const double p11 = target.p11;

    FreeParameterBox box;
    double reachable_lo = 0.0;
    double reachable_hi = 0.0;
    for (std::size_t i = 1; i < external.support(); ++i) {
        const double pe = external.p_e1[i];
        const Interval iv{std::max(0.0, (pe - (1.0 - q)) / q), std::min(1.0, pe / q)};
        if (iv.lo > iv.hi + tol) {
            throw EmptyBoxError("free parameter " + std::to_string(i) + " has an empty interval");
        }
        box.per_param.push_back(iv);
        reachable_lo += external.p_y[i] * iv.lo;
        reachable_hi += external.p_y[i] * iv.hi;
    }
    box.sum_interval.lo = std::max((p11 * q - pe0 * py0) / q, p11 - py0);
    box.sum_interval.hi = std::min(((1.0 - q) * py0 + p11 * q - pe0 * py0) / q, p11);
    if (box.sum_interval.lo > box.sum_interval.hi + tol ||
        std::max(box.sum_interval.lo, reachable_lo) > std::min(box.sum_interval.hi, reachable_hi) + tol) {
        throw EmptyBoxError("weighted sum of free parameters has no feasible value");
    }
    return box;
}

[[nodiscard]] inline FreeParameterBox stratified_parameter_box(const StratifiedInput& input,
                                                               std::size_t c,
                                                               double tol = kDefaultTol) {
    validate(input, tol);
    if (c >= input.strata.size()) throw DomainError("stratum index out of range");
    try {
        return parameter_box(input.target(c), input.external(c), tol);
    } catch (const EmptyBoxError& e) {
        throw EmptyBoxError("stratum " + std::to_string(c) + ": " + e.what());
    }
}

/// True when every value lies in its interval and the weighted sum lies in
/// the sum interval, all closed with tolerance `tol`.
[[nodiscard]] inline bool in_box(const FreeParameterBox& box, const std::vector<double>& p_y,
                                 const FreeParameterAssignment& a, double tol = kDefaultTol) {
    if (a.values.size() != box.dimension()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (!box.per_param[i].contains(a.values[i], tol)) return false;
    }
    return box.sum_interval.contains(detail::weighted_free_sum(p_y, a.values), tol);
}

/// Full table P(Z = 1 | X, Y) implied by the assignment.
[[nodiscard]] inline ConditionalTable solve_system(const TargetMarginal& target,
                                                   const ExternalMarginal& external,
                                                   const FreeParameterAssignment& assignment,
                                                   BoxCheck check = BoxCheck::enforce,
                                                   double tol = kDefaultTol) {
    const std::size_t support = external.support();
    detail::require_free_parameters(support);
    if (assignment.values.size() != support - 1) {
        throw ArityError("assignment must hold one value per free parameter");
    }
    if (check == BoxCheck::enforce) {
        require_compatible(target, external, tol);
        const FreeParameterBox box = parameter_box(target, external, tol);
        if (!in_box(box, external.p_y, assignment, tol)) {
            throw OutOfBoxError("free-parameter assignment lies outside the coherence box");
        }
    }

    const double q = target.p_x + external.delta_x;
    const auto& f = assignment.values;
    ConditionalTable table{std::vector<double>(support), std::vector<double>(support)};
    const double s = detail::weighted_free_sum(external.p_y, f);
    table.given_x1[0] = detail::baseline_treated(target.p11, s, external.p_y[0]);
    table.given_x0[0] = detail::control_entry(external.p_e1[0], q, table.given_x1[0]);
    for (std::size_t i = 1; i < support; ++i) {
        table.given_x1[i] = f[i - 1];
        table.given_x0[i] = detail::control_entry(external.p_e1[i], q, f[i - 1]);
    }
    return table;
}

/// Target and external marginals implied by a table, the inverse of
/// solve_system. The external marginal uses treatment prevalence p_x + delta_x.
[[nodiscard]] inline std::pair<TargetMarginal, ExternalMarginal> marginals_of(
    const ConditionalTable& table, const std::vector<double>& p_y, double p_x,
    double delta_x = 0.0) {
    TargetMarginal target{p_x, 0.0, 0.0};
    ExternalMarginal external{p_y, std::vector<double>(p_y.size()), delta_x};
    const double q = p_x + delta_x;
    for (std::size_t y = 0; y < p_y.size(); ++y) {
        target.p11 += p_y[y] * table.given_x1[y];
        target.p10 += p_y[y] * table.given_x0[y];
        external.p_e1[y] = q * table.given_x1[y] + (1.0 - q) * table.given_x0[y];
    }
    return {target, external};
}

}  // namespace pnsbound
