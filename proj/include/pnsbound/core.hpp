// SPDX-License-Identifier: Apache-2.0
//
// Dataset summaries shared by every bound computation: the target marginal
// P^T(Z, X), the external marginal P^E(Z, Y), their per-stratum variants,
// full conditional tables, and the interval type returned by all bounds.
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pnsbound {

/// Absolute tolerance for probability sums and the compatibility identity.
inline constexpr double kDefaultTol = 1e-9;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violates a probability invariant.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Target and external marginals imply different P(Z = 1).
class IncompatibleError : public Error {
public:
    using Error::Error;
};

/// Support of Y does not fit the requested operation.
class ArityError : public Error {
public:
    using Error::Error;
};

/// A free-parameter assignment lies outside the coherence box.
class OutOfBoxError : public Error {
public:
    using Error::Error;
};

/// The coherence box is empty.
class EmptyBoxError : public Error {
public:
    using Error::Error;
};

/// Grid enumeration would exceed the evaluation budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// No grid point satisfies the oracle's feasibility constraints.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] bool contains(double v, double tol = 0.0) const {
        return v >= lo - tol && v <= hi + tol;
    }
    [[nodiscard]] bool contains(const Interval& other, double tol = 0.0) const {
        return other.lo >= lo - tol && other.hi <= hi + tol;
    }
};

/// Summary of P^T(Z, X).
struct TargetMarginal {
    double p_x = 0.5;  ///< P^T(X = 1)
    double p11 = 0.0;  ///< P^T(Z = 1 | X = 1)
    double p10 = 0.0;  ///< P^T(Z = 1 | X = 0)

    [[nodiscard]] double p00() const { return 1.0 - p10; }
};

/// Summary of P^E(Z, Y) for Y in {0, ..., N}.
struct ExternalMarginal {
    std::vector<double> p_y;   ///< P(Y = i)
    std::vector<double> p_e1;  ///< P^E(Z = 1 | Y = i)
    double delta_x = 0.0;      ///< P^E(X = 1) - P^T(X = 1)

    [[nodiscard]] std::size_t support() const { return p_y.size(); }
};

/// One level of the observed covariate C.
struct Stratum {
    double p_c = 1.0;           ///< P(C = c)
    double p11 = 0.0;           ///< P^T(Z = 1 | X = 1, C = c)
    double p10 = 0.0;           ///< P^T(Z = 1 | X = 0, C = c)
    std::vector<double> p_e1;   ///< P^E(Z = 1 | Y = i, C = c)
    double delta_x = 0.0;       ///< P^E(X = 1 | C = c) - P^T(X = 1)
};

struct StratifiedInput {
    double p_x = 0.5;
    std::vector<double> p_y;
    std::vector<Stratum> strata;

    [[nodiscard]] TargetMarginal target(std::size_t c) const {
        const auto& s = strata.at(c);
        return {p_x, s.p11, s.p10};
    }
    [[nodiscard]] ExternalMarginal external(std::size_t c) const {
        const auto& s = strata.at(c);
        return {p_y, s.p_e1, s.delta_x};
    }
};

/// P(Z = 1 | X = x, Y = y) for a single covariate level, indexed by y.
struct ConditionalTable {
    std::vector<double> given_x0;
    std::vector<double> given_x1;

    [[nodiscard]] std::size_t support() const { return given_x1.size(); }
    [[nodiscard]] double at(int x, std::size_t y) const {
        return x == 0 ? given_x0.at(y) : given_x1.at(y);
    }
};

/// P(C), P(Y) and P(Z = 1 | X, Y, C); X, Y and C mutually independent.
struct JointDistribution {
    std::vector<double> p_c;
    std::vector<double> p_y;
    std::vector<ConditionalTable> z1;  ///< indexed by c

    /// Conditional table with C marginalized out.
    [[nodiscard]] ConditionalTable marginal_table() const {
        ConditionalTable out{std::vector<double>(p_y.size(), 0.0),
                             std::vector<double>(p_y.size(), 0.0)};
        for (std::size_t c = 0; c < p_c.size(); ++c) {
            for (std::size_t y = 0; y < p_y.size(); ++y) {
                out.given_x0[y] += p_c[c] * z1[c].given_x0[y];
                out.given_x1[y] += p_c[c] * z1[c].given_x1[y];
            }
        }
        return out;
    }
};

/// PNS interval with the tightening terms that produced it.
struct BoundResult {
    double lower = 0.0;
    double upper = 1.0;
    std::vector<double> phi;
    std::vector<double> theta;

    [[nodiscard]] Interval interval() const { return {lower, upper}; }
    [[nodiscard]] double width() const { return upper - lower; }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline bool open_unit(double v) { return v > 0.0 && v < 1.0; }
inline bool closed_unit(double v) { return v >= 0.0 && v <= 1.0; }

inline std::string indexed(const char* name, std::size_t i) {
    return std::string(name) + "[" + std::to_string(i) + "]";
}

inline double sum(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

inline void validate_distribution(const std::vector<double>& p, const char* name, double tol) {
    if (p.empty()) throw DomainError(std::string(name) + " must not be empty");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0 && p[i] <= 1.0)) {
            throw DomainError(indexed(name, i) + " must lie in (0,1]");
        }
    }
    if (std::abs(sum(p) - 1.0) > tol) throw DomainError(std::string(name) + " must sum to 1");
}

inline void validate_conditionals(const std::vector<double>& p, const char* name) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!closed_unit(p[i])) throw DomainError(indexed(name, i) + " must lie in [0,1]");
    }
}

inline void validate_shift(double p_x, double delta, const char* name) {
    if (!std::isfinite(delta) || !open_unit(p_x + delta)) {
        throw DomainError(std::string("p_x + ") + name + " must lie strictly in (0,1)");
    }
}

}  // namespace detail

inline void validate(const TargetMarginal& target) {
    if (!detail::open_unit(target.p_x)) throw DomainError("p_x must lie strictly in (0,1)");
    if (!detail::closed_unit(target.p11)) throw DomainError("p11 must lie in [0,1]");
    if (!detail::closed_unit(target.p10)) throw DomainError("p10 must lie in [0,1]");
}

inline void validate(const ExternalMarginal& external, double tol = kDefaultTol) {
    detail::validate_distribution(external.p_y, "p_y", tol);
    if (external.p_e1.size() != external.p_y.size()) {
        throw DomainError("p_e1 must have the same length as p_y");
    }
    detail::validate_conditionals(external.p_e1, "p_e1");
    if (!std::isfinite(external.delta_x)) throw DomainError("delta_x must be finite");
}

/// Checks every invariant of the pair; returns it unchanged on success.
inline std::pair<TargetMarginal, ExternalMarginal> validate(const TargetMarginal& target,
                                                            const ExternalMarginal& external,
                                                            double tol = kDefaultTol) {
    validate(target);
    validate(external, tol);
    detail::validate_shift(target.p_x, external.delta_x, "delta_x");
    return {target, external};
}

inline void validate(const StratifiedInput& input, double tol = kDefaultTol) {
    if (!detail::open_unit(input.p_x)) throw DomainError("p_x must lie strictly in (0,1)");
    detail::validate_distribution(input.p_y, "p_y", tol);
    if (input.strata.empty()) throw DomainError("strata must not be empty");
    double total = 0.0;
    for (std::size_t c = 0; c < input.strata.size(); ++c) {
        const auto& s = input.strata[c];
        const std::string where = "stratum " + std::to_string(c) + ": ";
        if (!(s.p_c > 0.0 && s.p_c <= 1.0)) throw DomainError(where + "p_c must lie in (0,1]");
        if (!detail::closed_unit(s.p11)) throw DomainError(where + "p11 must lie in [0,1]");
        if (!detail::closed_unit(s.p10)) throw DomainError(where + "p10 must lie in [0,1]");
        if (s.p_e1.size() != input.p_y.size()) {
            throw DomainError(where + "p_e1 must have the same length as p_y");
        }
        try {
            detail::validate_conditionals(s.p_e1, "p_e1");
            detail::validate_shift(input.p_x, s.delta_x, "delta_x_c");
        } catch (const DomainError& e) {
            throw DomainError(where + e.what());
        }
        total += s.p_c;
    }
    if (std::abs(total - 1.0) > tol) throw DomainError("p_c must sum to 1");
}

inline void validate(const JointDistribution& joint, double tol = kDefaultTol) {
    detail::validate_distribution(joint.p_c, "p_c", tol);
    detail::validate_distribution(joint.p_y, "p_y", tol);
    if (joint.z1.size() != joint.p_c.size()) {
        throw DomainError("p_z1 must have one table per level of C");
    }
    for (const auto& table : joint.z1) {
        if (table.given_x0.size() != joint.p_y.size() || table.given_x1.size() != joint.p_y.size()) {
            throw DomainError("p_z1 tables must have one entry per level of Y");
        }
        detail::validate_conditionals(table.given_x0, "p_z1");
        detail::validate_conditionals(table.given_x1, "p_z1");
    }
}

// ---------------------------------------------------------------------------
// Compatibility identity
// ---------------------------------------------------------------------------

/// Signed gap between the P(Z = 1) implied by each marginal.
inline double compatibility_gap(const TargetMarginal& target, const ExternalMarginal& external) {
    const double shifted = target.p_x + external.delta_x;
    const double from_target = target.p11 * shifted + target.p10 * (1.0 - shifted);
    double from_external = 0.0;
    for (std::size_t i = 0; i < external.p_y.size(); ++i) {
        from_external += external.p_e1[i] * external.p_y[i];
    }
    return from_target - from_external;
}

inline bool compatibility_check(const TargetMarginal& target, const ExternalMarginal& external,
                                double tol = kDefaultTol) {
    return std::abs(compatibility_gap(target, external)) <= tol;
}

/// Throws IncompatibleError naming the identity when the check fails.
inline void require_compatible(const TargetMarginal& target, const ExternalMarginal& external,
                               double tol = kDefaultTol, const std::string& where = {}) {
    const double gap = compatibility_gap(target, external);
    if (std::abs(gap) > tol) {
        std::ostringstream msg;
        msg << where
            << "compatibility identity violated: p11*(p_x+delta_x) + p10*(1-p_x-delta_x)"
               " differs from sum_i p_e1[i]*p_y[i] by "
            << gap;
        throw IncompatibleError(msg.str());
    }
}

}  // namespace pnsbound
