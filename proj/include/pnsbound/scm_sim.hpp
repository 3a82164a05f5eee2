// SPDX-License-Identifier: Apache-2.0
//
// Ground truth for the bound computations. A response-function SCM draws a
// deterministic map r: (X, Y, C) -> Z independently of the exogenous X, Y and
// C, which makes every counterfactual computable by enumeration. From one SCM
// we derive the target marginal, the external marginal (optionally with a
// shifted treatment mechanism), the stratified input and the full joint.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pnsbound/classic_bounds.hpp"
#include "pnsbound/core.hpp"
#include "pnsbound/merge_bounds.hpp"
#include "pnsbound/oracle.hpp"

namespace pnsbound {

/// Largest truth table we enumerate: 2 * |Y| * |C| input cells.
inline constexpr std::size_t kMaxResponseCells = 18;

/// Response types are truth tables; bit ((c * |Y| + y) * 2 + x) of the code
/// holds r(x, y, c).
struct ResponseFunctionSCM {
    double p_x = 0.5;
    std::vector<double> p_y;
    std::vector<double> p_c{1.0};
    std::vector<double> response_dist;  ///< one weight per code in [0, 2^(2|Y||C|))
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t cells() const { return 2 * p_y.size() * p_c.size(); }
    [[nodiscard]] std::size_t response_types() const { return std::size_t{1} << cells(); }
};

[[nodiscard]] inline std::size_t response_bit(std::size_t n_y, int x, std::size_t y, std::size_t c) {
    return (c * n_y + y) * 2 + static_cast<std::size_t>(x);
}

[[nodiscard]] inline bool response_value(std::size_t code, std::size_t n_y, int x, std::size_t y,
                                         std::size_t c) {
    return ((code >> response_bit(n_y, x, y, c)) & 1u) != 0;
}

/// Code of the response type z = f(x, y, c).
[[nodiscard]] inline std::size_t encode_response(
    std::size_t n_y, std::size_t n_c, const std::function<bool(int, std::size_t, std::size_t)>& f) {
    std::size_t code = 0;
    for (std::size_t c = 0; c < n_c; ++c) {
        for (std::size_t y = 0; y < n_y; ++y) {
            for (int x = 0; x < 2; ++x) {
                if (f(x, y, c)) code |= std::size_t{1} << response_bit(n_y, x, y, c);
            }
        }
    }
    return code;
}

/// SCM with all response mass on the given codes.
[[nodiscard]] inline ResponseFunctionSCM make_scm(double p_x, std::vector<double> p_y,
                                                  std::vector<double> p_c,
                                                  const std::vector<std::pair<std::size_t, double>>& types) {
    ResponseFunctionSCM scm{p_x, std::move(p_y), std::move(p_c), {}, 0};
    if (scm.cells() > kMaxResponseCells) throw DomainError("response table too large to enumerate");
    scm.response_dist.assign(scm.response_types(), 0.0);
    for (const auto& [code, w] : types) scm.response_dist.at(code) += w;
    return scm;
}

inline void validate(const ResponseFunctionSCM& scm, double tol = kDefaultTol) {
    if (!(scm.p_x > 0.0 && scm.p_x < 1.0)) throw DomainError("p_x must lie strictly in (0,1)");
    detail::validate_distribution(scm.p_y, "p_y", tol);
    detail::validate_distribution(scm.p_c, "p_c", tol);
    if (scm.cells() > kMaxResponseCells) throw DomainError("response table too large to enumerate");
    if (scm.response_dist.size() != scm.response_types()) {
        throw DomainError("response_dist must hold one weight per response type");
    }
    for (double w : scm.response_dist) {
        if (!(w >= 0.0)) throw DomainError("response_dist entries must be nonnegative");
    }
    if (std::abs(detail::sum(scm.response_dist) - 1.0) > tol) {
        throw DomainError("response_dist must sum to 1");
    }
}

/// P(Z_{x=1} = 1, Z_{x=0} = 0), by enumeration over response types, Y and C.
[[nodiscard]] inline double true_pns(const ResponseFunctionSCM& scm) {
    validate(scm);
    const std::size_t n_y = scm.p_y.size();
    double pns = 0.0;
    for (std::size_t code = 0; code < scm.response_dist.size(); ++code) {
        const double w = scm.response_dist[code];
        if (w == 0.0) continue;
        for (std::size_t c = 0; c < scm.p_c.size(); ++c) {
            for (std::size_t y = 0; y < n_y; ++y) {
                if (response_value(code, n_y, 1, y, c) && !response_value(code, n_y, 0, y, c)) {
                    pns += w * scm.p_c[c] * scm.p_y[y];
                }
            }
        }
    }
    return pns;
}

/// P(Z = 1 | X, Y, C) implied by the SCM.
[[nodiscard]] inline JointDistribution joint_of(const ResponseFunctionSCM& scm) {
    validate(scm);
    const std::size_t n_y = scm.p_y.size();
    JointDistribution joint{scm.p_c, scm.p_y, {}};
    joint.z1.assign(scm.p_c.size(),
                    ConditionalTable{std::vector<double>(n_y, 0.0), std::vector<double>(n_y, 0.0)});
    for (std::size_t code = 0; code < scm.response_dist.size(); ++code) {
        const double w = scm.response_dist[code];
        if (w == 0.0) continue;
        for (std::size_t c = 0; c < scm.p_c.size(); ++c) {
            for (std::size_t y = 0; y < n_y; ++y) {
                if (response_value(code, n_y, 0, y, c)) joint.z1[c].given_x0[y] += w;
                if (response_value(code, n_y, 1, y, c)) joint.z1[c].given_x1[y] += w;
            }
        }
    }
    for (auto& t : joint.z1) {
        for (auto* row : {&t.given_x0, &t.given_x1}) {
            for (double& v : *row) v = std::clamp(v, 0.0, 1.0);
        }
    }
    return joint;
}

struct MarginalizeOptions {
    double delta_x = 0.0;             ///< shift for the C-marginal external dataset
    std::vector<double> delta_x_c;    ///< per-stratum shifts; empty means delta_x everywhere
};

struct Marginals {
    TargetMarginal target;
    ExternalMarginal external;
    StratifiedInput stratified;
    JointDistribution joint;
};

/// Target, external and stratified summaries of an explicit joint in which X
/// has prevalence p_x in the target and p_x + delta in the external dataset.
[[nodiscard]] inline Marginals marginalize(const JointDistribution& joint, double p_x,
                                           const MarginalizeOptions& options = {}) {
    validate(joint);
    if (!(p_x > 0.0 && p_x < 1.0)) throw DomainError("p_x must lie strictly in (0,1)");
    const std::size_t n_c = joint.p_c.size();
    const std::size_t n_y = joint.p_y.size();
    std::vector<double> shifts = options.delta_x_c;
    if (shifts.empty()) shifts.assign(n_c, options.delta_x);
    if (shifts.size() != n_c) throw DomainError("delta_x_c must hold one shift per level of C");
    detail::validate_shift(p_x, options.delta_x, "delta_x");
    for (double d : shifts) detail::validate_shift(p_x, d, "delta_x_c");

    Marginals out;
    out.joint = joint;
    out.target = {p_x, 0.0, 0.0};
    out.external = {joint.p_y, std::vector<double>(n_y, 0.0), options.delta_x};
    out.stratified.p_x = p_x;
    out.stratified.p_y = joint.p_y;
    const double q = p_x + options.delta_x;
    for (std::size_t c = 0; c < n_c; ++c) {
        const ConditionalTable& t = joint.z1[c];
        const double qc = p_x + shifts[c];
        Stratum s{joint.p_c[c], 0.0, 0.0, std::vector<double>(n_y, 0.0), shifts[c]};
        for (std::size_t y = 0; y < n_y; ++y) {
            s.p11 += joint.p_y[y] * t.given_x1[y];
            s.p10 += joint.p_y[y] * t.given_x0[y];
            s.p_e1[y] = qc * t.given_x1[y] + (1.0 - qc) * t.given_x0[y];
            out.external.p_e1[y] += joint.p_c[c] * (q * t.given_x1[y] + (1.0 - q) * t.given_x0[y]);
        }
        s.p11 = std::clamp(s.p11, 0.0, 1.0);
        s.p10 = std::clamp(s.p10, 0.0, 1.0);
        for (double& v : s.p_e1) v = std::clamp(v, 0.0, 1.0);
        out.target.p11 += joint.p_c[c] * s.p11;
        out.target.p10 += joint.p_c[c] * s.p10;
        out.stratified.strata.push_back(std::move(s));
    }
    out.target.p11 = std::clamp(out.target.p11, 0.0, 1.0);
    out.target.p10 = std::clamp(out.target.p10, 0.0, 1.0);
    for (double& v : out.external.p_e1) v = std::clamp(v, 0.0, 1.0);
    return out;
}

[[nodiscard]] inline Marginals marginalize(const ResponseFunctionSCM& scm,
                                           const MarginalizeOptions& options = {}) {
    return marginalize(joint_of(scm), scm.p_x, options);
}

// ---------------------------------------------------------------------------
// Random SCMs
// ---------------------------------------------------------------------------

namespace detail {

/// Flat Dirichlet draw, redrawn while any entry is below `floor`.
inline std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t k, double floor) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> out(k);
    for (;;) {
        double total = 0.0;
        for (double& v : out) total += (v = gamma(rng));
        for (double& v : out) v /= total;
        if (*std::min_element(out.begin(), out.end()) >= floor) return out;
    }
}

}  // namespace detail

/// Random SCM: p_x ~ U(0.05, 0.95), P(Y) and P(C) flat Dirichlet, response
/// mass flat Dirichlet over 1..8 distinct response types drawn uniformly.
[[nodiscard]] inline ResponseFunctionSCM random_scm(std::uint64_t seed, std::size_t n_y,
                                                    std::size_t n_c) {
    if (n_y < 1 || n_c < 1) throw DomainError("supports of Y and C must be nonempty");
    if (2 * n_y * n_c > kMaxResponseCells) throw DomainError("response table too large to enumerate");
    std::mt19937_64 rng(seed);
    ResponseFunctionSCM scm;
    scm.seed = seed;
    scm.p_x = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    scm.p_y = detail::dirichlet(rng, n_y, 1e-3);
    scm.p_c = detail::dirichlet(rng, n_c, 1e-3);
    scm.response_dist.assign(scm.response_types(), 0.0);

    const std::size_t max_types = std::min<std::size_t>(8, scm.response_types());
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_types)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, scm.response_types() - 1);
    std::set<std::size_t> codes;
    while (codes.size() < k) codes.insert(pick(rng));
    const std::vector<double> w = detail::dirichlet(rng, k, 0.0);
    std::size_t j = 0;
    for (std::size_t code : codes) scm.response_dist[code] = w[j++];
    return scm;
}

// ---------------------------------------------------------------------------
// Coverage trials
// ---------------------------------------------------------------------------

enum class DeltaPolicy { zero, random };

struct CoverageOptions {
    std::uint64_t seed = 0;
    std::size_t trials = 1000;
    std::size_t support_y = 2;
    std::size_t support_c = 1;
    DeltaPolicy delta_policy = DeltaPolicy::zero;
    std::size_t grid = 0;   ///< oracle grid; 0 selects default_grid(N)
    unsigned threads = 0;   ///< 0 uses all hardware threads
    double tol = kDefaultTol;
};

struct CoverageReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double mean_width_merged = 0.0;
    double mean_width_tian_pearl = 0.0;
    std::map<std::string, std::size_t> violations_by_check;
    std::vector<std::string> first_failures;  ///< up to 10 "trial <i>: <check>" lines
};

namespace detail {

struct TrialOutcome {
    double width_merged = 0.0;
    double width_tian_pearl = 0.0;
    std::vector<std::string> failed;
};

inline TrialOutcome run_trial(const CoverageOptions& options, std::size_t index) {
    TrialOutcome out;
    const std::uint64_t seed = options.seed + index;
    const double tol = options.tol;
    try {
        const ResponseFunctionSCM scm = random_scm(seed, options.support_y, options.support_c);
        const double pns = true_pns(scm);

        MarginalizeOptions shifted;
        if (options.delta_policy == DeltaPolicy::random) {
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
            std::uniform_real_distribution<double> prevalence(0.05, 0.95);
            shifted.delta_x = prevalence(rng) - scm.p_x;
            for (std::size_t c = 0; c < options.support_c; ++c) {
                shifted.delta_x_c.push_back(prevalence(rng) - scm.p_x);
            }
        }
        const Marginals plain = marginalize(scm);
        const Marginals moved = marginalize(scm, shifted);

        auto check = [&](bool ok, const char* name) {
            if (!ok) out.failed.emplace_back(name);
        };
        auto covers = [&](const BoundResult& b) { return b.interval().contains(pns, tol); };

        const BoundResult tp = tian_pearl_bounds(plain.target);
        const BoundResult t2 = theorem2_bounds(plain.target, plain.external, tol);
        const BoundResult t3 = theorem3_bounds(moved.target, moved.external, tol);
        const BoundResult t6 = theorem6_bounds(moved.stratified, tol).aggregate;
        const BoundResult t4 = joint_covariate_bounds(plain.joint).bounds;
        const BoundResult cov = covariate_only_bounds(plain.joint);
        const OracleResult orc = oracle_bounds(plain.target, plain.external, options.grid, 1, tol);

        check(covers(tp), "pns in tian-pearl");
        if (options.support_y == 2) {
            check(covers(theorem1_bounds(plain.target, plain.external, tol)), "pns in theorem1");
        }
        check(covers(t2), "pns in theorem2");
        check(covers(t3), "pns in theorem3");
        check(covers(t6), "pns in theorem6");
        check(covers(t4), "pns in theorem4");
        check(pns >= orc.lower - orc.slack_lower - tol && pns <= orc.upper + orc.slack_upper + tol,
              "pns in oracle");
        check(tp.interval().contains(t2.interval(), tol), "theorem2 within tian-pearl");
        check(tp.interval().contains(t3.interval(), tol), "theorem3 within tian-pearl");
        check(t2.interval().contains(t4.interval(), tol), "theorem4 within theorem2");
        check(t3.interval().contains(t4.interval(), tol), "theorem4 within theorem3");
        check(t6.interval().contains(t4.interval(), tol), "theorem4 within theorem6");
        check(cov.interval().contains(t4.interval(), tol), "theorem4 within covariate-only");

        out.width_merged = t3.width();
        out.width_tian_pearl = tp.width();
    } catch (const std::exception& e) {
        out.failed.emplace_back(std::string("exception: ") + e.what());
    }
    return out;
}

}  // namespace detail

/// Runs `trials` independent SCMs with seeds seed, seed + 1, ...; the report
/// does not depend on the thread count.
[[nodiscard]] inline CoverageReport coverage_trial(const CoverageOptions& options) {
    CoverageReport report;
    report.trials = options.trials;
    if (options.trials == 0) return report;

    std::vector<detail::TrialOutcome> outcomes(options.trials);
    unsigned workers = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, options.trials));
    auto run = [&](unsigned w) {
        for (std::size_t i = w; i < options.trials; i += workers) {
            outcomes[i] = detail::run_trial(options, i);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    double merged = 0.0;
    double baseline = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        merged += o.width_merged;
        baseline += o.width_tian_pearl;
        if (!o.failed.empty()) ++report.violations;
        for (const auto& name : o.failed) {
            ++report.violations_by_check[name];
            if (report.first_failures.size() < 10) {
                report.first_failures.push_back("trial " + std::to_string(i) + ": " + name);
            }
        }
    }
    report.mean_width_merged = merged / static_cast<double>(options.trials);
    report.mean_width_tian_pearl = baseline / static_cast<double>(options.trials);
    return report;
}

}  // namespace pnsbound
