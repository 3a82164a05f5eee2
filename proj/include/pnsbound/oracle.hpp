// SPDX-License-Identifier: Apache-2.0
//
// Brute-force verifier for the merged bounds. It never touches the closed
// forms: it walks the coherence box of free parameters, solves each grid
// point into a full table P(Z | X, Y), and evaluates the joint-table bound
// objectives
//
//   Delta(f) = sum_y P(y) max{0, P(Z=1|X=1,y) - P(Z=1|X=0,y)}
//   Gamma(f) = sum_y P(y) max{0, P(Z=1|X=1,y) - P(Z=0|X=0,y)}
//
// giving lower = min Delta and upper = p11 - min Gamma.
//
// Both objectives are convex and piecewise linear. Every kink is either
// axis-aligned (a hinge of the term for Y = i >= 1) or a level set of the
// weighted sum S (the Y = 0 hinge and the two sum constraints). The per-axis
// grid therefore always contains the box endpoints and the axis hinges, and an
// extra pass solves one coordinate onto each S level set, which puts every
// vertex of the piecewise-linear arrangement on the search set.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

#include "pnsbound/classic_bounds.hpp"
#include "pnsbound/constraint_system.hpp"
#include "pnsbound/core.hpp"

namespace pnsbound {

/// Upper limit on grid_points_per_dim ^ N.
inline constexpr double kGridBudget = 1e8;

/// Default grid resolution for N free parameters.
[[nodiscard]] inline std::size_t default_grid(std::size_t n_free) {
    switch (n_free) {
        case 0:
        case 1: return 2001;
        case 2: return 301;
        case 3: return 101;
        case 4: return 41;
        case 5: return 21;
        default: return 15;
    }
}

/// Contrasts of the solved table, before max{0, .} and before P(y) weighting.
struct TermVectors {
    std::vector<double> delta_terms;  ///< P(Z=1|X=1,y) - P(Z=1|X=0,y)
    std::vector<double> gamma_terms;  ///< P(Z=1|X=1,y) - P(Z=0|X=0,y)
};

[[nodiscard]] inline TermVectors gamma_delta_terms(const TargetMarginal& target,
                                                   const ExternalMarginal& external,
                                                   const FreeParameterAssignment& assignment,
                                                   double tol = kDefaultTol) {
    const ConditionalTable t = solve_system(target, external, assignment, BoxCheck::enforce, tol);
    TermVectors out;
    for (std::size_t y = 0; y < t.support(); ++y) {
        out.delta_terms.push_back(t.given_x1[y] - t.given_x0[y]);
        out.gamma_terms.push_back(t.given_x1[y] - (1.0 - t.given_x0[y]));
    }
    return out;
}

/// Delta and Gamma at an assignment.
[[nodiscard]] inline HingeSums objectives_at(const TargetMarginal& target,
                                             const ExternalMarginal& external,
                                             const FreeParameterAssignment& assignment,
                                             double tol = kDefaultTol) {
    return hinge_sums(solve_system(target, external, assignment, BoxCheck::enforce, tol),
                      external.p_y);
}

struct OracleResult {
    double lower = 0.0;  ///< min Delta over the feasible grid
    double upper = 1.0;  ///< p11 - min Gamma over the feasible grid
    FreeParameterAssignment argmin_delta;
    FreeParameterAssignment argmin_gamma;
    std::size_t grid_points_per_dim = 0;
    double slack_lower = 0.0;  ///< Lipschitz bound on the grid error of lower
    double slack_upper = 0.0;  ///< Lipschitz bound on the grid error of upper
};

struct StratifiedOracleResult {
    std::vector<OracleResult> per_stratum;
    double lower = 0.0;
    double upper = 1.0;
    double slack_lower = 0.0;
    double slack_upper = 0.0;
};

namespace detail {

/// Affine function sampled at 0 and 1; root if the slope is nonzero.
template <typename F>
bool affine_root(F&& f, double& root) {
    const double a = f(0.0);
    const double slope = f(1.0) - a;
    if (std::abs(slope) < 1e-14) return false;
    root = -a / slope;
    return std::isfinite(root);
}

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> point;

    void offer(double v, const std::vector<double>& p) {
        if (v < value) {
            value = v;
            point = p;
        }
    }
    void merge(const Candidate& later) {
        if (later.value < value) *this = later;
    }
};

/// Precomputed search problem for one (target, external) pair.
class GridSearch {
public:
    GridSearch(const TargetMarginal& target, const ExternalMarginal& external,
               const FreeParameterBox& box, std::size_t grid, double tol)
        : target_(target), external_(external), box_(box), tol_(tol),
          q_(target.p_x + external.delta_x), n_(box.dimension()) {
        axes_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) build_axis(i, grid);
        collect_sum_levels();
    }

    /// Full-grid pass, split over the first axis. Chunks are merged in index
    /// order with strict improvement, so results match a serial scan.
    void scan_grid(unsigned threads, Candidate& best_delta, Candidate& best_gamma) const {
        const std::size_t first = axes_[0].values.size();
        std::size_t total = 1;
        for (const auto& a : axes_) total *= a.values.size();
        unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
        if (total < 50000) workers = 1;
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, first));

        std::vector<Candidate> deltas(workers);
        std::vector<Candidate> gammas(workers);
        auto run = [&](unsigned w) {
            const std::size_t begin = first * w / workers;
            const std::size_t end = first * (w + 1) / workers;
            scan_range(begin, end, deltas[w], gammas[w]);
        };
        if (workers == 1) {
            run(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
            for (auto& t : pool) t.join();
        }
        for (unsigned w = 0; w < workers; ++w) {
            best_delta.merge(deltas[w]);
            best_gamma.merge(gammas[w]);
        }
    }

    /// For each axis k and each S level set, solve coordinate k from the
    /// other coordinates' grid values.
    void scan_sum_levels(Candidate& best_delta, Candidate& best_gamma) const {
        std::vector<double> point(n_);
        std::vector<std::size_t> idx(n_, 0);
        for (std::size_t k = 0; k < n_; ++k) {
            const double wk = external_.p_y[k + 1];
            std::fill(idx.begin(), idx.end(), 0);
            for (;;) {
                double rest = 0.0;
                for (std::size_t j = 0; j < n_; ++j) {
                    if (j == k) continue;
                    point[j] = axes_[j].values[idx[j]];
                    rest += external_.p_y[j + 1] * point[j];
                }
                for (double level : sum_levels_) {
                    const double xk = (level - rest) / wk;
                    const Interval& iv = box_.per_param[k];
                    if (!iv.contains(xk, tol_)) continue;
                    point[k] = std::clamp(xk, iv.lo, std::max(iv.lo, iv.hi));
                    evaluate_point(point, best_delta, best_gamma);
                }
                if (!advance(idx, k)) break;
            }
        }
    }

private:
    struct Axis {
        std::vector<double> values;
        std::vector<double> weight;      // P(y) f
        std::vector<double> delta_term;  // P(y) max{0, delta contrast}
        std::vector<double> gamma_term;  // P(y) max{0, gamma contrast}
    };

    [[nodiscard]] double delta_contrast(std::size_t y, double treated) const {
        return treated - control_entry(external_.p_e1[y], q_, treated);
    }
    [[nodiscard]] double gamma_contrast(std::size_t y, double treated) const {
        return treated - (1.0 - control_entry(external_.p_e1[y], q_, treated));
    }
    [[nodiscard]] double baseline(double free_sum) const {
        return baseline_treated(target_.p11, free_sum, external_.p_y[0]);
    }

    void build_axis(std::size_t i, std::size_t grid) {
        const Interval iv = box_.per_param[i];
        const double lo = iv.lo;
        const double hi = std::max(iv.lo, iv.hi);
        std::vector<double> v;
        v.reserve(grid + 2);
        for (std::size_t k = 0; k < grid; ++k) {
            v.push_back(k + 1 == grid ? hi : lo + (hi - lo) * static_cast<double>(k) / (grid - 1));
        }
        const std::size_t y = i + 1;
        double root = 0.0;
        if (affine_root([&](double f) { return delta_contrast(y, f); }, root) && root > lo && root < hi) {
            v.push_back(root);
        }
        if (affine_root([&](double f) { return gamma_contrast(y, f); }, root) && root > lo && root < hi) {
            v.push_back(root);
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());

        Axis& a = axes_[i];
        a.values = v;
        const double w = external_.p_y[y];
        for (double f : v) {
            a.weight.push_back(w * f);
            a.delta_term.push_back(w * std::max(0.0, delta_contrast(y, f)));
            a.gamma_term.push_back(w * std::max(0.0, gamma_contrast(y, f)));
        }
    }

    void collect_sum_levels() {
        sum_levels_ = {box_.sum_interval.lo, box_.sum_interval.hi};
        double root = 0.0;
        if (affine_root([&](double s) { return delta_contrast(0, baseline(s)); }, root)) {
            sum_levels_.push_back(root);
        }
        if (affine_root([&](double s) { return gamma_contrast(0, baseline(s)); }, root)) {
            sum_levels_.push_back(root);
        }
    }

    [[nodiscard]] bool feasible_sum(double s) const { return box_.sum_interval.contains(s, tol_); }

    [[nodiscard]] double y0_delta(double s) const {
        return external_.p_y[0] * std::max(0.0, delta_contrast(0, baseline(s)));
    }
    [[nodiscard]] double y0_gamma(double s) const {
        return external_.p_y[0] * std::max(0.0, gamma_contrast(0, baseline(s)));
    }

    void evaluate_point(const std::vector<double>& point, Candidate& best_delta,
                        Candidate& best_gamma) const {
        double s = 0.0;
        double d = 0.0;
        double g = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t y = i + 1;
            const double w = external_.p_y[y];
            s += w * point[i];
            d += w * std::max(0.0, delta_contrast(y, point[i]));
            g += w * std::max(0.0, gamma_contrast(y, point[i]));
        }
        if (!feasible_sum(s)) return;
        best_delta.offer(d + y0_delta(s), point);
        best_gamma.offer(g + y0_gamma(s), point);
    }

    /// Odometer increment over all axes except `skip`; last axis fastest.
    [[nodiscard]] bool advance(std::vector<std::size_t>& idx, std::size_t skip) const {
        for (std::size_t j = n_; j-- > 0;) {
            if (j == skip) continue;
            if (++idx[j] < axes_[j].values.size()) return true;
            idx[j] = 0;
        }
        return false;
    }

    void scan_range(std::size_t begin, std::size_t end, Candidate& best_delta,
                    Candidate& best_gamma) const {
        std::vector<std::size_t> idx(n_, 0);
        std::vector<double> point(n_);
        for (std::size_t i0 = begin; i0 < end; ++i0) {
            std::fill(idx.begin(), idx.end(), 0);
            idx[0] = i0;
            for (;;) {
                double s = 0.0;
                double d = 0.0;
                double g = 0.0;
                for (std::size_t i = 0; i < n_; ++i) {
                    const Axis& a = axes_[i];
                    s += a.weight[idx[i]];
                    d += a.delta_term[idx[i]];
                    g += a.gamma_term[idx[i]];
                }
                if (feasible_sum(s)) {
                    d += y0_delta(s);
                    g += y0_gamma(s);
                    if (d < best_delta.value || g < best_gamma.value) {
                        for (std::size_t i = 0; i < n_; ++i) point[i] = axes_[i].values[idx[i]];
                        best_delta.offer(d, point);
                        best_gamma.offer(g, point);
                    }
                }
                if (!advance(idx, 0)) break;
            }
        }
    }

    TargetMarginal target_;
    ExternalMarginal external_;
    FreeParameterBox box_;
    double tol_;
    double q_;
    std::size_t n_;
    std::vector<Axis> axes_;
    std::vector<double> sum_levels_;
};

}  // namespace detail

/// Grid minimization of Delta and Gamma over the coherence box.
/// `grid_points_per_dim` of 0 selects default_grid(N); `threads` of 0 uses
/// all hardware threads.
[[nodiscard]] inline OracleResult oracle_bounds(const TargetMarginal& target,
                                                const ExternalMarginal& external,
                                                std::size_t grid_points_per_dim = 0,
                                                unsigned threads = 0, double tol = kDefaultTol) {
    validate(target, external, tol);
    const std::size_t support = external.support();
    if (support < 2) throw ArityError("Y must take at least two values");
    const std::size_t n = support - 1;
    const std::size_t grid = grid_points_per_dim == 0 ? default_grid(n) : grid_points_per_dim;
    if (grid < 2) throw DomainError("grid must have at least 2 points per dimension");
    if (std::pow(static_cast<double>(grid), static_cast<double>(n)) > kGridBudget) {
        throw BudgetError("grid of " + std::to_string(grid) + "^" + std::to_string(n) +
                          " points exceeds the budget of 1e8");
    }
    if (!compatibility_check(target, external, tol)) {
        throw InfeasibleError(
            "no table reproduces both marginals: compatibility identity violated");
    }
    FreeParameterBox box;
    try {
        box = parameter_box(target, external, tol);
    } catch (const EmptyBoxError& e) {
        throw InfeasibleError(std::string("coherence box is empty: ") + e.what());
    }

    const detail::GridSearch search(target, external, box, grid, tol);
    detail::Candidate best_delta;
    detail::Candidate best_gamma;
    search.scan_grid(threads, best_delta, best_gamma);
    search.scan_sum_levels(best_delta, best_gamma);
    if (best_delta.point.empty() || best_gamma.point.empty()) {
        throw InfeasibleError("no grid point satisfies the weighted-sum constraint");
    }

    const double q = target.p_x + external.delta_x;
    OracleResult out;
    out.lower = best_delta.value;
    out.upper = target.p11 - best_gamma.value;
    out.argmin_delta.values = best_delta.point;
    out.argmin_gamma.values = best_gamma.point;
    out.grid_points_per_dim = grid;
    for (std::size_t i = 0; i < n; ++i) {
        const double step = box.per_param[i].width() / static_cast<double>(grid - 1);
        const double w = external.p_y[i + 1];
        out.slack_lower += step * w / (1.0 - q);
        out.slack_upper += step * w * std::abs(1.0 - 2.0 * q) / (1.0 - q);
    }
    return out;
}

/// Per-stratum oracle, aggregated with weights P(C).
[[nodiscard]] inline StratifiedOracleResult oracle_bounds_stratified(
    const StratifiedInput& input, std::size_t grid_points_per_dim = 0, unsigned threads = 0,
    double tol = kDefaultTol) {
    validate(input, tol);
    StratifiedOracleResult out;
    out.upper = 0.0;
    for (std::size_t c = 0; c < input.strata.size(); ++c) {
        OracleResult r;
        try {
            r = oracle_bounds(input.target(c), input.external(c), grid_points_per_dim, threads, tol);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("stratum " + std::to_string(c) + ": " + e.what());
        }
        const double w = input.strata[c].p_c;
        out.lower += w * r.lower;
        out.upper += w * r.upper;
        out.slack_lower += w * r.slack_lower;
        out.slack_upper += w * r.slack_upper;
        out.per_stratum.push_back(std::move(r));
    }
    return out;
}

}  // namespace pnsbound
