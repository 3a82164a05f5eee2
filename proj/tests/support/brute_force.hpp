// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference for the merged bounds. Independent of the library's
// constraint system: it parameterizes the joint by the control-arm entries
// g_i = P(Z=1 | X=0, Y=i), i >= 1, solves the rest directly from the marginal
// equations, keeps only coherent tables, and evaluates the joint-table bound
// objectives by hand.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace pnsbound::reference {

struct BruteForceBounds {
    double lower = std::numeric_limits<double>::infinity();   // min Delta
    double upper = -std::numeric_limits<double>::infinity();  // p11 - min Gamma
    std::size_t coherent_points = 0;
};

/// Dense uniform grid of `steps` + 1 points per control-arm parameter. The
/// last parameter additionally takes every value at which one of the
/// constraints on P(Z=1|X=1,Y=N) or on row Y = 0 becomes active, so thin
/// feasible sets are still sampled.
inline BruteForceBounds brute_force_bounds(double p_x, double p11, double p10,
                                           const std::vector<double>& p_y,
                                           const std::vector<double>& p_e1, double delta_x,
                                           std::size_t steps) {
    const double q = p_x + delta_x;
    const std::size_t n = p_y.size() - 1;
    const double eps = 1e-12;
    double min_delta = std::numeric_limits<double>::infinity();
    double min_gamma = std::numeric_limits<double>::infinity();
    BruteForceBounds out;

    std::vector<double> treated(n + 1), control(n + 1);
    auto evaluate = [&] {
        double rest = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            treated[i] = (p_e1[i] - (1.0 - q) * control[i]) / q;
            rest += p_y[i] * control[i];
        }
        control[0] = (p10 - rest) / p_y[0];
        treated[0] = (p_e1[0] - (1.0 - q) * control[0]) / q;

        bool coherent = true;
        double implied_p11 = 0.0;
        for (std::size_t y = 0; y <= n; ++y) {
            coherent = coherent && treated[y] >= -eps && treated[y] <= 1 + eps && control[y] >= -eps &&
                       control[y] <= 1 + eps;
            implied_p11 += p_y[y] * treated[y];
        }
        coherent = coherent && std::abs(implied_p11 - p11) < 1e-9;
        if (!coherent) return;
        double delta = 0.0;
        double gamma = 0.0;
        for (std::size_t y = 0; y <= n; ++y) {
            delta += p_y[y] * std::max(0.0, treated[y] - control[y]);
            gamma += p_y[y] * std::max(0.0, treated[y] - (1.0 - control[y]));
        }
        min_delta = std::min(min_delta, delta);
        min_gamma = std::min(min_gamma, gamma);
        ++out.coherent_points;
    };

    // Values of control[0] at which a row-0 entry reaches 0 or 1.
    const double row0[4] = {0.0, 1.0, (p_e1[0] - q) / (1.0 - q), p_e1[0] / (1.0 - q)};

    std::vector<std::size_t> idx(n - 1, 0);
    std::vector<double> last;
    for (;;) {
        double outer = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            control[i] = static_cast<double>(idx[i - 1]) / static_cast<double>(steps);
            outer += p_y[i] * control[i];
        }
        last.clear();
        for (std::size_t k = 0; k <= steps; ++k) last.push_back(static_cast<double>(k) / static_cast<double>(steps));
        last.push_back((p_e1[n] - q) / (1.0 - q));
        last.push_back(p_e1[n] / (1.0 - q));
        for (double c0 : row0) last.push_back((p10 - p_y[0] * c0 - outer) / p_y[n]);
        for (double v : last) {
            if (v < -eps || v > 1.0 + eps) continue;
            control[n] = std::clamp(v, 0.0, 1.0);
            evaluate();
        }

        std::size_t j = n - 1;
        while (j > 0) {
            if (++idx[j - 1] <= steps) break;
            idx[j - 1] = 0;
            --j;
        }
        if (j == 0) break;
    }
    out.lower = min_delta;
    out.upper = p11 - min_gamma;
    return out;
}

}  // namespace pnsbound::reference
