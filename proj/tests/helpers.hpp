#pragma once

// Shared fixtures and independent oracles for the test suites.  The oracles
// here are deliberately written against the dense node graph (no windows,
// no kernels) so they check the production code from the outside.

#include <cmath>
#include <random>
#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/laxoleinik.hpp"
#include "weakkam/models.hpp"

namespace weakkam::testing {

inline LagrangianModel kinetic_model(double mass = 1.0) {
    return LagrangianModel::mechanical(1, mass, {});
}

inline GridFunction random_function(const PeriodicGrid& grid, std::mt19937_64& rng,
                                    double amp = 1.0) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    GridFunction f(grid);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

// min over all predecessor nodes and integer lifts of u(x) + E(x, y + m).
inline GridFunction dense_backward_oracle(const GridFunction& u, const DiscreteAction& action,
                                          int max_lift = 2) {
    const PeriodicGrid& g = u.grid;
    GridFunction out(g, 1e300);
    std::vector<double> xc(g.dimension()), yc(g.dimension()), ylift(g.dimension());
    std::vector<int> lift(g.dimension(), -max_lift);
    for (std::size_t y = 0; y < g.node_count(); ++y) {
        g.coordinate(y, yc);
        for (std::size_t x = 0; x < g.node_count(); ++x) {
            g.coordinate(x, xc);
            std::fill(lift.begin(), lift.end(), -max_lift);
            while (true) {
                for (int k = 0; k < g.dimension(); ++k) ylift[k] = yc[k] + lift[k];
                out[y] = std::min(out[y], u[x] + eval_discrete_action(action, xc, ylift));
                int k = g.dimension() - 1;
                while (k >= 0 && ++lift[k] > max_lift) {
                    lift[k] = -max_lift;
                    --k;
                }
                if (k < 0) break;
            }
        }
    }
    return out;
}

// Dense reduced-cost matrix of a kernel: a[x][y] = min over slots mapping
// x -> y of weight(x, slot) + shift.
inline std::vector<double> dense_matrix(const ActionKernel& kernel, double shift = 0.0) {
    const std::size_t n = kernel.grid().node_count();
    std::vector<double> a(n * n, 1e300);
    for (std::size_t x = 0; x < n; ++x)
        for (int s = 0; s < kernel.offset_count(); ++s) {
            const std::size_t y = kernel.target(x, s);
            a[x * n + y] = std::min(a[x * n + y], kernel.weight(x, s) + shift);
        }
    return a;
}

inline std::vector<double> dense_min_plus(const std::vector<double>& a,
                                          const std::vector<double>& b, std::size_t n) {
    std::vector<double> c(n * n, 1e300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            if (aik >= 1e300) continue;
            for (std::size_t j = 0; j < n; ++j)
                c[i * n + j] = std::min(c[i * n + j], aik + b[k * n + j]);
        }
    return c;
}

// Discounted dynamic programming over the dense graph: depth steps of
// W_{k+1}(y) = min_x {(1-td) W_k(x) + E(x,y)} from W_0 = 0, minimizing over
// integer lifts like the backward oracle.
inline GridFunction dense_discounted_series(const DiscreteAction& action,
                                            const PeriodicGrid& grid, double delta, int depth,
                                            int max_lift = 2) {
    GridFunction w(grid, 0.0);
    const double a = 1.0 - action.tau * delta;
    for (int k = 0; k < depth; ++k) {
        GridFunction scaled = w;
        for (auto& v : scaled.values) v *= a;
        w = dense_backward_oracle(scaled, action, max_lift);
    }
    return w;
}

}  // namespace weakkam::testing
