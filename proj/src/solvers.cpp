#include "weakkam/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace weakkam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void check_schedule(const std::vector<double>& schedule, double tau) {
    if (schedule.empty()) throw Error("delta schedule must not be empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const double td = tau * schedule[i];
        if (!(td > 0.0 && td < 1.0))
            throw InvalidDiscount("delta schedule entry leaves tau*delta outside (0,1)");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            throw Error("delta schedule must be strictly decreasing");
    }
}

// Mean of (1/len)-weighted kernel weights over the cycle edges, summed in
// sorted (node, slot) order so that measure-side evaluations reproduce the
// value bit for bit.
double cycle_mean(const ActionKernel& kernel, const std::vector<std::size_t>& nodes,
                  const std::vector<int>& slots) {
    std::vector<std::pair<std::size_t, int>> edges(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) edges[i] = {nodes[i], slots[i]};
    std::sort(edges.begin(), edges.end());
    const double inv = 1.0 / static_cast<double>(edges.size());
    double s = 0.0;
    for (const auto& [node, slot] : edges) s += kernel.weight(node, slot) * inv;
    return s;
}

int edge_slot(const ActionKernel& kernel, std::size_t x, std::size_t y) {
    int best = -1;
    double bw = kInf;
    for (int s = 0; s < kernel.offset_count(); ++s) {
        if (kernel.target(x, s) != y) continue;
        const double w = kernel.weight(x, s);
        if (w < bw) {
            bw = w;
            best = s;
        }
    }
    if (best < 0) throw Error("effective_action_karp: predecessor edge not in window");
    return best;
}

}  // namespace

std::pair<GridFunction, SolveReport> solve_discounted(const ActionKernel& kernel, double delta,
                                                      double tol, long max_iter) {
    const double td = kernel.tau() * delta;
    if (!(td > 0.0 && td < 1.0))
        throw InvalidDiscount("solve_discounted: tau*delta must lie in (0,1)");
    if (!(tol > 0.0)) throw Error("solve_discounted: tolerance must be positive");
    Timer timer;
    const double a = 1.0 - td;
    const double target = tol * td;  // residual level certifying ||u-u*|| <= tol

    GridFunction u(kernel.grid(), 0.0);
    long iters = 0;
    while (iters < max_iter) {
        GridFunction v = discounted_apply(u, kernel, delta);
        ++iters;
        double dmin = kInf, dmax = -kInf;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = v[i] - u[i];
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        const double dsup = std::max(std::fabs(dmin), std::fabs(dmax));

        if (dsup <= target) {
            GridFunction w = discounted_apply(v, kernel, delta);
            ++iters;
            const double res = sup_norm_diff(w, v);
            if (res <= target) {
                SolveReport rep{"discounted", td * mean_value(v), delta * mean_value(v), iters,
                                res, timer.seconds()};
                return {std::move(v), rep};
            }
            u = std::move(w);
            continue;
        }

        // The increment of the next iterate lies in a*[dmin, dmax], so
        // shifting by the geometric tail of the midpoint leaves a residual
        // bounded by a*(dmax-dmin)/2.
        if (a * (dmax - dmin) * 0.5 <= 0.45 * target) {
            const double shift = a * 0.5 * (dmax + dmin) / td;
            GridFunction cand = v;
            for (double& x : cand.values) x += shift;
            GridFunction w = discounted_apply(cand, kernel, delta);
            ++iters;
            const double res = sup_norm_diff(w, cand);
            if (res <= target) {
                SolveReport rep{"discounted", td * mean_value(cand), delta * mean_value(cand),
                                iters, res, timer.seconds()};
                return {std::move(cand), rep};
            }
            u = std::move(w);
            continue;
        }
        u = std::move(v);
    }
    GridFunction v = discounted_apply(u, kernel, delta);
    throw MaxIterExceeded("solve_discounted: iteration budget exhausted", sup_norm_diff(v, u),
                          iters);
}

KarpResult effective_action_karp(const ActionKernel& kernel) {
    Timer timer;
    const PeriodicGrid& g = kernel.grid();
    const std::size_t V = g.node_count();

    KarpResult result;
    result.report.route = "karp";

    // Bracket short-circuit: min weight <= Ebar <= min diagonal weight, so
    // when the global minimum sits on the diagonal the self-loop is an
    // exact minimum-mean cycle.
    const double wmin = kernel.min_weight();
    const double dmin = kernel.min_diagonal_weight();
    if (wmin == dmin) {
        const std::size_t node = kernel.argmin_diagonal_node();
        result.cycle_nodes = {node};
        result.cycle_slots = {kernel.zero_slot()};
        result.report.effective_action = cycle_mean(kernel, result.cycle_nodes, result.cycle_slots);
        result.report.normalized_effective = result.report.effective_action / kernel.tau();
        result.report.iterations = 1;
        result.report.final_residual = 0.0;
        result.report.wall_time = timer.seconds();
        return result;
    }

    if (V > 6000)
        throw Error("effective_action_karp: grid too large for the exact cycle route");

    // D[k][v] = least weight of a k-edge walk from node 0 to v.
    std::vector<double> table((V + 1) * V, kInf);
    std::vector<std::int32_t> pred((V + 1) * V, -1);
    table[0] = 0.0;  // D[0][0]
    for (std::size_t level = 1; level <= V; ++level) {
        std::span<const double> in(table.data() + (level - 1) * V, V);
        std::span<double> out(table.data() + level * V, V);
        std::span<std::int32_t> pr(pred.data() + level * V, V);
        relax_min_plus(kernel, in, out, 0.0, pr);
    }

    const double* last = table.data() + V * V;
    double mu = kInf;
    std::size_t vstar = V;
    for (std::size_t v = 0; v < V; ++v) {
        if (!std::isfinite(last[v]))
            throw DisconnectedGraph("effective_action_karp: node unreachable inside the window");
        double value = -kInf;
        for (std::size_t k = 0; k < V; ++k) {
            const double dk = table[k * V + v];
            if (!std::isfinite(dk)) continue;
            value = std::max(value, (last[v] - dk) / static_cast<double>(V - k));
        }
        if (value < mu) {
            mu = value;
            vstar = v;
        }
    }

    // Walk the predecessors back from (vstar, V) and keep the best-mean
    // cycle of the walk's decomposition.
    std::vector<std::size_t> walk(V + 1);
    walk[V] = vstar;
    for (std::size_t level = V; level > 0; --level)
        walk[level - 1] = static_cast<std::size_t>(pred[level * V + walk[level]]);

    std::vector<std::ptrdiff_t> last_seen(V, -1);
    double best_mean = kInf;
    std::size_t best_lo = 0, best_hi = 0;
    for (std::size_t l = 0; l <= V; ++l) {
        const std::size_t node = walk[l];
        if (last_seen[node] >= 0) {
            const std::size_t lo = static_cast<std::size_t>(last_seen[node]);
            std::vector<std::size_t> nodes(walk.begin() + lo, walk.begin() + l);
            std::vector<int> slots(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i)
                slots[i] = edge_slot(kernel, nodes[i], walk[lo + i + 1]);
            const double mean = cycle_mean(kernel, nodes, slots);
            if (mean < best_mean) {
                best_mean = mean;
                best_lo = lo;
                best_hi = l;
            }
        }
        last_seen[node] = static_cast<std::ptrdiff_t>(l);
    }
    if (!std::isfinite(best_mean)) throw Error("effective_action_karp: no cycle on the walk");
    if (best_mean > mu + 1e-9 * (1.0 + std::fabs(mu)))
        throw Error("effective_action_karp: recovered cycle mean exceeds the recurrence value");

    result.cycle_nodes.assign(walk.begin() + best_lo, walk.begin() + best_hi);
    result.cycle_slots.resize(result.cycle_nodes.size());
    for (std::size_t i = 0; i < result.cycle_nodes.size(); ++i)
        result.cycle_slots[i] = edge_slot(kernel, result.cycle_nodes[i], walk[best_lo + i + 1]);
    result.report.effective_action = cycle_mean(kernel, result.cycle_nodes, result.cycle_slots);
    result.report.normalized_effective = result.report.effective_action / kernel.tau();
    result.report.iterations = static_cast<long>(V);
    result.report.final_residual = std::fabs(result.report.effective_action - mu);
    result.report.wall_time = timer.seconds();
    return result;
}

DiscountedLimitResult effective_action_discounted(const ActionKernel& kernel,
                                                  const std::vector<double>& delta_schedule,
                                                  double tol) {
    check_schedule(delta_schedule, kernel.tau());
    Timer timer;
    DiscountedLimitResult out;
    long total_iters = 0;
    for (double delta : delta_schedule) {
        auto [u, rep] = solve_discounted(kernel, delta, tol, 50'000'000L);
        total_iters += rep.iterations;
        const double td = kernel.tau() * delta;
        GridFunction scaled = u;
        for (double& x : scaled.values) x *= td;
        out.deltas.push_back(delta);
        out.estimates.push_back(mean_value(scaled));
        out.spreads.push_back(oscillation(scaled));
    }
    double estimate = out.estimates.back();
    if (out.estimates.size() >= 2) {
        const double d1 = out.deltas[out.deltas.size() - 2];
        const double d2 = out.deltas.back();
        const double e1 = out.estimates[out.estimates.size() - 2];
        const double e2 = out.estimates.back();
        estimate = e2 - d2 * (e1 - e2) / (d1 - d2);  // first-order bias removed
    }
    out.report.route = "discounted-limit";
    out.report.effective_action = estimate;
    out.report.normalized_effective = estimate / kernel.tau();
    out.report.iterations = total_iters;
    out.report.final_residual = out.spreads.back();
    out.report.wall_time = timer.seconds();
    return out;
}

double ground_state_energy(const ActionKernel& kernel, int steps) {
    if (steps < 1) throw Error("ground_state_energy: need at least one step");
    GridFunction u(kernel.grid(), 0.0);
    for (int k = 0; k < steps; ++k) u = backward_apply(u, kernel);
    return min_value(u);
}

SolveReport effective_action_mean_per_site(const ActionKernel& kernel, int steps) {
    if (steps < 1) throw Error("effective_action_mean_per_site: need at least one step");
    Timer timer;
    GridFunction u(kernel.grid(), 0.0);
    for (int k = 0; k < steps; ++k) u = backward_apply(u, kernel);
    SolveReport rep;
    rep.route = "mean-per-site";
    rep.effective_action = min_value(u) / steps;
    rep.normalized_effective = rep.effective_action / kernel.tau();
    rep.iterations = steps;
    rep.final_residual = oscillation(u) / steps;
    rep.wall_time = timer.seconds();
    return rep;
}

namespace {

// Backward iterations drive the Cauchy limit onto an exact discrete
// solution of the finite graph: after a transient, the running pointwise
// minimum of T^j[u] - j*Ebar over one period of the critical graph is a
// fixed point (inf-commutation), which makes the calibration defect
// one-sided within rounding.
GridFunction polish_weak_kam(GridFunction u, const ActionKernel& kernel, double ebar,
                             double tol) {
    // Phase 1: plain normalized iteration.  On the finite graph the argmin
    // policy parks on the critical class after finitely many steps, so the
    // updates drop to rounding level (or become exactly periodic).
    const double scale = 1.0 + std::fabs(ebar) + oscillation(u);
    const int budget = std::min(100000, 512 + static_cast<int>(std::ceil(24.0 / kernel.tau())));
    for (int t = 0; t < budget; ++t) {
        GridFunction next = backward_apply(u, kernel);
        for (double& x : next.values) x -= ebar;
        const double change = sup_norm_diff(next, u);
        u = std::move(next);
        if (change <= 1e-14 * scale) break;
    }
    // Phase 2: running minimum over one window of further iterates; by
    // inf-commutation this turns an exactly periodic orbit into a fixed
    // point and is the identity when phase 1 already converged.
    GridFunction best = u;
    GridFunction cur = std::move(u);
    for (int j = 0; j < 64; ++j) {
        cur = backward_apply(cur, kernel);
        for (double& x : cur.values) x -= ebar;
        for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::min(best[i], cur[i]);
    }
    (void)tol;
    return best;
}

GridFunction discounted_selection_limit(const ActionKernel& kernel,
                                        const std::vector<double>& delta_schedule, double tol,
                                        double ebar) {
    check_schedule(delta_schedule, kernel.tau());
    GridFunction prev(kernel.grid(), 0.0);
    bool have_prev = false;
    double gap = kInf;
    for (double delta : delta_schedule) {
        auto [u, rep] = solve_discounted(kernel, delta, std::min(1e-6, 0.1 * tol), 50'000'000L);
        const double td = kernel.tau() * delta;
        for (double& x : u.values) x -= ebar / td;
        if (have_prev) {
            gap = sup_norm_diff(u, prev);
            if (gap <= tol) return u;
        }
        prev = std::move(u);
        have_prev = true;
    }
    throw ScheduleExhausted("discounted selection limit: schedule exhausted before the "
                            "Cauchy gap reached the tolerance",
                            gap);
}

}  // namespace

WeakKamSolution solve_weak_kam(const ActionKernel& kernel,
                               const std::vector<double>& delta_schedule, double tol) {
    const double ebar = effective_action_karp(kernel).report.effective_action;
    GridFunction w = discounted_selection_limit(kernel, delta_schedule, tol, ebar);
    w = polish_weak_kam(std::move(w), kernel, ebar, tol);
    GridFunction u = normalize_min_zero(w);
    GridFunction t = backward_apply(u, kernel);
    GridFunction defect(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) defect[i] = t[i] - u[i] - ebar;
    return {std::move(u), ebar, std::move(defect)};
}

GridFunction selected_solution(const ActionKernel& kernel,
                               const std::vector<double>& delta_schedule, double tol) {
    const double ebar = effective_action_karp(kernel).report.effective_action;
    return discounted_selection_limit(kernel, delta_schedule, tol, ebar);
}

double supinf_gap(const GridFunction& u, const ActionKernel& kernel, double effective_action) {
    if (u.grid != kernel.grid())
        throw GridMismatch("supinf_gap: function grid differs from kernel grid");
    double inf = kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto wrow = kernel.weights_row(i);
        for (int s = 0; s < kernel.offset_count(); ++s) {
            const std::size_t y = kernel.target(i, s);
            inf = std::min(inf, wrow[s] - u[y] + u[i]);
        }
    }
    return effective_action - inf;
}

std::vector<double> default_delta_schedule() {
    std::vector<double> s(8);
    double d = 0.4;
    for (auto& v : s) {
        v = d;
        d *= 0.5;
    }
    return s;
}

SweepResult continuum_limit_sweep(const LagrangianModel& model, const std::vector<double>& p,
                                  const std::vector<double>& tau_schedule,
                                  const SweepSettings& settings, double h_bar_zero) {
    if (tau_schedule.empty()) throw Error("continuum_limit_sweep: empty tau schedule");
    for (std::size_t i = 1; i < tau_schedule.size(); ++i)
        if (!(tau_schedule[i] < tau_schedule[i - 1]))
            throw Error("continuum_limit_sweep: tau schedule must be strictly decreasing");
    const std::vector<double> deltas =
        settings.delta_schedule.empty() ? default_delta_schedule() : settings.delta_schedule;

    SweepResult out;
    out.h_bar_zero = h_bar_zero;
    for (double tau : tau_schedule) {
        const int n = static_cast<int>(std::ceil(1.0 / (settings.c_h * tau * tau)));
        PeriodicGrid grid(model.dimension(), std::max(4, n));
        DiscreteAction action(model, tau, p);
        const AprioriBounds bounds = estimate_bounds(action, settings.safety);
        ActionKernel kernel = tabulate_kernel(action, grid, bounds);
        WeakKamSolution wk = solve_weak_kam(kernel, deltas, settings.tol);

        SweepEntry entry{tau,
                         grid.nodes_per_dim(),
                         wk.effective_action,
                         wk.effective_action / tau,
                         std::fabs(wk.effective_action / tau + h_bar_zero),
                         wk.u,
                         discrete_lipschitz(wk.u),
                         0.0,
                         bounds.window_radius,
                         bounds.lipschitz_bound};
        entry.max_jump = backward_lax_oleinik(wk.u, kernel).argmin.max_jump(grid.spacing());
        out.entries.push_back(std::move(entry));
    }

    if (out.entries.size() >= 3) {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& e : out.entries) pairs.emplace_back(e.tau, e.eigen_error);
        out.fit = fit_rate(pairs);
    }

    for (std::size_t i = 0; i + 1 < out.entries.size(); ++i) {
        const GridFunction& coarse = out.entries[i].u;
        GridFunction fine = resample(out.entries[i + 1].u, coarse.grid);
        out.cauchy_gaps.push_back(sup_norm_diff(fine, coarse));
    }
    return out;
}

}  // namespace weakkam
