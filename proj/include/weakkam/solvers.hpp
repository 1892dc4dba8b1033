#pragma once

// Fixed-point and eigenvalue solvers.
//
// The additive eigenvalue (effective action) of the windowed operator is
// computed by three independent routes:
//   karp             exact minimum mean cycle of the kernel graph,
//   discounted-limit tau*delta*u_{tau,delta} as delta walks a schedule,
//   mean-per-site    min_y T^k[0](y) / k  (diagnostic).
// The discounted solver is a Banach iteration from u = 0 whose stopping
// rule certifies the true error through the contraction factor 1-tau*delta;
// the residual bound is sharpened with the spread of the increment, which
// removes the constant mode that otherwise dominates for small tau*delta.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/laxoleinik.hpp"
#include "weakkam/ratefit.hpp"

namespace weakkam {

struct SolveReport {
    std::string route;             // karp | discounted-limit | mean-per-site | discounted
    double effective_action = 0.0; // additive eigenvalue estimate
    double normalized_effective = 0.0;  // effective_action / tau
    long iterations = 0;
    double final_residual = 0.0;
    double wall_time = 0.0;  // seconds
};

struct WeakKamSolution {
    GridFunction u;                   // min-normalized solution
    double effective_action = 0.0;
    GridFunction calibration_defect;  // T[u] - u - Ebar, pointwise
};

// Unique fixed point of u -> min_x{(1-tau delta) u(x) + E(x,y)}.  The
// returned function satisfies ||T[u]-u||_inf <= tol*tau*delta (measured),
// hence ||u - u*||_inf <= tol.
std::pair<GridFunction, SolveReport> solve_discounted(const ActionKernel& kernel, double delta,
                                                      double tol, long max_iter);

struct KarpResult {
    SolveReport report;
    std::vector<std::size_t> cycle_nodes;  // v_0 -> v_1 -> ... -> v_0
    std::vector<int> cycle_slots;          // offset slot of each edge
};

// Exact minimum cycle mean of the kernel graph.  When the global weight
// minimum sits on the diagonal the bracket
//   min weight <= Ebar <= min diagonal weight
// collapses and the self-loop is returned directly; otherwise Karp's
// recurrence runs and one attaining cycle is recovered by walking the
// predecessors back.
KarpResult effective_action_karp(const ActionKernel& kernel);

struct DiscountedLimitResult {
    SolveReport report;
    std::vector<double> deltas;
    std::vector<double> estimates;  // mean of tau*delta*u per delta
    std::vector<double> spreads;    // osc of tau*delta*u per delta
};

// Ebar as the limit of tau*delta*u along the schedule, Richardson
// extrapolated across the last two entries (first-order bias assumed).
DiscountedLimitResult effective_action_discounted(const ActionKernel& kernel,
                                                  const std::vector<double>& delta_schedule,
                                                  double tol);

// Ebar(k)/k with the oscillation band as the error estimate.
SolveReport effective_action_mean_per_site(const ActionKernel& kernel, int steps);

// Ebar(k) = min_y T^k[0](y); super-additive in k.
double ground_state_energy(const ActionKernel& kernel, int steps);

// Weak KAM solution via the discounted selection: Ebar by Karp, then the
// Cauchy limit of u_{tau,delta} - Ebar/(tau delta) down the schedule,
// polished by backward iterations so the calibration defect is one-sided
// within rounding, then min-normalized.
WeakKamSolution solve_weak_kam(const ActionKernel& kernel,
                               const std::vector<double>& delta_schedule, double tol);

// Same limit WITHOUT min-normalization or polish: the additive constant is
// the information content of the selection principle.
GridFunction selected_solution(const ActionKernel& kernel,
                               const std::vector<double>& delta_schedule, double tol);

// Ebar - inf over windowed pairs of {E(x,y) - u(y) + u(x)}; zero for an
// exact solution, nonnegative for sub-actions.
double supinf_gap(const GridFunction& u, const ActionKernel& kernel, double effective_action);

struct SweepSettings {
    double c_h = 1.0;        // grid rule h <= c_h * tau^2
    double safety = 1.5;     // window inflation
    std::vector<double> delta_schedule;  // defaults to 0.4 * 2^-k, 8 entries
    double tol = 1e-8;
};

struct SweepEntry {
    double tau = 0.0;
    int n = 0;
    double effective_action = 0.0;
    double normalized_effective = 0.0;
    double eigen_error = 0.0;  // |Ebar/tau + Hbar(0)|
    GridFunction u;
    double lipschitz = 0.0;
    double max_jump = 0.0;       // largest argmin offset, physical units
    double window_radius = 0.0;  // R (so the jump bound is tau*R)
    double lipschitz_bound = 0.0;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    RateFit fit;                       // log-log fit of eigen_error vs tau
    std::vector<double> cauchy_gaps;   // consecutive u's on the coarser grid
    double h_bar_zero = 0.0;
};

std::vector<double> default_delta_schedule();

// Runs solve_weak_kam for each tau (n from the h <= c_h tau^2 rule) and
// fits the eigenvalue error against the analytic effective Hamiltonian.
SweepResult continuum_limit_sweep(const LagrangianModel& model, const std::vector<double>& p,
                                  const std::vector<double>& tau_schedule,
                                  const SweepSettings& settings, double h_bar_zero);

}  // namespace weakkam
