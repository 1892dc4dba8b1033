#pragma once

// Analytic reference values and oracles used by the convergence checks:
// the exact effective Hamiltonian at P = 0 for mechanical models, the
// closed-form pendulum profile, the discounted reference solution obtained
// by self-refinement in tau at fixed delta, and the discounted discrete
// Euler-Lagrange residual along calibrated chains.

#include <string>
#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/mather.hpp"
#include "weakkam/models.hpp"

namespace weakkam {

struct ContinuumReference {
    double effective_hamiltonian_at_zero = 0.0;
    std::string provenance;
};

// Hbar(0) = -min_x V(x) for L = (m/2)|v|^2 + V; the rest configuration on
// argmin V realizes the infimal mean action.
double analytic_effective_hamiltonian(const LagrangianModel& model);

// Periodic viscosity profile of (1/2)(u')^2 = V(x) for the pendulum
// potential V(x) = (K/4 pi^2)(1 - cos 2 pi x), min-normalized:
//   u(x) = (sqrt(K)/pi^2) (1 - cos(pi x))  on [0, 1/2], mirrored on [1/2, 1].
// The constant is re-derivable as the quadrature of sqrt(2V); peak value
// u(1/2) = sqrt(K)/pi^2.
struct PendulumProfile {
    double coupling = 1.0;
    double operator()(double x) const;
    double peak() const;
};

PendulumProfile pendulum_closed_form(double coupling);

struct DiscountedReference {
    GridFunction u;                   // finest ladder solution on the coarsest grid
    double richardson_error = 0.0;    // first-order error estimate for the finest entry
    std::vector<double> cauchy_gaps;  // consecutive ladder gaps on the coarsest grid
    bool reliable = true;             // gaps kept shrinking by >= 1.5
};

// u_delta approximated by driving tau down the ladder at fixed delta; each
// entry solves on its own grid (h <= c_h tau^2) and is compared on the
// coarsest one.  Throws LadderNotConverging when the gaps stop decreasing.
DiscountedReference reference_discounted_solution(const LagrangianModel& model,
                                                  const std::vector<double>& p, double delta,
                                                  const std::vector<double>& tau_ladder,
                                                  double c_h = 1.0, double tol = 1e-8,
                                                  double safety = 1.5);

// Max over interior chain steps of
//   | (1-tau delta) dL/dv(x_{n-1}, v_{n-1}) - dL/dv(x_n, v_n)
//     + tau dL/dx(x_n, v_n) |
// with v_n the unwrapped increments; O(h/tau) under node snapping.
double discounted_el_residual(const LagrangianModel& model, const std::vector<double>& p,
                              double tau, double delta, const CalibratedChain& chain);

}  // namespace weakkam
