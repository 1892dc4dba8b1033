#pragma once

// Lagrangian models and the cohomology-shifted discrete action
//
//   L(x,v) = (m/2) ||v||^2 + V(x),   V a trigonometric polynomial on T^d,
//   E(x,y) = tau * L(x, (y-x)/tau) - P.(y-x).
//
// The discrete action is translational periodic, E(x+k, y+k) = E(x,y) for
// integer k; evaluation wraps x into [0,1)^d before touching V so that the
// identity holds bit-for-bit whenever the inputs shift exactly.

#include <functional>
#include <span>
#include <vector>

#include "weakkam/errors.hpp"

namespace weakkam {

// One term a*cos(2 pi k.x) + b*sin(2 pi k.x) of the on-site potential.
struct PotentialTerm {
    std::vector<int> freq;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
};

class LagrangianModel {
public:
    enum class Kind { QuadraticKineticPlusPotential, CustomTable };

    static LagrangianModel mechanical(int dimension, double mass,
                                      std::vector<PotentialTerm> potential);

    // Standard pendulum / Frenkel-Kontorova on-site potential in d=1:
    //   V(x) = (K / 4 pi^2) (1 - cos 2 pi x),  min V = V(0) = 0.
    static LagrangianModel pendulum(double coupling);

    // Tabulated Lagrangian given as a callable; the Legendre transform is
    // then numerical over a velocity ball.
    static LagrangianModel custom_table(int dimension,
                                        std::function<double(std::span<const double>,
                                                             std::span<const double>)> table,
                                        double velocity_radius);

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    double mass() const { return mass_; }
    const std::vector<PotentialTerm>& potential_terms() const { return potential_; }

    double potential(std::span<const double> x) const;
    void potential_gradient(std::span<const double> x, std::span<double> out) const;
    double potential_min() const { return v_min_; }
    double potential_max() const { return v_max_; }
    // Position of the scanned potential minimum (refined, d <= 2).
    const std::vector<double>& potential_argmin() const { return v_argmin_; }

    double lagrangian(std::span<const double> x, std::span<const double> v) const;
    double custom_velocity_radius() const { return custom_radius_; }

private:
    LagrangianModel() = default;

    void scan_potential_extrema();

    Kind kind_ = Kind::QuadraticKineticPlusPotential;
    int dim_ = 1;
    double mass_ = 1.0;
    std::vector<PotentialTerm> potential_;
    std::function<double(std::span<const double>, std::span<const double>)> table_;
    double custom_radius_ = 0.0;
    double v_min_ = 0.0;
    double v_max_ = 0.0;
    std::vector<double> v_argmin_;
};

struct DiscreteAction {
    LagrangianModel model;
    double tau = 0.1;
    std::vector<double> p;  // cohomology parameter, one entry per axis

    DiscreteAction(LagrangianModel m, double tau_, std::vector<double> p_);
};

double eval_lagrangian(const LagrangianModel& model, std::span<const double> x,
                       std::span<const double> v);

// E(x, x + delta) evaluated from the base point and the displacement; used
// by kernel tabulation so that weights depend on the node coordinate and
// the offset only.
double eval_action_displacement(const DiscreteAction& action, std::span<const double> x,
                                std::span<const double> delta);

double eval_discrete_action(const DiscreteAction& action, std::span<const double> x,
                            std::span<const double> y);

// H(x,p) = sup_v { p.v - L(x,v) }; closed form for the mechanical kind,
// numerical supremum over a velocity ball for tabulated models.
double legendre_transform(const LagrangianModel& model, std::span<const double> x,
                          std::span<const double> p);

// Convenience for d=1 call sites.
double eval_lagrangian(const LagrangianModel& model, double x, double v);
double eval_discrete_action(const DiscreteAction& action, double x, double y);
double legendre_transform(const LagrangianModel& model, double x, double p);

struct AprioriBounds {
    double window_radius = 0.0;   // jump bound R: minimizers satisfy ||y-x|| <= tau R
    double lipschitz_bound = 0.0; // uniform Lipschitz constant for solutions
    double action_lower = 0.0;    // inf E/tau
    double diagonal_upper = 0.0;  // sup E(x,x)/tau
};

// Scans the action for the compactness constants: C1 from the near-diagonal
// supremum, the smallest radius on a ladder whose superlinearity ratio
// clears C1 (inflated by `safety`), and the windowed Lipschitz bound.
AprioriBounds estimate_bounds(const DiscreteAction& action, double safety = 1.5);

}  // namespace weakkam
