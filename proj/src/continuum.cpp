#include "weakkam/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakkam/solvers.hpp"

namespace weakkam {

double analytic_effective_hamiltonian(const LagrangianModel& model) {
    if (model.kind() != LagrangianModel::Kind::QuadraticKineticPlusPotential)
        throw UnsupportedModel(
            "analytic_effective_hamiltonian: only the mechanical kind has a closed form");
    return -model.potential_min();
}

double PendulumProfile::operator()(double x) const {
    const double pi = std::numbers::pi;
    double w = x - std::floor(x);
    if (w > 0.5) w = 1.0 - w;
    return std::sqrt(coupling) / (pi * pi) * (1.0 - std::cos(pi * w));
}

double PendulumProfile::peak() const {
    return std::sqrt(coupling) / (std::numbers::pi * std::numbers::pi);
}

PendulumProfile pendulum_closed_form(double coupling) {
    if (!(coupling > 0.0)) throw Error("pendulum_closed_form: coupling must be positive");
    return PendulumProfile{coupling};
}

DiscountedReference reference_discounted_solution(const LagrangianModel& model,
                                                  const std::vector<double>& p, double delta,
                                                  const std::vector<double>& tau_ladder,
                                                  double c_h, double tol, double safety) {
    if (tau_ladder.size() < 3)
        throw Error("reference_discounted_solution: the ladder needs at least 3 entries");
    for (std::size_t i = 1; i < tau_ladder.size(); ++i)
        if (!(tau_ladder[i] < tau_ladder[i - 1]))
            throw Error("reference_discounted_solution: ladder must be strictly decreasing");

    const int n0 = static_cast<int>(std::ceil(1.0 / (c_h * tau_ladder[0] * tau_ladder[0])));
    PeriodicGrid coarse(model.dimension(), std::max(4, n0));

    DiscountedReference out{GridFunction(coarse), 0.0, {}, true};
    bool have_prev = false;
    GridFunction prev(coarse);
    for (double tau : tau_ladder) {
        const int n = static_cast<int>(std::ceil(1.0 / (c_h * tau * tau)));
        PeriodicGrid grid(model.dimension(), std::max(4, n));
        DiscreteAction action(model, tau, p);
        ActionKernel kernel = tabulate_kernel(action, grid, estimate_bounds(action, safety));
        auto [u, rep] = solve_discounted(kernel, delta, tol, 50'000'000L);
        GridFunction on_coarse = resample(u, coarse);
        if (have_prev) out.cauchy_gaps.push_back(sup_norm_diff(on_coarse, prev));
        prev = std::move(on_coarse);
        have_prev = true;
    }
    out.u = prev;

    const auto& gaps = out.cauchy_gaps;
    if (gaps.size() >= 2) {
        const double last = gaps.back();
        const double before = gaps[gaps.size() - 2];
        if (last > before)
            throw LadderNotConverging(
                "reference_discounted_solution: ladder gaps increased between the last "
                "two refinements");
        if (last > before / 1.5) out.reliable = false;
    }
    const double r = tau_ladder.back() / tau_ladder[tau_ladder.size() - 2];
    out.richardson_error = gaps.empty() ? 0.0 : gaps.back() * r / (1.0 - r);
    return out;
}

double discounted_el_residual(const LagrangianModel& model, const std::vector<double>& p,
                              double tau, double delta, const CalibratedChain& chain) {
    if (model.kind() != LagrangianModel::Kind::QuadraticKineticPlusPotential)
        throw UnsupportedModel("discounted_el_residual: analytic derivatives need the "
                               "mechanical kind");
    const int K = chain.steps();
    if (K < 2) throw ChainTooShort("discounted_el_residual: need at least 3 chain points");
    const int d = chain.dimension;
    const double a = 1.0 - tau * delta;
    const double m = model.mass();
    std::vector<double> pvec = p;
    if (pvec.empty()) pvec.assign(d, 0.0);

    // Forward-time ordering: y_j = x_{j-K}, so y monotically walks the
    // chain from its far end to the start node.
    auto pos = [&](int j) { return chain.position(K - j); };
    std::vector<double> vprev(d), vcur(d), grad(d), xw(d);
    double worst = 0.0;
    for (int nidx = 1; nidx < K; ++nidx) {
        auto xm1 = pos(nidx - 1);
        auto x0 = pos(nidx);
        auto x1 = pos(nidx + 1);
        for (int k = 0; k < d; ++k) {
            vprev[k] = (x0[k] - xm1[k]) / tau;
            vcur[k] = (x1[k] - x0[k]) / tau;
        }
        for (int k = 0; k < d; ++k) xw[k] = x0[k] - std::floor(x0[k]);
        model.potential_gradient(xw, grad);
        double q = 0.0;
        for (int k = 0; k < d; ++k) {
            // Stationarity of the discounted action; at P = 0 this is the
            // plain (1-td) dL/dv - dL/dv + tau dL/dx form.
            const double r =
                a * (m * vprev[k] - pvec[k]) - (m * vcur[k] - pvec[k]) + tau * grad[k];
            q += r * r;
        }
        worst = std::max(worst, std::sqrt(q));
    }
    return worst;
}

}  // namespace weakkam
