#include "weakkam/validate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "weakkam/continuum.hpp"
#include "weakkam/csv.hpp"
#include "weakkam/mather.hpp"
#include "weakkam/solvers.hpp"

namespace weakkam {

namespace {

GridFunction random_function(const PeriodicGrid& grid, std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    GridFunction f(grid);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

}  // namespace

std::vector<PropertyViolation> run_property_suite(const ExperimentConfig& cfg,
                                                  std::uint64_t seed) {
    std::vector<PropertyViolation> out;
    auto fail = [&](const std::string& name, const std::string& detail) {
        out.push_back({name, detail});
    };
    auto check = [&](bool ok, const std::string& name, double measured, double bound) {
        if (!ok) {
            std::ostringstream os;
            os << "measured " << format_double(measured, 6) << ", bound "
               << format_double(bound, 6);
            fail(name, os.str());
        }
    };

    std::mt19937_64 rng(seed);
    const double tau = tau_entries(cfg).front();
    const LagrangianModel model = make_model(cfg);
    const DiscreteAction action = make_action(cfg, tau);
    const AprioriBounds bounds = estimate_bounds(action, cfg.safety);
    PeriodicGrid grid(cfg.dimension, grid_nodes_for(cfg, tau));
    const ActionKernel kernel = tabulate_kernel(action, grid, bounds);

    // Translational periodicity on quantized inputs (exact wrap identity).
    {
        std::uniform_int_distribution<long> q(0, (1L << 30) - 1);
        std::uniform_int_distribution<int> ki(-512, 512);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> x(cfg.dimension), y(cfg.dimension), xs(cfg.dimension),
                ys(cfg.dimension);
            for (int k = 0; k < cfg.dimension; ++k) {
                x[k] = static_cast<double>(q(rng)) / (1L << 30);
                y[k] = x[k] + static_cast<double>(q(rng) % (1 << 20)) / (1L << 24) - 0.03125;
                const int shift = ki(rng);
                xs[k] = x[k] + shift;
                ys[k] = y[k] + shift;
            }
            worst = std::max(worst, std::fabs(eval_discrete_action(action, xs, ys) -
                                              eval_discrete_action(action, x, y)));
        }
        check(worst == 0.0, "translational periodicity E(x+k,y+k) = E(x,y)", worst, 0.0);
    }

    // Legendre duality round trip against a dense velocity scan.
    if (model.kind() == LagrangianModel::Kind::QuadraticKineticPlusPotential) {
        std::uniform_real_distribution<double> pd(-5.0, 5.0);
        std::uniform_real_distribution<double> xd(0.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x(cfg.dimension), p(cfg.dimension);
            for (int k = 0; k < cfg.dimension; ++k) {
                x[k] = xd(rng);
                p[k] = pd(rng);
            }
            const double closed = legendre_transform(model, x, p);
            double pnorm = 0.0;
            for (double c : p) pnorm += c * c;
            pnorm = std::sqrt(pnorm);
            const double radius = pnorm / model.mass() + 2.0;
            double scan = -1e300;
            const int steps = cfg.dimension == 1 ? 20001 : 301;
            std::vector<int> idx(cfg.dimension, 0);
            std::vector<double> v(cfg.dimension);
            while (true) {
                double s = 0.0;
                for (int k = 0; k < cfg.dimension; ++k) {
                    v[k] = -radius + 2.0 * radius * idx[k] / (steps - 1);
                    s += p[k] * v[k];
                }
                scan = std::max(scan, s - model.lagrangian(x, v));
                int k = cfg.dimension - 1;
                while (k >= 0 && ++idx[k] == steps) idx[k--] = 0;
                if (k < 0) break;
            }
            worst = std::max(worst, std::fabs(closed - scan));
        }
        check(worst <= 1e-6, "Legendre duality sup_v {p.v - L} matches the closed form", worst,
              1e-6);
    }

    // Coercivity witness for the mechanical kind.
    if (model.kind() == LagrangianModel::Kind::QuadraticKineticPlusPotential) {
        double pnorm = 0.0;
        for (double c : cfg.p) pnorm += c * c;
        pnorm = std::sqrt(pnorm);
        const double vmax = model.potential_max();
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.node_count(); i += std::max<std::size_t>(1, grid.node_count() / 128))
            for (int s = 0; s < kernel.offset_count(); ++s) {
                const double r = kernel.offset_norm(s);
                const double lower =
                    0.5 * model.mass() * (r / tau) * (r / tau) - vmax - pnorm * r / tau;
                worst = std::min(worst, kernel.weight(i, s) / tau - lower);
            }
        check(worst >= -1e-12, "coercivity witness E/tau >= (m/2)(r/tau)^2 - max V - |P| r/tau",
              worst, -1e-12);
    }

    // Operator laws on random pairs.
    {
        double mono = 0.0, nonexp = 0.0, shift = 0.0, infcom = 0.0;
        for (int t = 0; t < 100; ++t) {
            GridFunction u = random_function(grid, rng);
            GridFunction w = random_function(grid, rng, 0.5);
            GridFunction v = u;
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::fabs(w[i]);
            GridFunction tu = backward_apply(u, kernel);
            GridFunction tv = backward_apply(v, kernel);
            for (std::size_t i = 0; i < tu.size(); ++i) mono = std::max(mono, tu[i] - tv[i]);
            nonexp = std::max(nonexp, sup_norm_diff(tu, tv) - sup_norm_diff(u, v));
            const double c = w[0];
            GridFunction uc = u;
            for (auto& x : uc.values) x += c;
            GridFunction tuc = backward_apply(uc, kernel);
            for (std::size_t i = 0; i < tu.size(); ++i)
                shift = std::max(shift, std::fabs(tuc[i] - tu[i] - c));
            GridFunction m(grid);
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(u[i], v[i]);
            GridFunction tm = backward_apply(m, kernel);
            for (std::size_t i = 0; i < tm.size(); ++i)
                infcom = std::max(infcom, std::fabs(tm[i] - std::min(tu[i], tv[i])));
        }
        check(mono <= 1e-12, "monotonicity u <= v implies T[u] <= T[v]", mono, 1e-12);
        check(nonexp <= 1e-12, "non-expansiveness |T[u]-T[v]| <= |u-v|", nonexp, 1e-12);
        check(shift <= 1e-12, "constant shift T[u+c] = T[u]+c", shift, 1e-12);
        check(infcom <= 1e-12, "inf-commutation T[min(u,v)] = min(T[u],T[v])", infcom, 1e-12);
    }

    // Discounted contraction.
    {
        const double delta = cfg.delta_schedule.front();
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            GridFunction u = random_function(grid, rng);
            GridFunction v = random_function(grid, rng);
            const double lhs = sup_norm_diff(discounted_apply(u, kernel, delta),
                                             discounted_apply(v, kernel, delta));
            worst = std::max(worst, lhs - (1.0 - tau * delta) * sup_norm_diff(u, v));
        }
        check(worst <= 1e-14, "discounted contraction factor 1 - tau*delta", worst, 1e-14);
    }

    // Eigenvalue bracket and cross-route agreement.
    if (grid.node_count() <= 6000) {
        const KarpResult karp = effective_action_karp(kernel);
        const double ebar = karp.report.effective_action;
        check(kernel.min_weight() <= ebar + 1e-12 && ebar <= kernel.min_diagonal_weight() + 1e-12,
              "bracket min weight <= Ebar <= min diagonal weight", ebar, 0.0);
        const DiscountedLimitResult dl =
            effective_action_discounted(kernel, cfg.delta_schedule, cfg.tol);
        const double band =
            std::max(1e-6, 2.0 * tau * cfg.delta_schedule.back() * (1.0 + oscillation(GridFunction(grid))));
        check(std::fabs(dl.report.effective_action - ebar) <= band,
              "effective action route agreement karp vs discounted-limit",
              std::fabs(dl.report.effective_action - ebar), band);

        // Minimizing measure sanity.
        const HolonomicMeasure mu = minimizing_measure(kernel);
        check(std::fabs(mu.total_mass() - 1.0) <= 1e-12, "measure total mass", mu.total_mass(),
              1.0);
        check(mu.holonomy_residual() <= 1e-10, "measure holonomy balance",
              mu.holonomy_residual(), 1e-10);
        check(mu.action(kernel) == ebar, "minimizing measure action equals Ebar",
              mu.action(kernel), ebar);
    }

    // Weak KAM solution: calibration defect and sup-inf gap.
    if (grid.node_count() <= 6000) {
        const WeakKamSolution wk =
            solve_weak_kam(kernel, cfg.delta_schedule, cfg.selection_tol);
        check(min_value(wk.calibration_defect) >= -1e-10,
              "calibration defect is one-sided (sub-action)", min_value(wk.calibration_defect),
              -1e-10);
        check(max_value(wk.calibration_defect) <= cfg.selection_tol,
              "calibration defect within solver tolerance", max_value(wk.calibration_defect),
              cfg.selection_tol);
        const double gap = supinf_gap(wk.u, kernel, wk.effective_action);
        check(std::fabs(gap) <= cfg.selection_tol,
              "sup-inf gap vanishes on a weak KAM solution", gap, cfg.selection_tol);
        check(discrete_lipschitz(wk.u) <= bounds.lipschitz_bound,
              "solution Lipschitz constant within the a-priori bound", discrete_lipschitz(wk.u),
              bounds.lipschitz_bound);
        const auto field = backward_lax_oleinik(wk.u, kernel).argmin;
        check(field.max_jump(grid.spacing()) <= tau * bounds.window_radius + 1e-12,
              "argmin jumps within tau * R", field.max_jump(grid.spacing()),
              tau * bounds.window_radius);
    }

    return out;
}

}  // namespace weakkam
