#include "weakkam/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace weakkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void wrap_unit(std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - std::floor(x[i]);
}

// Deterministic lattice walk over [0,1)^d with `per_axis` samples per axis.
template <typename F>
void for_each_lattice(int dim, int per_axis, F&& fn) {
    std::vector<int> idx(dim, 0);
    std::vector<double> x(dim, 0.0);
    const double step = 1.0 / per_axis;
    while (true) {
        for (int k = 0; k < dim; ++k) x[k] = idx[k] * step;
        fn(std::span<const double>(x));
        int k = dim - 1;
        while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
        if (k < 0) break;
    }
}

// Lattice over the centered box [-r, r]^d.
template <typename F>
void for_each_box(int dim, int per_axis, double r, F&& fn) {
    std::vector<int> idx(dim, 0);
    std::vector<double> v(dim, 0.0);
    const double step = 2.0 * r / (per_axis - 1);
    while (true) {
        for (int k = 0; k < dim; ++k) v[k] = -r + idx[k] * step;
        fn(std::span<const double>(v));
        int k = dim - 1;
        while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
        if (k < 0) break;
    }
}

}  // namespace

LagrangianModel LagrangianModel::mechanical(int dimension, double mass,
                                            std::vector<PotentialTerm> potential) {
    if (dimension < 1) throw Error("LagrangianModel: dimension must be >= 1");
    if (!(mass > 0.0)) throw Error("LagrangianModel: mass must be positive");
    for (const auto& t : potential)
        if (static_cast<int>(t.freq.size()) != dimension)
            throw Error("LagrangianModel: potential frequency vector has wrong dimension");
    LagrangianModel m;
    m.kind_ = Kind::QuadraticKineticPlusPotential;
    m.dim_ = dimension;
    m.mass_ = mass;
    m.potential_ = std::move(potential);
    m.scan_potential_extrema();
    return m;
}

LagrangianModel LagrangianModel::pendulum(double coupling) {
    const double a = coupling / (4.0 * std::numbers::pi * std::numbers::pi);
    return mechanical(1, 1.0, {{{0}, a, 0.0}, {{1}, -a, 0.0}});
}

LagrangianModel LagrangianModel::custom_table(
    int dimension,
    std::function<double(std::span<const double>, std::span<const double>)> table,
    double velocity_radius) {
    if (dimension < 1) throw Error("LagrangianModel: dimension must be >= 1");
    if (!table) throw Error("LagrangianModel: custom table is empty");
    if (!(velocity_radius > 0.0)) throw Error("LagrangianModel: velocity radius must be positive");
    LagrangianModel m;
    m.kind_ = Kind::CustomTable;
    m.dim_ = dimension;
    m.table_ = std::move(table);
    m.custom_radius_ = velocity_radius;
    m.v_min_ = 0.0;
    m.v_max_ = 0.0;
    m.v_argmin_.assign(dimension, 0.0);
    return m;
}

double LagrangianModel::potential(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : potential_) {
        double phase = 0.0;
        for (int k = 0; k < dim_; ++k) phase += t.freq[k] * x[k];
        phase *= kTwoPi;
        s += t.cos_coef * std::cos(phase) + t.sin_coef * std::sin(phase);
    }
    return s;
}

void LagrangianModel::potential_gradient(std::span<const double> x, std::span<double> out) const {
    for (int k = 0; k < dim_; ++k) out[k] = 0.0;
    for (const auto& t : potential_) {
        double phase = 0.0;
        for (int k = 0; k < dim_; ++k) phase += t.freq[k] * x[k];
        phase *= kTwoPi;
        const double d = -t.cos_coef * std::sin(phase) + t.sin_coef * std::cos(phase);
        for (int k = 0; k < dim_; ++k) out[k] += kTwoPi * t.freq[k] * d;
    }
}

void LagrangianModel::scan_potential_extrema() {
    const int per_axis = dim_ == 1 ? 4096 : (dim_ == 2 ? 256 : 32);
    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -std::numeric_limits<double>::infinity();
    std::vector<double> argmin(dim_, 0.0);
    for_each_lattice(dim_, per_axis, [&](std::span<const double> x) {
        const double v = potential(x);
        if (v < best_min) {
            best_min = v;
            std::copy(x.begin(), x.end(), argmin.begin());
        }
        best_max = std::max(best_max, v);
    });
    // Compass refinement around the scanned minimum.
    double step = 1.0 / per_axis;
    std::vector<double> x = argmin;
    std::vector<double> trial(dim_);
    double fx = best_min;
    while (step > 1e-12) {
        bool improved = false;
        for (int k = 0; k < dim_; ++k) {
            for (double s : {-step, step}) {
                trial = x;
                trial[k] += s;
                const double ft = potential(trial);
                if (ft < fx) {
                    fx = ft;
                    x = trial;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    v_min_ = fx;
    v_max_ = best_max;
    wrap_unit(x, x);
    v_argmin_ = x;
}

double LagrangianModel::lagrangian(std::span<const double> x, std::span<const double> v) const {
    if (kind_ == Kind::CustomTable) return table_(x, v);
    return 0.5 * mass_ * dot(v, v) + potential(x);
}

DiscreteAction::DiscreteAction(LagrangianModel m, double tau_, std::vector<double> p_)
    : model(std::move(m)), tau(tau_), p(std::move(p_)) {
    if (!(tau > 0.0 && tau <= 1.0)) throw Error("DiscreteAction: tau must lie in (0,1]");
    if (p.empty()) p.assign(model.dimension(), 0.0);
    if (static_cast<int>(p.size()) != model.dimension())
        throw Error("DiscreteAction: cohomology vector has wrong dimension");
}

double eval_lagrangian(const LagrangianModel& model, std::span<const double> x,
                       std::span<const double> v) {
    std::vector<double> xw(x.size());
    wrap_unit(x, xw);
    return model.lagrangian(xw, v);
}

double eval_action_displacement(const DiscreteAction& action, std::span<const double> x,
                                std::span<const double> delta) {
    const int d = action.model.dimension();
    std::vector<double> xw(d), v(d);
    wrap_unit(x, xw);
    for (int k = 0; k < d; ++k) v[k] = delta[k] / action.tau;
    return action.tau * action.model.lagrangian(xw, v) - dot(action.p, delta);
}

double eval_discrete_action(const DiscreteAction& action, std::span<const double> x,
                            std::span<const double> y) {
    std::vector<double> delta(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) delta[k] = y[k] - x[k];
    return eval_action_displacement(action, x, delta);
}

double legendre_transform(const LagrangianModel& model, std::span<const double> x,
                          std::span<const double> p) {
    if (model.kind() == LagrangianModel::Kind::QuadraticKineticPlusPotential) {
        std::vector<double> xw(x.size());
        wrap_unit(x, xw);
        return dot(p, p) / (2.0 * model.mass()) - model.potential(xw);
    }
    const int d = model.dimension();
    const double r = model.custom_velocity_radius();
    // Convexity scan along every axis before trusting the numerical sup.
    {
        const int m = 17;
        std::vector<double> v(d, 0.0), vm(d), vp(d);
        for (int axis = 0; axis < d; ++axis) {
            const double step = 2.0 * r / (m - 1);
            for (int i = 1; i + 1 < m; ++i) {
                std::fill(v.begin(), v.end(), 0.0);
                v[axis] = -r + i * step;
                vm = v;
                vp = v;
                vm[axis] -= step;
                vp[axis] += step;
                const double bend = model.lagrangian(x, vp) + model.lagrangian(x, vm) -
                                    2.0 * model.lagrangian(x, v);
                if (bend < -1e-9)
                    throw NonConvexModel("legendre_transform: velocity convexity scan failed");
            }
        }
    }
    // Coarse lattice scan followed by shrinking-box refinement.
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vbest(d, 0.0);
    for_each_box(d, 33, r, [&](std::span<const double> v) {
        const double val = dot(p, v) - model.lagrangian(x, v);
        if (val > best) {
            best = val;
            std::copy(v.begin(), v.end(), vbest.begin());
        }
    });
    double step = 2.0 * r / 32.0;
    std::vector<double> trial(d);
    while (step > 1e-10) {
        bool improved = false;
        for (int k = 0; k < d; ++k) {
            for (double s : {-step, step}) {
                trial = vbest;
                trial[k] += s;
                const double val = dot(p, trial) - model.lagrangian(x, trial);
                if (val > best) {
                    best = val;
                    vbest = trial;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

double eval_lagrangian(const LagrangianModel& model, double x, double v) {
    return eval_lagrangian(model, std::span<const double>(&x, 1), std::span<const double>(&v, 1));
}

double eval_discrete_action(const DiscreteAction& action, double x, double y) {
    return eval_discrete_action(action, std::span<const double>(&x, 1),
                                std::span<const double>(&y, 1));
}

double legendre_transform(const LagrangianModel& model, double x, double p) {
    return legendre_transform(model, std::span<const double>(&x, 1),
                              std::span<const double>(&p, 1));
}

AprioriBounds estimate_bounds(const DiscreteAction& action, double safety) {
    if (!(safety >= 1.0)) throw Error("estimate_bounds: safety factor must be >= 1");
    const int d = action.model.dimension();
    const double tau = action.tau;
    const int x_samples = d == 1 ? 512 : (d == 2 ? 96 : 16);
    const int v_samples = d == 1 ? 65 : (d == 2 ? 25 : 9);

    std::vector<double> delta(d);

    // Certified upper bound for the effective action: the diagonal minimum.
    double diag_min = std::numeric_limits<double>::infinity();
    double diag_max = -std::numeric_limits<double>::infinity();
    std::fill(delta.begin(), delta.end(), 0.0);
    for_each_lattice(d, x_samples, [&](std::span<const double> x) {
        const double e = eval_action_displacement(action, x, delta);
        diag_min = std::min(diag_min, e);
        diag_max = std::max(diag_max, e);
    });
    const double e_bar_est = diag_min;

    // C1 = 2 sup over the unit jump ball of (E - Ebar_est)/tau.
    double c1 = 0.0;
    for_each_lattice(d, x_samples, [&](std::span<const double> x) {
        for_each_box(d, v_samples, 1.0, [&](std::span<const double> v) {
            if (norm2(v) > 1.0 + 1e-12) return;
            for (int k = 0; k < d; ++k) delta[k] = tau * v[k];
            const double e = eval_action_displacement(action, x, delta);
            c1 = std::max(c1, 2.0 * (e - e_bar_est) / tau);
        });
    });

    // Radius ladder: smallest R > 1 whose superlinearity ratio clears C1
    // on the whole scanned band (tau R, tau R_scan].
    const double ladder_step = 0.25;
    const double ladder_ceiling = 16.0;
    const double r_scan = 2.0 * ladder_ceiling;
    const int radial_samples = 96;
    double window_radius = 0.0;
    for (double cand = 1.0 + ladder_step; cand <= ladder_ceiling + 1e-12; cand += ladder_step) {
        double worst = std::numeric_limits<double>::infinity();
        for (int ir = 0; ir < radial_samples && worst > c1; ++ir) {
            const double r = cand + (r_scan - cand) * (ir + 0.5) / radial_samples;
            for_each_lattice(d, d == 1 ? 64 : 16, [&](std::span<const double> x) {
                for_each_box(d, d == 1 ? 3 : 9, 1.0, [&](std::span<const double> dir) {
                    const double nd = norm2(dir);
                    if (nd < 1e-9) return;
                    for (int k = 0; k < d; ++k) delta[k] = tau * r * dir[k] / nd;
                    const double e = eval_action_displacement(action, x, delta);
                    worst = std::min(worst, (e - e_bar_est) / (tau * r));
                });
            });
        }
        if (worst > c1) {
            window_radius = cand;
            break;
        }
    }
    if (window_radius == 0.0)
        throw WindowSearchFailed(
            "estimate_bounds: no radius below the ladder ceiling passes the superlinearity test");
    window_radius *= safety;

    // Windowed Lipschitz constant in the second argument.
    double c2;
    if (action.model.kind() == LagrangianModel::Kind::QuadraticKineticPlusPotential) {
        double pnorm = norm2(action.p);
        c2 = action.model.mass() * (window_radius + 1.0) + pnorm;
    } else {
        c2 = 0.0;
        const double rr = window_radius + 1.0;
        std::vector<double> d2(d);
        for_each_lattice(d, 16, [&](std::span<const double> x) {
            for_each_box(d, 9, rr, [&](std::span<const double> v) {
                for (int k = 0; k < d; ++k) {
                    for (double s : {-0.5, 0.5}) {
                        for (int j = 0; j < d; ++j) {
                            delta[j] = tau * v[j];
                            d2[j] = delta[j];
                        }
                        d2[k] += tau * s * rr / 8.0;
                        const double e1 = eval_action_displacement(action, x, delta);
                        const double e2 = eval_action_displacement(action, x, d2);
                        c2 = std::max(c2, std::fabs(e2 - e1) / std::fabs(d2[k] - delta[k]));
                    }
                }
            });
        });
    }

    // inf E/tau over all displacements.
    double lower;
    if (action.model.kind() == LagrangianModel::Kind::QuadraticKineticPlusPotential) {
        const double pnorm = norm2(action.p);
        lower = action.model.potential_min() - pnorm * pnorm / (2.0 * action.model.mass());
    } else {
        lower = std::numeric_limits<double>::infinity();
        for_each_lattice(d, 32, [&](std::span<const double> x) {
            for_each_box(d, 33, action.model.custom_velocity_radius(),
                         [&](std::span<const double> v) {
                             for (int k = 0; k < d; ++k) delta[k] = tau * v[k];
                             lower = std::min(lower,
                                              eval_action_displacement(action, x, delta) / tau);
                         });
        });
    }

    AprioriBounds b;
    b.window_radius = window_radius;
    b.lipschitz_bound = std::max(c1, c2);
    b.action_lower = lower;
    b.diagonal_upper = diag_max / tau;
    return b;
}

}  // namespace weakkam
