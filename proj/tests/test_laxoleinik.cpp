#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "weakkam/laxoleinik.hpp"

using namespace weakkam;
using namespace weakkam::testing;

namespace {
constexpr double kPi = std::numbers::pi;

ActionKernel pendulum_kernel(double tau, int n, double coupling = 1.0, double p = 0.0) {
    DiscreteAction a(LagrangianModel::pendulum(coupling), tau, {p});
    return tabulate_kernel(a, PeriodicGrid(1, n), estimate_bounds(a));
}
}  // namespace

TEST_CASE("kernel tabulation window") {
    DiscreteAction a(kinetic_model(), 0.1, {0.0});
    AprioriBounds b{2.0, 3.0, 0.0, 0.0};
    PeriodicGrid g(1, 100);
    ActionKernel k = tabulate_kernel(a, g, b);
    CHECK(k.offset_count() == 41);  // offsets -20..20
    CHECK(k.offset(0)[0] == -20);
    CHECK(k.offset(40)[0] == 20);
    CHECK(k.zero_slot() == 20);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        CHECK(k.weight(i, k.zero_slot()) == 0.0);  // L(x, 0) = 0

    ActionKernel pend = pendulum_kernel(0.1, 100);
    CHECK(pend.weight(0, pend.zero_slot()) == 0.0);  // V(0) = 0

    // Re-tabulation reproduces identical weights.
    ActionKernel again = tabulate_kernel(a, g, b);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        for (int s = 0; s < k.offset_count(); ++s)
            CHECK(k.weight(i, s) == again.weight(i, s));
}

TEST_CASE("window too small") {
    DiscreteAction a(kinetic_model(), 0.1, {0.0});
    AprioriBounds b{2.0, 3.0, 0.0, 0.0};
    CHECK_THROWS_AS(tabulate_kernel(a, PeriodicGrid(1, 4), b), WindowTooSmall);
}

TEST_CASE("backward operator basics") {
    PeriodicGrid g(1, 64);
    DiscreteAction a(kinetic_model(), 0.1, {0.0});
    ActionKernel k = tabulate_kernel(a, g, estimate_bounds(a));
    GridFunction zero(g, 0.0);
    auto res = backward_lax_oleinik(zero, k);
    CHECK(sup_norm_diff(res.value, zero) == 0.0);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        CHECK(res.argmin.best_slot[i] == k.zero_slot());

    // Constants pass through as c + pointwise window minimum.
    GridFunction c(g, 2.5);
    auto resc = backward_lax_oleinik(c, k);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        CHECK(resc.value[i] == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("backward operator matches the dense oracle on a tiny grid") {
    PeriodicGrid g(1, 8);
    DiscreteAction a(LagrangianModel::pendulum(1.0), 0.25, {0.0});
    ActionKernel k = tabulate_kernel(a, g, estimate_bounds(a));
    GridFunction u = sample(g, [](std::span<const double> x) {
        return std::cos(2.0 * kPi * x[0]);
    });
    GridFunction expect = dense_backward_oracle(u, a);
    auto res = backward_lax_oleinik(u, k);
    CHECK(sup_norm_diff(res.value, expect) <= 1e-13);
}

TEST_CASE("forward operator") {
    PeriodicGrid g(1, 64);
    DiscreteAction a(kinetic_model(), 0.1, {0.0});
    ActionKernel k = tabulate_kernel(a, g, estimate_bounds(a));
    GridFunction zero(g, 0.0);
    auto res = forward_lax_oleinik(zero, k);
    CHECK(sup_norm_diff(res.value, zero) == 0.0);
    GridFunction c(g, 1.5);
    auto resc = forward_lax_oleinik(c, k);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        CHECK(resc.value[i] == doctest::Approx(1.5).epsilon(1e-15));

    // Exhaustive check on a tiny pendulum grid.
    PeriodicGrid g8(1, 8);
    DiscreteAction pa(LagrangianModel::pendulum(1.0), 0.25, {0.0});
    ActionKernel pk = tabulate_kernel(pa, g8, estimate_bounds(pa));
    std::mt19937_64 rng(31);
    GridFunction u = random_function(g8, rng);
    auto fwd = forward_lax_oleinik(u, pk);
    std::vector<double> xc(1), yc(1), ylift(1);
    for (std::size_t x = 0; x < g8.node_count(); ++x) {
        g8.coordinate(x, xc);
        double best = -1e300;
        for (std::size_t y = 0; y < g8.node_count(); ++y) {
            g8.coordinate(y, yc);
            for (int m = -2; m <= 2; ++m) {
                ylift[0] = yc[0] + m;
                best = std::max(best, u[y] - eval_discrete_action(pa, xc, ylift));
            }
        }
        CHECK(fwd.value[x] == doctest::Approx(best).epsilon(1e-13));
    }
}

TEST_CASE("argmin ties break to the lexicographically smallest offset") {
    PeriodicGrid g(1, 8);
    std::vector<int> offsets = {-1, 0, 1};
    std::vector<double> w(8 * 3, 1.0);  // every candidate ties
    ActionKernel k(g, 0.1, 0.125, offsets, w);
    GridFunction zero(g, 0.0);
    auto res = backward_lax_oleinik(zero, k);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        CHECK(res.argmin.offset_at(i)[0] == -1);
        CHECK(res.value[i] == 1.0);
    }
}

TEST_CASE("discounted operator") {
    PeriodicGrid g(1, 64);
    ActionKernel k = pendulum_kernel(0.1, 64);
    GridFunction zero(g, 0.0);
    CHECK_THROWS_AS(discounted_lax_oleinik(zero, k, 20.0), InvalidDiscount);

    DiscreteAction freea(kinetic_model(), 0.1, {0.0});
    ActionKernel freek = tabulate_kernel(freea, g, estimate_bounds(freea));
    auto res = discounted_lax_oleinik(zero, freek, 0.5);
    CHECK(sup_norm_diff(res.value, zero) == 0.0);

    GridFunction c(g, 3.0);
    auto resc = discounted_lax_oleinik(c, k, 0.5);
    const double td = 0.1 * 0.5;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double wmin = 1e300;
        for (int s = 0; s < k.offset_count(); ++s) {
            const std::size_t x = k.grid().shift(i, std::vector<int>{-k.offset(s)[0]});
            wmin = std::min(wmin, k.weight(x, s));
        }
        CHECK(resc.value[i] == doctest::Approx((1.0 - td) * 3.0 + wmin).epsilon(1e-14));
    }

    // Contraction with the exact factor.
    std::mt19937_64 rng(41);
    for (double delta : {0.5, 0.1}) {
        for (int t = 0; t < 50; ++t) {
            GridFunction u = random_function(g, rng), v = random_function(g, rng);
            const double lhs = sup_norm_diff(discounted_apply(u, k, delta),
                                             discounted_apply(v, k, delta));
            CHECK(lhs <= (1.0 - 0.1 * delta) * sup_norm_diff(u, v) + 1e-14);
        }
    }
}

TEST_CASE("operator laws") {
    PeriodicGrid g(1, 64);
    ActionKernel k = pendulum_kernel(0.1, 64);
    std::mt19937_64 rng(6);
    for (int t = 0; t < 25; ++t) {
        GridFunction u = random_function(g, rng);
        GridFunction bump = random_function(g, rng, 0.5);
        GridFunction v = u;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::fabs(bump[i]);
        GridFunction tu = backward_apply(u, k), tv = backward_apply(v, k);
        for (std::size_t i = 0; i < tu.size(); ++i) CHECK(tu[i] <= tv[i] + 1e-15);
        CHECK(sup_norm_diff(tu, tv) <= sup_norm_diff(u, v) + 1e-15);

        GridFunction uc = u;
        for (auto& x : uc.values) x += 1.75;
        GridFunction tuc = backward_apply(uc, k);
        for (std::size_t i = 0; i < tu.size(); ++i)
            CHECK(tuc[i] == doctest::Approx(tu[i] + 1.75).epsilon(1e-14));

        GridFunction m(g);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(u[i], v[i]);
        GridFunction tm = backward_apply(m, k);
        for (std::size_t i = 0; i < tm.size(); ++i)
            CHECK(tm[i] == std::min(tu[i], tv[i]));
    }
}

TEST_CASE("min-plus convolution with the identity") {
    ActionKernel a = pendulum_kernel(0.1, 64);
    ActionKernel id = ActionKernel::identity(a.grid());
    ActionKernel c = min_plus_convolve(a, id);
    REQUIRE(c.offset_count() == a.offset_count());
    for (std::size_t i = 0; i < a.grid().node_count(); ++i)
        for (int s = 0; s < a.offset_count(); ++s)
            CHECK(c.weight(i, s) == a.weight(i, s));
}

TEST_CASE("free particle convolution takes the midpoint") {
    PeriodicGrid g(1, 128);
    DiscreteAction a(kinetic_model(), 0.1, {0.0});
    ActionKernel k = tabulate_kernel(a, g, estimate_bounds(a, 1.0));
    ActionKernel two = min_plus_convolve(k, k);
    CHECK(two.tau() == doctest::Approx(0.2));
    const double h = g.spacing();
    for (int s = 0; s < two.offset_count(); ++s) {
        const int o = two.offset(s)[0];
        const double direct = (o % 2 == 0)
                                  ? (o * h) * (o * h) / (4.0 * 0.1)
                                  : (((o - 1) / 2.0 * h) * ((o - 1) / 2.0 * h) +
                                     ((o + 1) / 2.0 * h) * ((o + 1) / 2.0 * h)) /
                                        (2.0 * 0.1);
        CHECK(two.weight(17, s) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("convolution matches the dense triple loop on a small grid") {
    PeriodicGrid g(1, 16);
    DiscreteAction a(LagrangianModel::pendulum(1.0), 0.05, {0.2});
    AprioriBounds b{2.0, 3.0, 0.0, 0.0};  // radius 0.1: windows stay below half-width
    ActionKernel k = tabulate_kernel(a, g, b);
    ActionKernel c = min_plus_convolve(k, k);
    const std::size_t n = g.node_count();
    auto ka = dense_matrix(k);
    auto dense = dense_min_plus(ka, ka, n);
    for (std::size_t x = 0; x < n; ++x)
        for (int s = 0; s < c.offset_count(); ++s) {
            const std::size_t y = c.target(x, s);
            CHECK(c.weight(x, s) == doctest::Approx(dense[x * n + y]).epsilon(1e-13));
        }
}

TEST_CASE("min-plus associativity is exact on a tiny grid") {
    PeriodicGrid g(1, 16);
    DiscreteAction a(LagrangianModel::pendulum(1.0), 0.05, {0.0});
    AprioriBounds b{2.0, 3.0, 0.0, 0.0};
    ActionKernel k = tabulate_kernel(a, g, b);
    ActionKernel left = min_plus_convolve(min_plus_convolve(k, k), k);
    ActionKernel right = min_plus_convolve(k, min_plus_convolve(k, k));
    REQUIRE(left.offset_count() == right.offset_count());
    for (std::size_t i = 0; i < g.node_count(); ++i)
        for (int s = 0; s < left.offset_count(); ++s)
            CHECK(left.weight(i, s) == right.weight(i, s));
}

TEST_CASE("min_plus_power") {
    LagrangianModel pend = LagrangianModel::pendulum(1.0);
    DiscreteAction a(pend, 0.2, {0.0});
    PeriodicGrid g(1, 1024);
    CHECK_THROWS_AS(min_plus_power(a, g, 3), Error);

    AprioriBounds sub = estimate_bounds(DiscreteAction(pend, 0.2, {0.0}));
    ActionKernel p1 = min_plus_power(a, g, 1, sub);
    ActionKernel direct = tabulate_kernel(a, g, sub);
    REQUIRE(p1.offset_count() == direct.offset_count());
    for (std::size_t i = 0; i < g.node_count(); i += 13)
        for (int s = 0; s < p1.offset_count(); ++s)
            CHECK(p1.weight(i, s) == direct.weight(i, s));

    // Pure kinetic: straight lines are exact minimizers, so the N-fold power
    // reproduces tau * (1/2)(o h / tau)^2 on offsets the sub-grid can split.
    DiscreteAction free_action(kinetic_model(), 0.2, {0.0});
    AprioriBounds fb = estimate_bounds(DiscreteAction(kinetic_model(), 0.05, {0.0}), 1.0);
    ActionKernel p4 = min_plus_power(free_action, g, 4, fb);
    const double h = g.spacing();
    for (int s = 0; s < p4.offset_count(); ++s) {
        const int o = p4.offset(s)[0];
        if (o % 4 != 0) continue;
        CHECK(p4.weight(3, s) ==
              doctest::Approx((o * h) * (o * h) / (2.0 * 0.2)).epsilon(1e-12));
    }
}

TEST_CASE("minimal action approximation stays within tau^2 of the one-step action") {
    // Regression-locked comparison constant: measured max ratio is ~0.17,
    // locked bound 0.2.
    LagrangianModel pend = LagrangianModel::pendulum(1.0);
    DiscreteAction a(pend, 0.2, {0.0});
    PeriodicGrid g(1, 1024);
    AprioriBounds sub = estimate_bounds(DiscreteAction(pend, 0.2 / 16, {0.0}));
    ActionKernel power = min_plus_power(a, g, 16, sub);
    ActionKernel lker = tabulate_kernel(a, g, estimate_bounds(a));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        for (int s = 0; s < power.offset_count(); ++s) {
            const int ls = lker.slot_of(power.offset(s));
            if (ls < 0) continue;
            worst = std::max(worst, std::fabs(power.weight(i, s) - lker.weight(i, ls)));
        }
    CHECK(worst <= 0.2 * 0.2 * 0.2);
    CHECK(worst > 0.0);
}

TEST_CASE("semi-concavity probe on the minimal action approximation") {
    // Second differences across the window obey tau * d2 / h'^2 <= C with
    // C locked at 16.5 (the sub-step count times the mass, measured 16).
    LagrangianModel pend = LagrangianModel::pendulum(1.0);
    DiscreteAction a(pend, 0.2, {0.0});
    PeriodicGrid g(1, 400);
    AprioriBounds sub = estimate_bounds(DiscreteAction(pend, 0.2 / 16, {0.0}));
    ActionKernel power = min_plus_power(a, g, 16, sub);
    const double h = g.spacing();
    for (int stride : {1, 2, 4, 8, 16}) {
        double worst = 0.0;
        for (std::size_t i = 0; i < g.node_count(); i += 7)
            for (int s = stride; s + stride < power.offset_count(); ++s) {
                const double d2 = power.weight(i, s + stride) + power.weight(i, s - stride) -
                                  2.0 * power.weight(i, s);
                worst = std::max(worst, d2 * 0.2 / (stride * h * stride * h));
            }
        CHECK(worst <= 16.5 + 1e-9);
    }
}

TEST_CASE("discounted argmin jumps stay inside the window as delta shrinks") {
    ActionKernel k = pendulum_kernel(0.1, 256);
    PeriodicGrid g = k.grid();
    GridFunction u(g, 0.0);
    const double bound = k.window_radius() + 1e-12;
    double first = 0.0, last = 0.0;
    for (double delta : {0.4, 0.2, 0.1, 0.05, 0.025}) {
        for (int t = 0; t < 120; ++t) u = discounted_apply(u, k, delta);
        auto res = discounted_lax_oleinik(u, k, delta);
        const double jump = res.argmin.max_jump(g.spacing());
        CHECK(jump <= bound);
        if (delta == 0.4) first = jump;
        last = jump;
    }
    CHECK(last <= first + 2.0 * g.spacing());
}
