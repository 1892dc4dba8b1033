#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "weakkam/laxoleinik.hpp"
#include "weakkam/models.hpp"

using namespace weakkam;
using weakkam::testing::kinetic_model;

namespace {
constexpr double kPi = std::numbers::pi;

// V(x) = 1 - cos(2 pi x).
LagrangianModel cosine_well() {
    return LagrangianModel::mechanical(1, 1.0, {{{0}, 1.0, 0.0}, {{1}, -1.0, 0.0}});
}
}  // namespace

TEST_CASE("eval_lagrangian") {
    CHECK(eval_lagrangian(kinetic_model(), 0.3, 2.0) == doctest::Approx(2.0));
    LagrangianModel m = cosine_well();
    CHECK(eval_lagrangian(m, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(eval_lagrangian(m, 0.5, 1.0) == doctest::Approx(2.5));
}

TEST_CASE("eval_discrete_action") {
    DiscreteAction free_action(kinetic_model(), 0.1, {0.0});
    CHECK(eval_discrete_action(free_action, 0.0, 0.05) == doctest::Approx(0.0125));
    DiscreteAction tilted(kinetic_model(), 0.1, {0.5});
    CHECK(eval_discrete_action(tilted, 0.0, 0.05) == doctest::Approx(-0.0125));
    DiscreteAction pend(LagrangianModel::pendulum(1.0), 0.2, {0.0});
    CHECK(eval_discrete_action(pend, 0.25, 0.25) ==
          doctest::Approx(0.2 / (4.0 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("translational periodicity is exact on quantized inputs") {
    DiscreteAction pend(LagrangianModel::pendulum(1.3), 0.15, {0.4});
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> q(0, (1L << 30) - 1);
    std::uniform_int_distribution<int> ki(-512, 512);
    for (int t = 0; t < 1000; ++t) {
        const double x = static_cast<double>(q(rng)) / (1L << 30);
        const double y = x + static_cast<double>(q(rng) % (1 << 20)) / (1L << 24) - 0.03125;
        const int k = ki(rng);
        CHECK(eval_discrete_action(pend, x + k, y + k) == eval_discrete_action(pend, x, y));
    }
}

TEST_CASE("legendre_transform closed form") {
    CHECK(legendre_transform(kinetic_model(), 0.0, 3.0) == doctest::Approx(4.5));
    CHECK(legendre_transform(cosine_well(), 0.5, 0.0) == doctest::Approx(-2.0));
    CHECK(legendre_transform(kinetic_model(2.0), 0.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("legendre duality round trip against dense scan") {
    LagrangianModel m = LagrangianModel::pendulum(2.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pd(-5.0, 5.0), xd(0.0, 1.0);
    for (int t = 0; t < 25; ++t) {
        const double x = xd(rng), p = pd(rng);
        const double closed = legendre_transform(m, x, p);
        double scan = -1e300;
        const double radius = std::fabs(p) + 2.0;
        for (int i = 0; i <= 40000; ++i) {
            const double v = -radius + 2.0 * radius * i / 40000.0;
            scan = std::max(scan, p * v - eval_lagrangian(m, x, v));
        }
        CHECK(std::fabs(closed - scan) <= 1e-6);
    }
}

TEST_CASE("custom table model") {
    auto table = [](std::span<const double> x, std::span<const double> v) {
        return 0.5 * v[0] * v[0] + 0.1 * std::cos(2.0 * kPi * x[0]);
    };
    LagrangianModel m = LagrangianModel::custom_table(1, table, 8.0);
    // Numerical sup matches the mechanical closed form.
    const double num = legendre_transform(m, 0.3, 1.5);
    const double closed = 0.5 * 1.5 * 1.5 - 0.1 * std::cos(2.0 * kPi * 0.3);
    CHECK(num == doctest::Approx(closed).epsilon(1e-7));

    auto concave = [](std::span<const double>, std::span<const double> v) {
        return -v[0] * v[0];
    };
    LagrangianModel bad = LagrangianModel::custom_table(1, concave, 4.0);
    CHECK_THROWS_AS(legendre_transform(bad, 0.0, 1.0), NonConvexModel);
}

TEST_CASE("estimate_bounds for the free particle") {
    DiscreteAction a(kinetic_model(), 0.1, {0.0});
    AprioriBounds b = estimate_bounds(a, 1.0);
    // Regression-locked scan results: the superlinearity ratio r/(2 tau)
    // clears C1 = 1 exactly beyond r = 2 tau.
    CHECK(b.window_radius == doctest::Approx(2.0));
    CHECK(b.action_lower == 0.0);
    CHECK(b.diagonal_upper == 0.0);
    CHECK(b.lipschitz_bound == doctest::Approx(3.0));
    CHECK(b.window_radius > 1.0);
    CHECK(b.action_lower <= b.diagonal_upper);
}

TEST_CASE("estimate_bounds for the pendulum") {
    DiscreteAction a(LagrangianModel::pendulum(1.0), 0.1, {0.0});
    AprioriBounds b = estimate_bounds(a);  // default safety 1.5
    CHECK(b.window_radius == doctest::Approx(3.375));  // regression-locked scan value
    CHECK(b.diagonal_upper == doctest::Approx(1.0 / (2.0 * kPi * kPi)).epsilon(1e-9));
    CHECK(b.action_lower == doctest::Approx(0.0));
    CHECK(b.lipschitz_bound > 0.0);
    CHECK_THROWS_AS(estimate_bounds(a, 0.5), Error);
}

TEST_CASE("window search fails for merely linear growth") {
    auto linear = [](std::span<const double>, std::span<const double> v) {
        return std::fabs(v[0]);
    };
    DiscreteAction a(LagrangianModel::custom_table(1, linear, 8.0), 0.1, {0.0});
    CHECK_THROWS_AS(estimate_bounds(a), WindowSearchFailed);
}

TEST_CASE("coercivity witness across tau") {
    LagrangianModel pend = LagrangianModel::pendulum(1.0);
    const double vmax = pend.potential_max();
    for (double tau : {0.05, 0.1, 0.2}) {
        DiscreteAction a(pend, tau, {0.25});
        AprioriBounds b = estimate_bounds(a);
        PeriodicGrid g(1, 128);
        ActionKernel k = tabulate_kernel(a, g, b);
        const double pnorm = 0.25;
        for (std::size_t i = 0; i < g.node_count(); i += 3)
            for (int s = 0; s < k.offset_count(); ++s) {
                const double r = k.offset_norm(s);
                const double floor =
                    0.5 * (r / tau) * (r / tau) - vmax - pnorm * r / tau;
                CHECK(k.weight(i, s) / tau >= floor - 1e-12);
            }
    }
}

TEST_CASE("two-dimensional mechanical model") {
    // V(x) = (1/4 pi^2) (2 - cos 2 pi x_0 - cos 2 pi x_1)
    const double c = 1.0 / (4.0 * kPi * kPi);
    LagrangianModel m = LagrangianModel::mechanical(
        2, 1.0, {{{0, 0}, 2.0 * c, 0.0}, {{1, 0}, -c, 0.0}, {{0, 1}, -c, 0.0}});
    CHECK(m.potential_min() == doctest::Approx(0.0).epsilon(1e-10));
    std::vector<double> x = {0.5, 0.5}, p = {1.0, -2.0};
    CHECK(legendre_transform(m, x, p) == doctest::Approx(2.5 - 4.0 * c));
    DiscreteAction a(m, 0.2, {0.0, 0.0});
    AprioriBounds b = estimate_bounds(a);
    CHECK(b.window_radius > 1.0);
    PeriodicGrid g(2, 16);
    ActionKernel k = tabulate_kernel(a, g, b);
    CHECK(k.offset_count() > 9);  // more than the immediate neighbours
    CHECK(k.weight(0, k.zero_slot()) == doctest::Approx(0.0));
}
