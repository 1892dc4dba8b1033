#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "weakkam/csv.hpp"
#include "weakkam/grid.hpp"

using namespace weakkam;
using weakkam::testing::random_function;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid construction and indexing") {
    CHECK_THROWS_AS(PeriodicGrid(1, 3), Error);
    PeriodicGrid g(2, 8);
    CHECK(g.node_count() == 64);
    CHECK(g.spacing() == doctest::Approx(0.125));
    std::vector<int> mi(2);
    g.multi_index(13, mi);
    CHECK(mi[0] == 1);
    CHECK(mi[1] == 5);
    CHECK(g.linear_index(mi) == 13);
    std::vector<int> off = {-2, 5};
    const std::size_t shifted = g.shift(13, off);
    g.multi_index(shifted, mi);
    CHECK(mi[0] == 7);  // 1 - 2 wraps
    CHECK(mi[1] == 2);  // 5 + 5 wraps
}

TEST_CASE("sup_norm_diff") {
    PeriodicGrid g(1, 8);
    GridFunction f(g, 1.0), z(g, 0.0);
    CHECK(sup_norm_diff(f, f) == 0.0);
    CHECK(sup_norm_diff(f, z) == 1.0);
    GridFunction s = sample(g, [](std::span<const double> x) {
        return std::sin(2.0 * kPi * x[0]);
    });
    CHECK(sup_norm_diff(s, z) == doctest::Approx(1.0));  // n divisible by 4
    PeriodicGrid g2(1, 16);
    CHECK_THROWS_AS(sup_norm_diff(f, GridFunction(g2)), GridMismatch);
}

TEST_CASE("oscillation") {
    PeriodicGrid g(1, 4);
    CHECK(oscillation(GridFunction(g, 3.0)) == 0.0);
    GridFunction f(g, {0.0, 1.0, 2.0, 1.0});
    CHECK(oscillation(f) == 2.0);
    PeriodicGrid g16(1, 16);
    GridFunction c = sample(g16, [](std::span<const double> x) {
        return std::cos(2.0 * kPi * x[0]);
    });
    CHECK(oscillation(c) == doctest::Approx(2.0));
}

TEST_CASE("discrete_lipschitz") {
    PeriodicGrid g(1, 64);
    CHECK(discrete_lipschitz(GridFunction(g, 7.0)) == 0.0);

    GridFunction saw = sample(g, [](std::span<const double> x) {
        double zero = 0.0;
        return dist_torus(x, std::span<const double>(&zero, 1));
    });
    CHECK(discrete_lipschitz(saw) == doctest::Approx(1.0));

    const double a = 0.7;
    GridFunction s = sample(g, [&](std::span<const double> x) {
        return a * std::sin(2.0 * kPi * x[0]);
    });
    CHECK(discrete_lipschitz(s) == doctest::Approx(2.0 * kPi * a).epsilon(0.02));

    // Adding a constant changes nothing.
    std::mt19937_64 rng(11);
    GridFunction f = random_function(g, rng);
    GridFunction fc = f;
    for (auto& v : fc.values) v += 4.25;
    CHECK(discrete_lipschitz(f) ==
          doctest::Approx(discrete_lipschitz(fc)).epsilon(1e-12));
}

TEST_CASE("normalize_min_zero") {
    PeriodicGrid g(1, 4);
    GridFunction c(g, 5.0);
    CHECK(oscillation(normalize_min_zero(c)) == 0.0);
    CHECK(min_value(normalize_min_zero(c)) == 0.0);
    GridFunction f(g, {1.0, 3.0, 1.0, 3.0});
    GridFunction n = normalize_min_zero(f);
    CHECK(n[0] == 0.0);
    CHECK(n[1] == 2.0);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        GridFunction r = random_function(g, rng, 5.0);
        GridFunction once = normalize_min_zero(r);
        GridFunction twice = normalize_min_zero(once);
        CHECK(sup_norm_diff(once, twice) == 0.0);
    }
}

TEST_CASE("torus distance") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int d : {1, 2}) {
        for (int t = 0; t < 200; ++t) {
            std::vector<double> x(d), y(d);
            for (int k = 0; k < d; ++k) {
                x[k] = dist(rng);
                y[k] = dist(rng);
            }
            const double dxy = dist_torus(x, y);
            CHECK(dxy <= 0.5 * std::sqrt(double(d)) + 1e-15);
            CHECK(dxy == dist_torus(y, x));
        }
    }
    double a = 0.1, b = 0.9;
    CHECK(dist_torus({&a, 1}, {&b, 1}) == doctest::Approx(0.2));
}

TEST_CASE("sup norm triangle inequality") {
    PeriodicGrid g(1, 32);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        GridFunction a = random_function(g, rng), b = random_function(g, rng),
                     c = random_function(g, rng);
        CHECK(sup_norm_diff(a, c) <= sup_norm_diff(a, b) + sup_norm_diff(b, c) + 1e-15);
    }
}

TEST_CASE("resampling") {
    PeriodicGrid fine(1, 64), coarse(1, 16);
    GridFunction f = sample(fine, [](std::span<const double> x) {
        return std::cos(2.0 * kPi * x[0]);
    });
    GridFunction down = downsample(f, coarse);
    for (std::size_t i = 0; i < coarse.node_count(); ++i)
        CHECK(down[i] == f[i * 4]);
    CHECK_THROWS_AS(downsample(f, PeriodicGrid(1, 24)), GridMismatch);

    // Interpolation reproduces node values and is exact for linear pieces.
    std::vector<double> x(1);
    for (std::size_t i = 0; i < fine.node_count(); ++i) {
        fine.coordinate(i, x);
        CHECK(interpolate(f, x) == doctest::Approx(f[i]).epsilon(1e-14));
    }
    GridFunction r = resample(f, PeriodicGrid(1, 24));
    CHECK(r.size() == 24);
}

TEST_CASE("grid function validation") {
    PeriodicGrid g(1, 4);
    CHECK_THROWS_AS(GridFunction(g, std::vector<double>{1.0, 2.0}), Error);
    CHECK_THROWS_AS(GridFunction(g, std::vector<double>{1.0, 2.0, std::nan(""), 0.0}), Error);
}

TEST_CASE("grid function csv round-trips doubles") {
    PeriodicGrid g(1, 4);
    GridFunction f(g, {0.1, -2.0 / 3.0, 1e-17, 4.0});
    std::ostringstream os;
    write_grid_function_csv(os, f);
    std::istringstream in(os.str());
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "index_0,x_0,value");
    for (std::size_t i = 0; i < 4; ++i) {
        std::getline(in, line);
        const auto last = line.rfind(',');
        CHECK(std::strtod(line.c_str() + last + 1, nullptr) == f[i]);
    }
}
