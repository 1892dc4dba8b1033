#pragma once

// Uniform periodic grids on the unit torus [0,1)^d, sampled functions on
// them, and the sup-norm / oscillation / discrete-Lipschitz estimators used
// by every a-priori-bound check.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "weakkam/errors.hpp"

namespace weakkam {

// Equal node count per axis; node i has coordinate i*h with h = 1/n.
class PeriodicGrid {
public:
    PeriodicGrid(int dimension, int nodes_per_dim);

    int dimension() const { return dim_; }
    int nodes_per_dim() const { return n_; }
    double spacing() const { return h_; }
    std::size_t node_count() const { return count_; }

    bool operator==(const PeriodicGrid& other) const {
        return dim_ == other.dim_ && n_ == other.n_;
    }
    bool operator!=(const PeriodicGrid& other) const { return !(*this == other); }

    // Linear index is row-major in (index_0, ..., index_{d-1}).
    void multi_index(std::size_t linear, std::span<int> out) const;
    std::size_t linear_index(std::span<const int> multi) const;

    // Coordinate of a node, written into out (size d).
    void coordinate(std::size_t linear, std::span<double> out) const;

    // Wraps node + integer offset back onto the torus.
    std::size_t shift(std::size_t linear, std::span<const int> offset) const;

    int wrap_axis(int i) const {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }

private:
    int dim_;
    int n_;
    double h_;
    std::size_t count_;
};

// Flat-torus distance between two points of [0,1)^d (shorter way around
// per axis, Euclidean across axes).
double dist_torus(std::span<const double> x, std::span<const double> y);

struct GridFunction {
    PeriodicGrid grid;
    std::vector<double> values;

    GridFunction(const PeriodicGrid& g, double fill = 0.0)
        : grid(g), values(g.node_count(), fill) {}
    GridFunction(const PeriodicGrid& g, std::vector<double> v);

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    std::size_t size() const { return values.size(); }
};

double sup_norm_diff(const GridFunction& f, const GridFunction& g);
double oscillation(const GridFunction& f);
double min_value(const GridFunction& f);
double max_value(const GridFunction& f);
double mean_value(const GridFunction& f);

// Max over axis-adjacent node pairs (wrap-around included) of
// |f(y)-f(x)| / dist_torus(x,y).
double discrete_lipschitz(const GridFunction& f);

GridFunction normalize_min_zero(const GridFunction& f);

// Samples a scalar callable at every node.
template <typename F>
GridFunction sample(const PeriodicGrid& grid, F&& f) {
    GridFunction out(grid);
    std::vector<double> x(grid.dimension());
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        grid.coordinate(i, x);
        out[i] = f(std::span<const double>(x));
    }
    return out;
}

// Multilinear periodic interpolation (diagnostic use only; the solvers
// minimize over nodes).
double interpolate(const GridFunction& f, std::span<const double> x);

// Exact restriction to a coarser grid whose node set is a subset of the
// fine one (n_fine must be a multiple of n_coarse).
GridFunction downsample(const GridFunction& fine, const PeriodicGrid& coarse);

// Restriction when nested, multilinear interpolation otherwise.
GridFunction resample(const GridFunction& f, const PeriodicGrid& target);

}  // namespace weakkam
