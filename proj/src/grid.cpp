#include "weakkam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace weakkam {

PeriodicGrid::PeriodicGrid(int dimension, int nodes_per_dim)
    : dim_(dimension), n_(nodes_per_dim), h_(1.0 / nodes_per_dim) {
    if (dimension < 1) throw Error("PeriodicGrid: dimension must be >= 1");
    if (nodes_per_dim < 4) throw Error("PeriodicGrid: need at least 4 nodes per dimension");
    count_ = 1;
    for (int k = 0; k < dim_; ++k) count_ *= static_cast<std::size_t>(n_);
}

void PeriodicGrid::multi_index(std::size_t linear, std::span<int> out) const {
    for (int k = dim_ - 1; k >= 0; --k) {
        out[k] = static_cast<int>(linear % static_cast<std::size_t>(n_));
        linear /= static_cast<std::size_t>(n_);
    }
}

std::size_t PeriodicGrid::linear_index(std::span<const int> multi) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim_; ++k) idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(wrap_axis(multi[k]));
    return idx;
}

void PeriodicGrid::coordinate(std::size_t linear, std::span<double> out) const {
    for (int k = dim_ - 1; k >= 0; --k) {
        out[k] = static_cast<double>(linear % static_cast<std::size_t>(n_)) * h_;
        linear /= static_cast<std::size_t>(n_);
    }
}

std::size_t PeriodicGrid::shift(std::size_t linear, std::span<const int> offset) const {
    std::size_t idx = 0;
    std::size_t rem = linear;
    std::size_t mult = count_;
    for (int k = 0; k < dim_; ++k) {
        mult /= static_cast<std::size_t>(n_);
        int c = static_cast<int>(rem / mult);
        rem %= mult;
        idx += static_cast<std::size_t>(wrap_axis(c + offset[k])) * mult;
    }
    return idx;
}

double dist_torus(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double d = std::fabs(x[k] - y[k]);
        d -= std::floor(d);
        d = std::min(d, 1.0 - d);
        s += d * d;
    }
    return std::sqrt(s);
}

GridFunction::GridFunction(const PeriodicGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != g.node_count())
        throw Error("GridFunction: value count does not match grid");
    for (double x : values)
        if (!std::isfinite(x)) throw Error("GridFunction: values must be finite");
}

double sup_norm_diff(const GridFunction& f, const GridFunction& g) {
    if (f.grid != g.grid) throw GridMismatch("sup_norm_diff: functions live on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::fabs(f[i] - g[i]));
    return m;
}

double min_value(const GridFunction& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

double max_value(const GridFunction& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

double mean_value(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s / static_cast<double>(f.size());
}

double oscillation(const GridFunction& f) { return max_value(f) - min_value(f); }

double discrete_lipschitz(const GridFunction& f) {
    const PeriodicGrid& g = f.grid;
    const double h = g.spacing();
    double m = 0.0;
    std::vector<int> off(g.dimension(), 0);
    for (int axis = 0; axis < g.dimension(); ++axis) {
        std::fill(off.begin(), off.end(), 0);
        off[axis] = 1;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            std::size_t j = g.shift(i, off);
            m = std::max(m, std::fabs(f[j] - f[i]) / h);
        }
    }
    return m;
}

GridFunction normalize_min_zero(const GridFunction& f) {
    GridFunction out = f;
    double m = min_value(f);
    for (double& v : out.values) v -= m;
    return out;
}

double interpolate(const GridFunction& f, std::span<const double> x) {
    const PeriodicGrid& g = f.grid;
    const int d = g.dimension();
    const int n = g.nodes_per_dim();
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int k = 0; k < d; ++k) {
        double xk = x[k] - std::floor(x[k]);
        double t = xk * n;
        int b = static_cast<int>(std::floor(t));
        base[k] = b % n;
        frac[k] = t - b;
    }
    // Sum over the 2^d corners of the containing cell.
    double acc = 0.0;
    std::vector<int> corner(d);
    const int corners = 1 << d;
    for (int mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            int bit = (mask >> k) & 1;
            corner[k] = base[k] + bit;
            w *= bit ? frac[k] : (1.0 - frac[k]);
        }
        acc += w * f[g.linear_index(corner)];
    }
    return acc;
}

GridFunction downsample(const GridFunction& fine, const PeriodicGrid& coarse) {
    const PeriodicGrid& gf = fine.grid;
    if (gf.dimension() != coarse.dimension())
        throw GridMismatch("downsample: dimension mismatch");
    if (gf.nodes_per_dim() % coarse.nodes_per_dim() != 0)
        throw GridMismatch("downsample: fine grid is not a refinement of the coarse grid");
    const int stride = gf.nodes_per_dim() / coarse.nodes_per_dim();
    GridFunction out(coarse);
    std::vector<int> mi(coarse.dimension());
    std::vector<int> fi(coarse.dimension());
    for (std::size_t i = 0; i < coarse.node_count(); ++i) {
        coarse.multi_index(i, mi);
        for (int k = 0; k < coarse.dimension(); ++k) fi[k] = mi[k] * stride;
        out[i] = fine[gf.linear_index(fi)];
    }
    return out;
}

GridFunction resample(const GridFunction& f, const PeriodicGrid& target) {
    if (f.grid == target) return f;
    if (f.grid.dimension() == target.dimension() &&
        f.grid.nodes_per_dim() % target.nodes_per_dim() == 0)
        return downsample(f, target);
    GridFunction out(target);
    std::vector<double> x(target.dimension());
    for (std::size_t i = 0; i < target.node_count(); ++i) {
        target.coordinate(i, x);
        out[i] = interpolate(f, x);
    }
    return out;
}

}  // namespace weakkam
