#pragma once

// Windowed min-plus engine.
//
// The discrete action is tabulated on grid-node pairs inside the a-priori
// window ||y-x|| <= tau R (minimizers never leave it), giving a kernel
//
//   weight(i, o) = E(x_i, x_i + o h),   offsets o in the torus ball,
//
// on which the backward / forward / discounted Lax-Oleinik operators and
// min-plus convolution run as direct loops.  Tie-breaking is by
// lexicographically smallest offset vector, so results are independent of
// evaluation order.

#include <cstdint>
#include <span>
#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/models.hpp"

namespace weakkam {

class ActionKernel {
public:
    // Raw constructor; weights are node-major (node index slow, offset slot
    // fast) and offsets must be lexicographically sorted integer vectors.
    ActionKernel(PeriodicGrid grid, double tau, double window_radius,
                 std::vector<int> offsets_flat, std::vector<double> weights);

    // Kernel with the zero offset only, carrying weight `diag` everywhere
    // (the tropical identity for diag = 0).
    static ActionKernel identity(const PeriodicGrid& grid, double diag = 0.0);

    const PeriodicGrid& grid() const { return grid_; }
    double tau() const { return tau_; }
    double window_radius() const { return radius_; }  // physical units
    int offset_count() const { return w_count_; }
    int zero_slot() const { return zero_slot_; }

    std::span<const int> offset(int slot) const {
        return {offsets_flat_.data() + static_cast<std::size_t>(slot) * grid_.dimension(),
                static_cast<std::size_t>(grid_.dimension())};
    }
    // Physical length of an offset, ||o|| h.
    double offset_norm(int slot) const { return offset_norms_[slot]; }

    double weight(std::size_t node, int slot) const {
        return weights_[node * static_cast<std::size_t>(w_count_) + slot];
    }
    std::span<const double> weights_row(std::size_t node) const {
        return {weights_.data() + node * static_cast<std::size_t>(w_count_),
                static_cast<std::size_t>(w_count_)};
    }
    std::span<const double> weights_all() const { return weights_; }

    std::size_t target(std::size_t node, int slot) const {
        return grid_.shift(node, offset(slot));
    }

    // Slot of an integer offset vector, -1 when outside the window.
    int slot_of(std::span<const int> offset) const;

    double min_weight() const;
    double min_diagonal_weight() const;
    std::size_t argmin_diagonal_node() const;

    // Mechanical actions split as weight(i,s) ~ node_part(i) + offset_part(s)
    // (equal up to one rounding of the tabulated value); the value-only
    // operator applications use the split to avoid streaming the full
    // weight table.
    bool separable() const { return separable_; }
    // True when d = 1 and the offsets form the full integer range
    // [o_min, o_max]; the streaming fast paths rely on it.
    bool contiguous_1d() const { return contiguous_1d_; }
    std::span<const double> node_part() const { return node_part_; }
    std::span<const double> offset_part() const { return offset_part_; }
    void set_separable(std::vector<double> node_part, std::vector<double> offset_part);

private:
    PeriodicGrid grid_;
    double tau_;
    double radius_;
    int w_count_ = 0;
    int zero_slot_ = -1;
    std::vector<int> offsets_flat_;
    std::vector<double> offset_norms_;
    std::vector<int> box_halfwidth_;   // per-axis bound M_k on |o_k|
    std::vector<int> box_lookup_;      // dense box -> slot (-1 outside ball)
    std::vector<double> weights_;
    bool separable_ = false;
    bool contiguous_1d_ = false;
    std::vector<double> node_part_;
    std::vector<double> offset_part_;

    void build_lookup();
};

// Offsets of the torus ball of the given physical radius (per-axis
// component capped at n/2; at the cap both signs are kept since they are
// distinct displacement lifts of the same node).
std::vector<int> ball_offsets(const PeriodicGrid& grid, double radius_phys);

// Tabulates E over the window radius bounds.window_radius * tau.
// Throws WindowTooSmall when h > tau * window_radius.
ActionKernel tabulate_kernel(const DiscreteAction& action, const PeriodicGrid& grid,
                             const AprioriBounds& bounds);

// Minimizing predecessor (or successor) directions recorded by an operator
// application; slots refer to the kernel that produced the field.
struct ArgminField {
    PeriodicGrid grid;
    int dimension;
    std::vector<int> offsets_flat;         // copy of the kernel's table
    std::vector<std::int32_t> best_slot;   // per node

    std::span<const int> offset_at(std::size_t node) const {
        return {offsets_flat.data() +
                    static_cast<std::size_t>(best_slot[node]) * dimension,
                static_cast<std::size_t>(dimension)};
    }
    // Largest recorded physical jump, max ||o h||.
    double max_jump(double spacing) const;
};

struct OperatorResult {
    GridFunction value;
    ArgminField argmin;
};

// T[u](y) = min_x { u(x) + E(x,y) } over the window.
OperatorResult backward_lax_oleinik(const GridFunction& u, const ActionKernel& kernel);

// u(x) -> max_y { u(y) - E(x,y) }.
OperatorResult forward_lax_oleinik(const GridFunction& u, const ActionKernel& kernel);

// T[u](y) = min_x { (1 - tau delta) u(x) + E(x,y) }.
OperatorResult discounted_lax_oleinik(const GridFunction& u, const ActionKernel& kernel,
                                      double delta);

// Value-only variants for solver inner loops (no argmin bookkeeping).
GridFunction backward_apply(const GridFunction& u, const ActionKernel& kernel);
GridFunction discounted_apply(const GridFunction& u, const ActionKernel& kernel, double delta);

// (a (x) b)(x,y) = min_z { a(x,z) + b(z,y) }; the result window is the sum
// of the two radii, capped at the torus half-width.
ActionKernel min_plus_convolve(const ActionKernel& a, const ActionKernel& b);

// N-fold min-plus power of the kernel of the tau/N sub-action, computed by
// repeated squaring; approximates the minimal action over time tau.
ActionKernel min_plus_power(const DiscreteAction& action, const PeriodicGrid& grid, int N);
ActionKernel min_plus_power(const DiscreteAction& action, const PeriodicGrid& grid, int N,
                            const AprioriBounds& sub_bounds);

// One backward relaxation sweep, out(y) := min(out(y), in(x) + w(x,o) + shift),
// recording predecessor nodes when `pred` is non-empty. Shared by the
// minimum-mean-cycle and reduced-cost solvers.
void relax_min_plus(const ActionKernel& kernel, std::span<const double> in,
                    std::span<double> out, double shift = 0.0,
                    std::span<std::int32_t> pred = {});

}  // namespace weakkam
