#pragma once

// Mane potentials, minimizing measures on the kernel graph, calibrated
// chains, and discounted occupation measures.
//
//   Phi(x,y) = inf over finite chains x -> y of sum (E - Ebar),
//
// computed by reduced-cost value iteration (Jacobi sweeps; reduced cycle
// weights are nonnegative when Ebar is the exact cycle minimum, so values
// are nonincreasing and stabilize).  Minimizing measures are the uniform
// edge measures of minimum-mean cycles, which are exactly the extreme
// points of the holonomic polytope on a finite graph.

#include <cstdint>
#include <optional>
#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/laxoleinik.hpp"
#include "weakkam/solvers.hpp"

namespace weakkam {

struct MeasureEntry {
    std::size_t node = 0;
    int slot = 0;
    double weight = 0.0;
};

// Nonnegative weights on (node, offset) edges; holonomic when the in- and
// out-marginals balance at every node.
struct HolonomicMeasure {
    PeriodicGrid grid;
    int dimension;
    std::vector<int> offsets_flat;          // offset table of the owning kernel
    std::vector<MeasureEntry> entries;      // sorted by (node, slot)

    std::span<const int> offset(int slot) const {
        return {offsets_flat.data() + static_cast<std::size_t>(slot) * dimension,
                static_cast<std::size_t>(dimension)};
    }
    double total_mass() const;
    // Max over nodes of |out-mass - in-mass|.
    double holonomy_residual() const;
    // Sum of weight * E over entries in sorted order.
    double action(const ActionKernel& kernel) const;
    // Position marginal as (node, mass), sorted by node.
    std::vector<std::pair<std::size_t, double>> position_marginal() const;
};

struct ManePotential {
    GridFunction phi;  // Phi(source, .); the source entry is the nontrivial
                       // return value capped below at zero
    double return_with_self_loop = 0.0;       // min over length >= 1 returns
    double return_excluding_self_loop = 0.0;  // returns not using the bare self-loop edge
    std::size_t source = 0;
    long sweeps = 0;
};

// Phi(source, .) by value iteration on reduced costs E - Ebar.  Throws
// NegativeCycle when the sweeps keep improving past the node count, which
// signals an Ebar above the true cycle minimum.
ManePotential mane_potential(const ActionKernel& kernel, double effective_action,
                             std::size_t source);

// Uniform edge-occupation measure on the minimum-mean cycle; its action
// reproduces the karp effective action bit for bit.
HolonomicMeasure minimizing_measure(const ActionKernel& kernel);

// Nodes lying on a cycle whose summed reduced cost sum(E - Ebar) is within
// `tolerance` of zero (all-pairs dense closure; intended for diagnostic
// grid sizes).  At tolerance 0 this is the support of the near-minimizing
// cycles; the summed form keeps the set local, a tolerance on the cycle
// mean would absorb every node connected to the minimizing cycle.
std::vector<std::size_t> mather_set(const ActionKernel& kernel, double tolerance);

struct CalibratedChain {
    int dimension = 1;
    double tau = 0.0;
    std::vector<std::size_t> node_indices;  // x_0, x_{-1}, ..., x_{-K}
    std::vector<double> positions;          // unwrapped coordinates, (K+1) x d
    std::vector<int> step_slots;            // slot of the edge x_{-k-1} -> x_{-k}
    std::vector<double> defects;            // per-step calibration defect

    int steps() const { return static_cast<int>(step_slots.size()); }
    std::span<const double> position(int k) const {
        return {positions.data() + static_cast<std::size_t>(k) * dimension,
                static_cast<std::size_t>(dimension)};
    }
};

// Walks the argmin field K steps backward from `start`, recording
// unwrapped increments and per-step defects
//   E - [u(x_{-k}) - u(x_{-k-1})] - Ebar            (plain), or
//   E - [u(x_{-k}) - (1 - tau delta) u(x_{-k-1})]   (discounted).
CalibratedChain extract_calibrated_chain(const GridFunction& u, const ArgminField& argmin,
                                         const ActionKernel& kernel, std::size_t start, int K,
                                         double effective_action,
                                         std::optional<double> tau_delta = std::nullopt);

// Edge weights tau*delta*(1-tau*delta)^k along a discounted calibrated
// chain, renormalized by the truncated geometric total.  The chain must be
// long enough that (1-tau*delta)^K <= 1e-12.
HolonomicMeasure discounted_occupation_measure(const CalibratedChain& chain,
                                               const ActionKernel& kernel, double tau_delta);

// u*(y) = min over measures of sum_x marginal(x) Phi(x,y).
GridFunction selected_solution_dual(const ActionKernel& kernel, double effective_action,
                                    const std::vector<HolonomicMeasure>& measures);

}  // namespace weakkam
