#include "weakkam/mather.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace weakkam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double HolonomicMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight;
    return s;
}

double HolonomicMeasure::holonomy_residual() const {
    std::vector<double> balance(grid.node_count(), 0.0);
    for (const auto& e : entries) {
        balance[e.node] += e.weight;
        balance[grid.shift(e.node, offset(e.slot))] -= e.weight;
    }
    double m = 0.0;
    for (double b : balance) m = std::max(m, std::fabs(b));
    return m;
}

double HolonomicMeasure::action(const ActionKernel& kernel) const {
    double s = 0.0;
    for (const auto& e : entries) s += kernel.weight(e.node, e.slot) * e.weight;
    return s;
}

std::vector<std::pair<std::size_t, double>> HolonomicMeasure::position_marginal() const {
    std::map<std::size_t, double> acc;
    for (const auto& e : entries) acc[e.node] += e.weight;
    return {acc.begin(), acc.end()};
}

namespace {

HolonomicMeasure make_measure(const ActionKernel& kernel, std::vector<MeasureEntry> entries) {
    std::sort(entries.begin(), entries.end(), [](const MeasureEntry& a, const MeasureEntry& b) {
        return a.node != b.node ? a.node < b.node : a.slot < b.slot;
    });
    HolonomicMeasure m{kernel.grid(), kernel.grid().dimension(), {}, std::move(entries)};
    const std::size_t len =
        static_cast<std::size_t>(kernel.offset_count()) * kernel.grid().dimension();
    m.offsets_flat.resize(len);
    for (int s = 0; s < kernel.offset_count(); ++s) {
        auto o = kernel.offset(s);
        std::copy(o.begin(), o.end(), m.offsets_flat.begin() + static_cast<std::size_t>(s) * m.dimension);
    }
    return m;
}

}  // namespace

ManePotential mane_potential(const ActionKernel& kernel, double effective_action,
                             std::size_t source) {
    const PeriodicGrid& g = kernel.grid();
    const std::size_t V = g.node_count();
    if (source >= V) throw Error("mane_potential: source node out of range");
    const double scale = 1.0 + std::fabs(effective_action);

    std::vector<double> value(V, kInf);
    value[source] = 0.0;
    std::vector<double> next(V);
    long sweeps = 0;
    while (true) {
        next = value;
        relax_min_plus(kernel, value, next, -effective_action);
        ++sweeps;
        double dec = 0.0;
        bool expanded = false;
        for (std::size_t i = 0; i < V; ++i) {
            if (!std::isfinite(next[i])) continue;
            if (!std::isfinite(value[i]))
                expanded = true;
            else
                dec = std::max(dec, value[i] - next[i]);
        }
        value.swap(next);
        if (!expanded && dec <= 1e-12 * scale) break;
        if (sweeps > static_cast<long>(V) + 8) {
            if (dec > 1e-9 * scale)
                throw NegativeCycle(
                    "mane_potential: reduced costs keep a strictly negative cycle; the "
                    "effective action is inconsistent with this kernel");
            if (sweeps > static_cast<long>(V) + 64) break;
        }
    }

    // Return chains of length >= 1 into the source.
    double r_with = kInf, r_excl = kInf;
    for (std::size_t x = 0; x < V; ++x) {
        if (!std::isfinite(value[x])) continue;
        for (int s = 0; s < kernel.offset_count(); ++s) {
            if (kernel.target(x, s) != source) continue;
            const double c = value[x] + (kernel.weight(x, s) - effective_action);
            r_with = std::min(r_with, c);
            if (!(x == source && s == kernel.zero_slot())) r_excl = std::min(r_excl, c);
        }
    }

    GridFunction phi(g);
    for (std::size_t i = 0; i < V; ++i) {
        if (!std::isfinite(value[i]))
            throw Error("mane_potential: node unreachable inside the window");
        phi[i] = value[i];
    }
    phi[source] = std::max(0.0, r_with);

    ManePotential out{std::move(phi), r_with, r_excl, source, sweeps};
    return out;
}

HolonomicMeasure minimizing_measure(const ActionKernel& kernel) {
    KarpResult karp = effective_action_karp(kernel);
    const double inv = 1.0 / static_cast<double>(karp.cycle_nodes.size());
    std::vector<MeasureEntry> entries;
    entries.reserve(karp.cycle_nodes.size());
    for (std::size_t i = 0; i < karp.cycle_nodes.size(); ++i)
        entries.push_back({karp.cycle_nodes[i], karp.cycle_slots[i], inv});
    return make_measure(kernel, std::move(entries));
}

std::vector<std::size_t> mather_set(const ActionKernel& kernel, double tolerance) {
    const PeriodicGrid& g = kernel.grid();
    const std::size_t V = g.node_count();
    if (V > 4096)
        throw Error("mather_set: dense closure route is limited to 4096 nodes");
    const double ebar = effective_action_karp(kernel).report.effective_action;

    // Reduced return cost: min over nontrivial cycles through v of
    // sum (E - Ebar).  A tolerance on the cycle MEAN would be degenerate
    // here, since arbitrarily long cycles through the minimizing cycle push
    // every connected node's best mean down to Ebar; the summed reduced
    // cost stays local and is monotone in the tolerance.
    std::vector<double> dist(V * V, kInf);
    for (std::size_t x = 0; x < V; ++x)
        for (int s = 0; s < kernel.offset_count(); ++s) {
            const std::size_t y = kernel.target(x, s);
            dist[x * V + y] = std::min(dist[x * V + y], kernel.weight(x, s) - ebar);
        }
    for (std::size_t k = 0; k < V; ++k)
        for (std::size_t i = 0; i < V; ++i) {
            const double dik = dist[i * V + k];
            if (!std::isfinite(dik)) continue;
            const double* dk = dist.data() + k * V;
            double* di = dist.data() + i * V;
            for (std::size_t j = 0; j < V; ++j) {
                const double c = dik + dk[j];
                if (c < di[j]) di[j] = c;
            }
        }

    std::vector<std::size_t> nodes;
    const double slack = 1e-12 * (1.0 + std::fabs(ebar));
    for (std::size_t v = 0; v < V; ++v)
        if (dist[v * V + v] <= tolerance + slack) nodes.push_back(v);
    return nodes;
}

CalibratedChain extract_calibrated_chain(const GridFunction& u, const ArgminField& argmin,
                                         const ActionKernel& kernel, std::size_t start, int K,
                                         double effective_action,
                                         std::optional<double> tau_delta) {
    if (u.grid != kernel.grid() || argmin.grid != kernel.grid())
        throw GridMismatch("extract_calibrated_chain: grid mismatch");
    if (start >= u.size()) throw Error("extract_calibrated_chain: start node out of range");
    const PeriodicGrid& g = kernel.grid();
    const int d = g.dimension();
    const double h = g.spacing();

    CalibratedChain chain;
    chain.dimension = d;
    chain.tau = kernel.tau();
    chain.node_indices.reserve(K + 1);
    chain.positions.resize(static_cast<std::size_t>(K + 1) * d);
    chain.step_slots.reserve(K);
    chain.defects.reserve(K);

    std::size_t cur = start;
    chain.node_indices.push_back(cur);
    g.coordinate(cur, std::span<double>(chain.positions.data(), d));
    std::vector<int> neg(d);
    for (int k = 0; k < K; ++k) {
        const int slot = argmin.best_slot[cur];
        auto off = argmin.offset_at(cur);
        for (int j = 0; j < d; ++j) neg[j] = -off[j];
        const std::size_t pred = g.shift(cur, neg);
        const double* pcur = chain.positions.data() + static_cast<std::size_t>(k) * d;
        double* ppred = chain.positions.data() + static_cast<std::size_t>(k + 1) * d;
        for (int j = 0; j < d; ++j) ppred[j] = pcur[j] - off[j] * h;

        const double e = kernel.weight(pred, slot);
        double defect;
        if (tau_delta)
            defect = e - u[cur] + (1.0 - *tau_delta) * u[pred];
        else
            defect = e - (u[cur] - u[pred]) - effective_action;
        chain.node_indices.push_back(pred);
        chain.step_slots.push_back(slot);
        chain.defects.push_back(defect);
        cur = pred;
    }
    return chain;
}

HolonomicMeasure discounted_occupation_measure(const CalibratedChain& chain,
                                               const ActionKernel& kernel, double tau_delta) {
    const int K = chain.steps();
    if (K < 1) throw ChainTooShort("discounted_occupation_measure: empty chain");
    const double a = 1.0 - tau_delta;
    if (std::pow(a, K) > 1e-12)
        throw ChainTooShort(
            "discounted_occupation_measure: (1-tau*delta)^K must not exceed 1e-12");

    std::map<std::pair<std::size_t, int>, double> acc;
    double total = 0.0;
    double geo = tau_delta;
    for (int k = 0; k < K; ++k) {
        // Step k is the edge x_{-k-1} -> x_{-k}.
        acc[{chain.node_indices[static_cast<std::size_t>(k) + 1], chain.step_slots[k]}] += geo;
        total += geo;
        geo *= a;
    }
    std::vector<MeasureEntry> entries;
    entries.reserve(acc.size());
    for (const auto& [key, w] : acc) entries.push_back({key.first, key.second, w / total});
    return make_measure(kernel, std::move(entries));
}

GridFunction selected_solution_dual(const ActionKernel& kernel, double effective_action,
                                    const std::vector<HolonomicMeasure>& measures) {
    if (measures.empty()) throw Error("selected_solution_dual: need at least one measure");
    const PeriodicGrid& g = kernel.grid();
    GridFunction out(g, kInf);
    std::map<std::size_t, GridFunction> phi_cache;
    for (const auto& mu : measures) {
        GridFunction value(g, 0.0);
        for (const auto& [node, mass] : mu.position_marginal()) {
            auto it = phi_cache.find(node);
            if (it == phi_cache.end())
                it = phi_cache.emplace(node, mane_potential(kernel, effective_action, node).phi)
                         .first;
            for (std::size_t y = 0; y < g.node_count(); ++y) value[y] += mass * it->second[y];
        }
        for (std::size_t y = 0; y < g.node_count(); ++y) out[y] = std::min(out[y], value[y]);
    }
    return out;
}

}  // namespace weakkam
