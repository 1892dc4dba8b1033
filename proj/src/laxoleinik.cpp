#include "weakkam/laxoleinik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weakkam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(std::span<const int> a, std::span<const int> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

ActionKernel::ActionKernel(PeriodicGrid grid, double tau, double window_radius,
                           std::vector<int> offsets_flat, std::vector<double> weights)
    : grid_(grid),
      tau_(tau),
      radius_(window_radius),
      offsets_flat_(std::move(offsets_flat)),
      weights_(std::move(weights)) {
    const int d = grid_.dimension();
    if (offsets_flat_.empty() || offsets_flat_.size() % static_cast<std::size_t>(d) != 0)
        throw Error("ActionKernel: malformed offset table");
    w_count_ = static_cast<int>(offsets_flat_.size() / static_cast<std::size_t>(d));
    if (weights_.size() != grid_.node_count() * static_cast<std::size_t>(w_count_))
        throw Error("ActionKernel: weight count does not match grid x offsets");
    for (double w : weights_)
        if (!std::isfinite(w)) throw Error("ActionKernel: weights must be finite");
    for (int s = 1; s < w_count_; ++s)
        if (!lex_less(offset(s - 1), offset(s)))
            throw Error("ActionKernel: offsets must be lexicographically sorted and unique");
    offset_norms_.resize(w_count_);
    for (int s = 0; s < w_count_; ++s) {
        double q = 0.0;
        for (int k = 0; k < d; ++k) {
            double c = offset(s)[k] * grid_.spacing();
            q += c * c;
        }
        offset_norms_[s] = std::sqrt(q);
        bool zero = true;
        for (int k = 0; k < d; ++k) zero = zero && offset(s)[k] == 0;
        if (zero) zero_slot_ = s;
    }
    if (zero_slot_ < 0) throw Error("ActionKernel: the zero offset must be included");
    contiguous_1d_ = d == 1 && offset(w_count_ - 1)[0] - offset(0)[0] == w_count_ - 1;
    build_lookup();
}

void ActionKernel::build_lookup() {
    const int d = grid_.dimension();
    box_halfwidth_.assign(d, 0);
    for (int s = 0; s < w_count_; ++s)
        for (int k = 0; k < d; ++k)
            box_halfwidth_[k] = std::max(box_halfwidth_[k], std::abs(offset(s)[k]));
    std::size_t box = 1;
    for (int k = 0; k < d; ++k) box *= static_cast<std::size_t>(2 * box_halfwidth_[k] + 1);
    box_lookup_.assign(box, -1);
    for (int s = 0; s < w_count_; ++s) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k)
            idx = idx * static_cast<std::size_t>(2 * box_halfwidth_[k] + 1) +
                  static_cast<std::size_t>(offset(s)[k] + box_halfwidth_[k]);
        box_lookup_[idx] = s;
    }
}

int ActionKernel::slot_of(std::span<const int> off) const {
    const int d = grid_.dimension();
    std::size_t idx = 0;
    for (int k = 0; k < d; ++k) {
        if (std::abs(off[k]) > box_halfwidth_[k]) return -1;
        idx = idx * static_cast<std::size_t>(2 * box_halfwidth_[k] + 1) +
              static_cast<std::size_t>(off[k] + box_halfwidth_[k]);
    }
    return box_lookup_[idx];
}

void ActionKernel::set_separable(std::vector<double> node_part,
                                 std::vector<double> offset_part) {
    if (node_part.size() != grid_.node_count() ||
        offset_part.size() != static_cast<std::size_t>(w_count_))
        throw Error("ActionKernel: separable part sizes do not match");
    node_part_ = std::move(node_part);
    offset_part_ = std::move(offset_part);
    separable_ = true;
}

ActionKernel ActionKernel::identity(const PeriodicGrid& grid, double diag) {
    std::vector<int> zero(grid.dimension(), 0);
    std::vector<double> w(grid.node_count(), diag);
    return ActionKernel(grid, 0.0, 0.0, zero, std::move(w));
}

double ActionKernel::min_weight() const {
    return *std::min_element(weights_.begin(), weights_.end());
}

double ActionKernel::min_diagonal_weight() const {
    double m = kInf;
    for (std::size_t i = 0; i < grid_.node_count(); ++i) m = std::min(m, weight(i, zero_slot_));
    return m;
}

std::size_t ActionKernel::argmin_diagonal_node() const {
    std::size_t best = 0;
    double m = kInf;
    for (std::size_t i = 0; i < grid_.node_count(); ++i) {
        const double w = weight(i, zero_slot_);
        if (w < m) {
            m = w;
            best = i;
        }
    }
    return best;
}

std::vector<int> ball_offsets(const PeriodicGrid& grid, double radius_phys) {
    const int d = grid.dimension();
    const int n = grid.nodes_per_dim();
    const double h = grid.spacing();
    const double r2 = radius_phys * radius_phys * (1.0 + 1e-12) + 1e-300;
    const int cap = n / 2;
    const int m = std::min(static_cast<int>(std::floor(radius_phys / h + 1e-12)), cap);
    std::vector<int> out;
    std::vector<int> idx(d, -m);
    while (true) {
        double q = 0.0;
        for (int k = 0; k < d; ++k) {
            double c = idx[k] * h;
            q += c * c;
        }
        if (q <= r2) out.insert(out.end(), idx.begin(), idx.end());
        int k = d - 1;
        while (k >= 0 && ++idx[k] > m) idx[k--] = -m;
        if (k < 0) break;
    }
    return out;
}

ActionKernel tabulate_kernel(const DiscreteAction& action, const PeriodicGrid& grid,
                             const AprioriBounds& bounds) {
    const double radius = bounds.window_radius * action.tau;
    if (grid.spacing() > radius)
        throw WindowTooSmall("tabulate_kernel: h > tau * window_radius, refine the grid");
    const int d = grid.dimension();
    std::vector<int> offsets = ball_offsets(grid, radius);
    const int w_count = static_cast<int>(offsets.size() / static_cast<std::size_t>(d));
    std::vector<double> deltas(offsets.size());
    for (std::size_t j = 0; j < offsets.size(); ++j) deltas[j] = offsets[j] * grid.spacing();
    std::vector<double> weights(grid.node_count() * static_cast<std::size_t>(w_count));
    std::vector<double> x(d);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        grid.coordinate(i, x);
        double* row = weights.data() + i * static_cast<std::size_t>(w_count);
        for (int s = 0; s < w_count; ++s) {
            std::span<const double> delta(deltas.data() + static_cast<std::size_t>(s) * d,
                                          static_cast<std::size_t>(d));
            row[s] = eval_action_displacement(action, x, delta);
        }
    }
    ActionKernel kernel(grid, action.tau, radius, std::move(offsets), std::move(weights));
    if (action.model.kind() == LagrangianModel::Kind::QuadraticKineticPlusPotential) {
        std::vector<double> node_part(grid.node_count());
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            grid.coordinate(i, x);
            node_part[i] = action.tau * action.model.potential(x);
        }
        std::vector<double> offset_part(static_cast<std::size_t>(w_count));
        for (int s = 0; s < w_count; ++s) {
            double kin = 0.0, pdot = 0.0;
            for (int k = 0; k < d; ++k) {
                const double dk = deltas[static_cast<std::size_t>(s) * d + k];
                kin += (dk / action.tau) * (dk / action.tau);
                pdot += action.p[k] * dk;
            }
            offset_part[s] = action.tau * 0.5 * action.model.mass() * kin - pdot;
        }
        kernel.set_separable(std::move(node_part), std::move(offset_part));
    }
    return kernel;
}

double ArgminField::max_jump(double spacing) const {
    double m = 0.0;
    for (std::size_t i = 0; i < best_slot.size(); ++i) {
        double q = 0.0;
        auto off = offset_at(i);
        for (int k = 0; k < dimension; ++k) {
            double c = off[k] * spacing;
            q += c * c;
        }
        m = std::max(m, q);
    }
    return std::sqrt(m);
}

namespace {

// Shared scatter core: out(y) = min over (x, slot) of scale*u(x) + w(x,slot),
// with lexicographic tie-breaking on the offset slot when `arg` is tracked.
void scatter_min(const ActionKernel& kernel, const GridFunction& u, double scale,
                 GridFunction& out, std::vector<std::int32_t>* arg) {
    const PeriodicGrid& g = kernel.grid();
    const int W = kernel.offset_count();
    const std::size_t count = g.node_count();
    std::fill(out.values.begin(), out.values.end(), kInf);
    if (arg) arg->assign(count, -1);

    if (kernel.contiguous_1d() && W <= g.nodes_per_dim() && !arg) {
        const int n = g.nodes_per_dim();
        const int omin = kernel.offset(0)[0];
        const bool split = kernel.separable();
        const double* w = kernel.weights_all().data();
        const double* npart = split ? kernel.node_part().data() : nullptr;
        const double* opart = split ? kernel.offset_part().data() : nullptr;
        double* o = out.values.data();
        for (int x = 0; x < n; ++x) {
            const double base =
                split ? scale * u.values[x] + npart[x] : scale * u.values[x];
            const double* wrow = split ? opart : w + static_cast<std::size_t>(x) * W;
            int y = (x + omin) % n;
            if (y < 0) y += n;
            const int first = std::min(W, n - y);
            double* o1 = o + y;
            for (int k = 0; k < first; ++k) o1[k] = std::min(o1[k], base + wrow[k]);
            double* o2 = o - first;
            for (int k = first; k < W; ++k) o2[k] = std::min(o2[k], base + wrow[k]);
        }
        return;
    }

    if (g.dimension() == 1) {
        const int n = g.nodes_per_dim();
        for (int x = 0; x < n; ++x) {
            const double base = scale * u.values[x];
            auto wrow = kernel.weights_row(static_cast<std::size_t>(x));
            for (int s = 0; s < W; ++s) {
                int y = (x + kernel.offset(s)[0]) % n;
                if (y < 0) y += n;
                const double cand = base + wrow[s];
                if (cand < out.values[y]) {
                    out.values[y] = cand;
                    if (arg) (*arg)[y] = s;
                } else if (arg && cand == out.values[y] && s < (*arg)[y]) {
                    (*arg)[y] = s;
                }
            }
        }
        return;
    }

    for (std::size_t x = 0; x < count; ++x) {
        const double base = scale * u.values[x];
        auto wrow = kernel.weights_row(x);
        for (int s = 0; s < W; ++s) {
            const std::size_t y = g.shift(x, kernel.offset(s));
            const double cand = base + wrow[s];
            if (cand < out.values[y]) {
                out.values[y] = cand;
                if (arg) (*arg)[y] = s;
            } else if (arg && cand == out.values[y] && s < (*arg)[y]) {
                (*arg)[y] = s;
            }
        }
    }
}

ArgminField make_field(const ActionKernel& kernel, std::vector<std::int32_t> slots) {
    ArgminField f{kernel.grid(), kernel.grid().dimension(), {}, std::move(slots)};
    const std::size_t len =
        static_cast<std::size_t>(kernel.offset_count()) * kernel.grid().dimension();
    f.offsets_flat.resize(len);
    for (int s = 0; s < kernel.offset_count(); ++s) {
        auto o = kernel.offset(s);
        std::copy(o.begin(), o.end(),
                  f.offsets_flat.begin() + static_cast<std::size_t>(s) * f.dimension);
    }
    return f;
}

}  // namespace

OperatorResult backward_lax_oleinik(const GridFunction& u, const ActionKernel& kernel) {
    if (u.grid != kernel.grid())
        throw GridMismatch("backward_lax_oleinik: function grid differs from kernel grid");
    GridFunction out(u.grid);
    std::vector<std::int32_t> arg;
    scatter_min(kernel, u, 1.0, out, &arg);
    return {std::move(out), make_field(kernel, std::move(arg))};
}

GridFunction backward_apply(const GridFunction& u, const ActionKernel& kernel) {
    if (u.grid != kernel.grid())
        throw GridMismatch("backward_apply: function grid differs from kernel grid");
    GridFunction out(u.grid);
    scatter_min(kernel, u, 1.0, out, nullptr);
    return out;
}

OperatorResult discounted_lax_oleinik(const GridFunction& u, const ActionKernel& kernel,
                                      double delta) {
    const double td = kernel.tau() * delta;
    if (!(td > 0.0 && td < 1.0))
        throw InvalidDiscount("discounted_lax_oleinik: tau*delta must lie in (0,1)");
    if (u.grid != kernel.grid())
        throw GridMismatch("discounted_lax_oleinik: function grid differs from kernel grid");
    GridFunction out(u.grid);
    std::vector<std::int32_t> arg;
    scatter_min(kernel, u, 1.0 - td, out, &arg);
    return {std::move(out), make_field(kernel, std::move(arg))};
}

GridFunction discounted_apply(const GridFunction& u, const ActionKernel& kernel, double delta) {
    const double td = kernel.tau() * delta;
    if (!(td > 0.0 && td < 1.0))
        throw InvalidDiscount("discounted_apply: tau*delta must lie in (0,1)");
    if (u.grid != kernel.grid())
        throw GridMismatch("discounted_apply: function grid differs from kernel grid");
    GridFunction out(u.grid);
    scatter_min(kernel, u, 1.0 - td, out, nullptr);
    return out;
}

OperatorResult forward_lax_oleinik(const GridFunction& u, const ActionKernel& kernel) {
    if (u.grid != kernel.grid())
        throw GridMismatch("forward_lax_oleinik: function grid differs from kernel grid");
    const PeriodicGrid& g = kernel.grid();
    const int W = kernel.offset_count();
    GridFunction out(g, -kInf);
    std::vector<std::int32_t> arg(g.node_count(), -1);
    for (std::size_t x = 0; x < g.node_count(); ++x) {
        auto wrow = kernel.weights_row(x);
        double best = -kInf;
        std::int32_t bslot = -1;
        for (int s = 0; s < W; ++s) {
            const std::size_t y = g.shift(x, kernel.offset(s));
            const double cand = u.values[y] - wrow[s];
            if (cand > best) {
                best = cand;
                bslot = s;
            }
        }
        out.values[x] = best;
        arg[x] = bslot;
    }
    return {std::move(out), make_field(kernel, std::move(arg))};
}

ActionKernel min_plus_convolve(const ActionKernel& a, const ActionKernel& b) {
    if (a.grid() != b.grid())
        throw GridMismatch("min_plus_convolve: kernels live on different grids");
    const PeriodicGrid& g = a.grid();
    const int d = g.dimension();
    const int n = g.nodes_per_dim();
    const int cap = n / 2;

    // Result offsets: the (capped) sumset of the two offset tables.
    std::vector<int> mr(d);
    for (int k = 0; k < d; ++k) {
        int ma = 0, mb = 0;
        for (int s = 0; s < a.offset_count(); ++s) ma = std::max(ma, std::abs(a.offset(s)[k]));
        for (int s = 0; s < b.offset_count(); ++s) mb = std::max(mb, std::abs(b.offset(s)[k]));
        mr[k] = std::min(ma + mb, cap);
    }
    std::size_t box = 1;
    for (int k = 0; k < d; ++k) box *= static_cast<std::size_t>(2 * mr[k] + 1);
    std::vector<char> mark(box, 0);
    std::vector<int> sum(d);
    auto box_index = [&](std::span<const int> o) -> std::ptrdiff_t {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) {
            if (std::abs(o[k]) > mr[k]) return -1;
            idx = idx * static_cast<std::size_t>(2 * mr[k] + 1) +
                  static_cast<std::size_t>(o[k] + mr[k]);
        }
        return static_cast<std::ptrdiff_t>(idx);
    };
    for (int sa = 0; sa < a.offset_count(); ++sa)
        for (int sb = 0; sb < b.offset_count(); ++sb) {
            for (int k = 0; k < d; ++k) sum[k] = a.offset(sa)[k] + b.offset(sb)[k];
            const auto bi = box_index(sum);
            if (bi >= 0) mark[static_cast<std::size_t>(bi)] = 1;
        }
    std::vector<int> offsets;
    std::vector<int> slot_by_box(box, -1);
    {
        std::vector<int> o(d, 0);
        for (int k = 0; k < d; ++k) o[k] = -mr[k];
        int next = 0;
        std::size_t flat = 0;
        while (true) {
            if (mark[flat]) {
                offsets.insert(offsets.end(), o.begin(), o.end());
                slot_by_box[flat] = next++;
            }
            int k = d - 1;
            while (k >= 0 && ++o[k] > mr[k]) {
                o[k] = -mr[k];
                --k;
            }
            if (k < 0) break;
            flat = 0;
            for (int j = 0; j < d; ++j)
                flat = flat * static_cast<std::size_t>(2 * mr[j] + 1) +
                       static_cast<std::size_t>(o[j] + mr[j]);
        }
    }
    const int wr = static_cast<int>(offsets.size() / static_cast<std::size_t>(d));

    std::vector<double> weights(g.node_count() * static_cast<std::size_t>(wr), kInf);

    if (d == 1) {
        const int Wa = a.offset_count(), Wb = b.offset_count();
        const int amin = a.offset(0)[0], bmin = b.offset(0)[0], rmin = offsets[0];
        const double* wa = a.weights_all().data();
        const double* wb = b.weights_all().data();
        for (int i = 0; i < n; ++i) {
            const double* arow = wa + static_cast<std::size_t>(i) * Wa;
            double* orow = weights.data() + static_cast<std::size_t>(i) * wr;
            for (int sa = 0; sa < Wa; ++sa) {
                const double aw = arow[sa];
                int j = (i + amin + sa) % n;
                if (j < 0) j += n;
                const double* brow = wb + static_cast<std::size_t>(j) * Wb;
                const int rbase = (amin + sa) + bmin - rmin;  // result slot of sb = 0
                const int lo = std::max(0, -rbase);
                const int hi = std::min(Wb, wr - rbase);
                double* dst = orow + rbase;
                for (int sb = lo; sb < hi; ++sb) {
                    const double cand = aw + brow[sb];
                    if (cand < dst[sb]) dst[sb] = cand;
                }
            }
        }
    } else {
        // Precompute result slots per (sa, sb) pair.
        std::vector<int> rslot(static_cast<std::size_t>(a.offset_count()) * b.offset_count());
        for (int sa = 0; sa < a.offset_count(); ++sa)
            for (int sb = 0; sb < b.offset_count(); ++sb) {
                for (int k = 0; k < d; ++k) sum[k] = a.offset(sa)[k] + b.offset(sb)[k];
                const auto bi = box_index(sum);
                rslot[static_cast<std::size_t>(sa) * b.offset_count() + sb] =
                    bi >= 0 ? slot_by_box[static_cast<std::size_t>(bi)] : -1;
            }
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            auto arow = a.weights_row(i);
            double* orow = weights.data() + i * static_cast<std::size_t>(wr);
            for (int sa = 0; sa < a.offset_count(); ++sa) {
                const double aw = arow[sa];
                const std::size_t j = g.shift(i, a.offset(sa));
                auto brow = b.weights_row(j);
                const int* rs = rslot.data() + static_cast<std::size_t>(sa) * b.offset_count();
                for (int sb = 0; sb < b.offset_count(); ++sb) {
                    if (rs[sb] < 0) continue;
                    const double cand = aw + brow[sb];
                    if (cand < orow[rs[sb]]) orow[rs[sb]] = cand;
                }
            }
        }
    }

    const double radius = std::min(a.window_radius() + b.window_radius(),
                                   0.5 * std::sqrt(static_cast<double>(d)));
    return ActionKernel(g, a.tau() + b.tau(), radius, std::move(offsets), std::move(weights));
}

ActionKernel min_plus_power(const DiscreteAction& action, const PeriodicGrid& grid, int N,
                            const AprioriBounds& sub_bounds) {
    if (N < 1 || (N & (N - 1)) != 0)
        throw Error("min_plus_power: N must be a power of two >= 1");
    DiscreteAction sub(action.model, action.tau / N, action.p);
    if (grid.spacing() > sub.tau * sub_bounds.window_radius)
        throw WindowTooSmall("min_plus_power: h > (tau/N) * window_radius, refine the grid");
    ActionKernel k = tabulate_kernel(sub, grid, sub_bounds);
    for (int m = N; m > 1; m /= 2) k = min_plus_convolve(k, k);
    return k;
}

ActionKernel min_plus_power(const DiscreteAction& action, const PeriodicGrid& grid, int N) {
    if (N < 1 || (N & (N - 1)) != 0)
        throw Error("min_plus_power: N must be a power of two >= 1");
    DiscreteAction sub(action.model, action.tau / N, action.p);
    return min_plus_power(action, grid, N, estimate_bounds(sub));
}

// One backward relaxation sweep with an additive weight shift: out(y) is
// overwritten with min(out(y), in(x) + weight(x,o) + shift); predecessor
// nodes are recorded when `pred` is non-empty.
void relax_min_plus(const ActionKernel& kernel, std::span<const double> in,
                    std::span<double> out, double shift, std::span<std::int32_t> pred) {
    const PeriodicGrid& g = kernel.grid();
    const int W = kernel.offset_count();
    if (kernel.contiguous_1d() && W <= g.nodes_per_dim()) {
        const int n = g.nodes_per_dim();
        const int omin = kernel.offset(0)[0];
        const double* w = kernel.weights_all().data();
        for (int x = 0; x < n; ++x) {
            const double base = in[x] + shift;
            const double* wrow = w + static_cast<std::size_t>(x) * W;
            int y = (x + omin) % n;
            if (y < 0) y += n;
            const int first = std::min(W, n - y);
            for (int k = 0; k < first; ++k) {
                const double cand = base + wrow[k];
                if (cand < out[y + k]) {
                    out[y + k] = cand;
                    if (!pred.empty()) pred[y + k] = x;
                }
            }
            for (int k = first; k < W; ++k) {
                const double cand = base + wrow[k];
                if (cand < out[k - first]) {
                    out[k - first] = cand;
                    if (!pred.empty()) pred[k - first] = x;
                }
            }
        }
        return;
    }
    for (std::size_t x = 0; x < g.node_count(); ++x) {
        const double base = in[x] + shift;
        auto wrow = kernel.weights_row(x);
        for (int s = 0; s < W; ++s) {
            const std::size_t y = g.shift(x, kernel.offset(s));
            const double cand = base + wrow[s];
            if (cand < out[y]) {
                out[y] = cand;
                if (!pred.empty()) pred[y] = static_cast<std::int32_t>(x);
            }
        }
    }
}

}  // namespace weakkam
