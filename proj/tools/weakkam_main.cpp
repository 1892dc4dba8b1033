// weakkam — experiment harness for the discrete weak KAM toolkit.
//
//   weakkam <subcommand> --config <path> [--out <dir>] [--threads <k>] [--seed <n>]
//
// Subcommands: effective-action, weak-kam, discounted, select, mane,
// sweep-tau, sweep-delta, validate.  Exit codes: 0 ok, 2 config error,
// 3 solver failure, 4 property violation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "weakkam/config.hpp"
#include "weakkam/continuum.hpp"
#include "weakkam/csv.hpp"
#include "weakkam/mather.hpp"
#include "weakkam/solvers.hpp"
#include "weakkam/validate.hpp"

namespace {

using namespace weakkam;

namespace fs = std::filesystem;

struct Context {
    ExperimentConfig cfg;
    fs::path out;
    int threads = 1;
    std::uint64_t seed = 1;
};

std::ofstream open_artifact(const Context& ctx, const std::string& name) {
    fs::create_directories(ctx.out);
    std::ofstream os(ctx.out / name);
    if (!os) throw Error("cannot open output file " + (ctx.out / name).string());
    return os;
}

// Runs one job per item on the worker pool; results keep item order, so
// output is identical whatever the pool size.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, int threads, F&& fn)
    -> std::vector<decltype(fn(items.front()))> {
    using R = decltype(fn(items.front()));
    std::vector<R> results;
    results.reserve(items.size());
    if (threads <= 1 || items.size() <= 1) {
        for (const auto& item : items) results.push_back(fn(item));
        return results;
    }
    std::vector<std::future<R>> futures;
    futures.reserve(items.size());
    for (const auto& item : items)
        futures.push_back(std::async(std::launch::async, [&fn, item] { return fn(item); }));
    for (auto& f : futures) results.push_back(f.get());
    return results;
}

struct CellResult {
    double tau = 0.0;
    int n = 0;
    ActionKernel kernel;
    AprioriBounds bounds;
};

CellResult make_cell(const ExperimentConfig& cfg, double tau) {
    DiscreteAction action = make_action(cfg, tau);
    AprioriBounds bounds = estimate_bounds(action, cfg.safety);
    PeriodicGrid grid(cfg.dimension, grid_nodes_for(cfg, tau));
    return {tau, grid.nodes_per_dim(), tabulate_kernel(action, grid, bounds), bounds};
}

int cmd_effective_action(const Context& ctx) {
    auto os = open_artifact(ctx, "report.csv");
    os << "route,tau,delta,n,effective_action,normalized_effective,iterations,"
          "final_residual,wall_time,cross_check_vs_karp\n";
    for (double tau : tau_entries(ctx.cfg)) {
        CellResult cell = make_cell(ctx.cfg, tau);
        KarpResult karp = effective_action_karp(cell.kernel);
        DiscountedLimitResult lim =
            effective_action_discounted(cell.kernel, ctx.cfg.delta_schedule, ctx.cfg.tol);
        SolveReport mps = effective_action_mean_per_site(
            cell.kernel, std::max(64, static_cast<int>(4.0 / tau)));
        auto row = [&](const SolveReport& rep, double delta) {
            std::ostringstream line;
            write_solve_report_row(line, rep, tau, delta, cell.n, ctx.cfg.precision);
            std::string s = line.str();
            s.pop_back();  // newline -> append the cross-check column
            os << s << ","
               << format_double(
                      std::fabs(rep.effective_action - karp.report.effective_action),
                      ctx.cfg.precision)
               << "\n";
        };
        row(karp.report, 0.0);
        row(lim.report, ctx.cfg.delta_schedule.back());
        row(mps, 0.0);
        std::cout << "tau=" << tau << " Ebar(karp)=" << karp.report.effective_action
                  << " Ebar(discounted-limit)=" << lim.report.effective_action << " |diff|="
                  << std::fabs(karp.report.effective_action - lim.report.effective_action)
                  << "\n";
    }
    return 0;
}

int cmd_weak_kam(const Context& ctx) {
    auto taus = tau_entries(ctx.cfg);
    auto solved = parallel_map(taus, ctx.threads, [&](double tau) {
        CellResult cell = make_cell(ctx.cfg, tau);
        WeakKamSolution wk =
            solve_weak_kam(cell.kernel, ctx.cfg.delta_schedule, ctx.cfg.selection_tol);
        const double gap = supinf_gap(wk.u, cell.kernel, wk.effective_action);
        return std::make_pair(std::move(wk), gap);
    });
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const WeakKamSolution& wk = solved[i].first;
        const std::string tag = taus.size() > 1 ? "_tau" + std::to_string(i) : "";
        {
            auto os = open_artifact(ctx, "solution" + tag + ".csv");
            write_grid_function_csv(os, wk.u, ctx.cfg.precision);
        }
        {
            auto os = open_artifact(ctx, "calibration_defect" + tag + ".csv");
            write_grid_function_csv(os, wk.calibration_defect, ctx.cfg.precision);
        }
        std::cout << "tau=" << taus[i] << " Ebar=" << wk.effective_action
                  << " supinf_gap=" << solved[i].second << " defect=["
                  << min_value(wk.calibration_defect) << ", "
                  << max_value(wk.calibration_defect) << "]\n";
    }
    return 0;
}

int cmd_discounted(const Context& ctx) {
    const double tau = tau_entries(ctx.cfg).front();
    CellResult cell = make_cell(ctx.cfg, tau);
    const double lower = cell.kernel.min_weight() / tau;
    double diag_upper = -1e300;
    for (std::size_t v = 0; v < cell.kernel.grid().node_count(); ++v)
        diag_upper = std::max(diag_upper, cell.kernel.weight(v, cell.kernel.zero_slot()) / tau);
    bool violated = false;
    for (std::size_t i = 0; i < ctx.cfg.delta_schedule.size(); ++i) {
        const double delta = ctx.cfg.delta_schedule[i];
        auto [u, rep] = solve_discounted(cell.kernel, delta, ctx.cfg.tol, ctx.cfg.max_iter);
        auto os = open_artifact(ctx, "u_delta" + std::to_string(i) + ".csv");
        write_grid_function_csv(os, u, ctx.cfg.precision);
        const double lo = delta * min_value(u), hi = delta * max_value(u);
        const double slack = ctx.cfg.tol * delta + 1e-12;
        const bool ok = lo >= lower - slack && hi <= diag_upper + slack;
        violated = violated || !ok;
        std::cout << "delta=" << delta << " iterations=" << rep.iterations
                  << " residual=" << rep.final_residual << " delta*u in [" << lo << ", " << hi
                  << "] bounds [" << lower << ", " << diag_upper << "]"
                  << (ok ? "" : "  BOUND VIOLATED") << "\n";
    }
    if (violated) {
        std::cerr << "discounted solution bound inf E/tau <= delta*u <= sup_x E(x,x)/tau "
                     "violated\n";
        return 4;
    }
    return 0;
}

int cmd_select(const Context& ctx) {
    const double tau = tau_entries(ctx.cfg).front();
    CellResult cell = make_cell(ctx.cfg, tau);
    GridFunction ustar =
        selected_solution(cell.kernel, ctx.cfg.delta_schedule, ctx.cfg.selection_tol);
    {
        auto os = open_artifact(ctx, "u_star.csv");
        write_grid_function_csv(os, ustar, ctx.cfg.precision);
    }
    const double ebar = effective_action_karp(cell.kernel).report.effective_action;
    GridFunction dual =
        selected_solution_dual(cell.kernel, ebar, {minimizing_measure(cell.kernel)});
    const double gap = sup_norm_diff(ustar, dual);
    std::cout << "selected solution: dual characterization gap = " << gap << "\n";
    return 0;
}

int cmd_mane(const Context& ctx) {
    const double tau = tau_entries(ctx.cfg).front();
    CellResult cell = make_cell(ctx.cfg, tau);
    KarpResult karp = effective_action_karp(cell.kernel);
    const double ebar = karp.report.effective_action;
    HolonomicMeasure mu = minimizing_measure(cell.kernel);
    {
        auto os = open_artifact(ctx, "measure.csv");
        write_measure_csv(os, mu, ctx.cfg.precision);
    }
    int idx = 0;
    for (const auto& [node, mass] : mu.position_marginal()) {
        (void)mass;
        ManePotential phi = mane_potential(cell.kernel, ebar, node);
        auto os = open_artifact(ctx, "phi_source" + std::to_string(idx++) + ".csv");
        write_grid_function_csv(os, phi.phi, ctx.cfg.precision,
                                "mane potential from node " + std::to_string(node));
    }
    // Grid slack per step: node snapping moves each edge weight by O(C h),
    // scaled by tau so the tolerance tracks the per-unit-time action.
    const double tol =
        tau * cell.bounds.lipschitz_bound * cell.kernel.grid().spacing() + 1e-12;
    auto nodes = mather_set(cell.kernel, tol);
    {
        auto os = open_artifact(ctx, "mather_set.txt");
        for (auto v : nodes) os << v << "\n";
    }
    std::cout << "Ebar=" << ebar << " measure_edges=" << mu.entries.size()
              << " mather_nodes=" << nodes.size() << " (tolerance " << tol << ")\n";
    return 0;
}

int cmd_sweep_tau(const Context& ctx) {
    if (ctx.cfg.tau_schedule.size() < 2)
        throw ConfigError("sweep-tau needs action.tau_schedule with at least two entries");
    SweepSettings settings{ctx.cfg.c_h, ctx.cfg.safety, ctx.cfg.delta_schedule,
                           ctx.cfg.selection_tol};
    const LagrangianModel model = make_model(ctx.cfg);
    const double hbar = analytic_effective_hamiltonian(model);
    SweepResult sweep =
        continuum_limit_sweep(model, ctx.cfg.p, ctx.cfg.tau_schedule, settings, hbar);
    {
        auto os = open_artifact(ctx, "ratefit.csv");
        os << "tau,n,normalized_effective,eigen_error,lipschitz,max_jump,window_radius\n";
        for (const auto& e : sweep.entries)
            os << format_double(e.tau, ctx.cfg.precision) << "," << e.n << ","
               << format_double(e.normalized_effective, ctx.cfg.precision) << ","
               << format_double(e.eigen_error, ctx.cfg.precision) << ","
               << format_double(e.lipschitz, ctx.cfg.precision) << ","
               << format_double(e.max_jump, ctx.cfg.precision) << ","
               << format_double(e.window_radius, ctx.cfg.precision) << "\n";
        write_rate_fit_csv(os, sweep.fit, ctx.cfg.precision);
    }
    {
        auto os = open_artifact(ctx, "cauchy.csv");
        os << "tau_coarse,tau_fine,gap\n";
        for (std::size_t i = 0; i < sweep.cauchy_gaps.size(); ++i)
            os << format_double(sweep.entries[i].tau, ctx.cfg.precision) << ","
               << format_double(sweep.entries[i + 1].tau, ctx.cfg.precision) << ","
               << format_double(sweep.cauchy_gaps[i], ctx.cfg.precision) << "\n";
    }
    if (sweep.fit.defined)
        std::cout << "eigenvalue rate: slope=" << sweep.fit.slope << " r2=" << sweep.fit.r2
                  << " (n=" << sweep.fit.n_points << ")\n";
    else
        std::cout << "eigenvalue rate: slope undefined (" << sweep.fit.saturated
                  << " saturated entries - zero signal)\n";
    return 0;
}

int cmd_sweep_delta(const Context& ctx) {
    auto os = open_artifact(ctx, "coupled.csv");
    os << "delta,tau,n,gap_to_previous\n";
    GridFunction prev{PeriodicGrid(ctx.cfg.dimension, 4)};
    bool have_prev = false;
    PeriodicGrid coarse(ctx.cfg.dimension, 4);
    std::cout << "coupled limit tau = " << ctx.cfg.sweep_coupling << " * delta^2\n";
    for (double delta : ctx.cfg.delta_schedule) {
        const double tau = ctx.cfg.sweep_coupling * delta * delta;
        if (!(tau > 0.0 && tau <= 1.0))
            throw ConfigError("sweep-delta: coupled tau leaves (0,1], adjust sweep.coupling");
        // The coupled tau varies, so the grid always follows the
        // h <= c_h tau^2 rule here even when grid.n is pinned.
        ExperimentConfig ruled = ctx.cfg;
        ruled.n = 0;
        CellResult cell = make_cell(ruled, tau);
        auto [u, rep] = solve_discounted(cell.kernel, delta, ctx.cfg.tol, ctx.cfg.max_iter);
        const double ebar = effective_action_karp(cell.kernel).report.effective_action;
        for (double& x : u.values) x -= ebar / (tau * delta);
        if (!have_prev) {
            coarse = u.grid;
            prev = u;
            have_prev = true;
            os << format_double(delta, ctx.cfg.precision) << ","
               << format_double(tau, ctx.cfg.precision) << "," << cell.n << ",\n";
            continue;
        }
        GridFunction on_coarse = resample(u, coarse);
        const double gap = sup_norm_diff(on_coarse, prev);
        os << format_double(delta, ctx.cfg.precision) << ","
           << format_double(tau, ctx.cfg.precision) << "," << cell.n << ","
           << format_double(gap, ctx.cfg.precision) << "\n";
        std::cout << "delta=" << delta << " tau=" << tau << " gap=" << gap << "\n";
        prev = std::move(on_coarse);
    }
    return 0;
}

int cmd_validate(const Context& ctx) {
    auto violations = run_property_suite(ctx.cfg, ctx.seed);
    // Emit the solution artifacts for the configured cell alongside the
    // property verdicts.
    const double tau = tau_entries(ctx.cfg).front();
    CellResult cell = make_cell(ctx.cfg, tau);
    WeakKamSolution wk =
        solve_weak_kam(cell.kernel, ctx.cfg.delta_schedule, ctx.cfg.selection_tol);
    {
        auto os = open_artifact(ctx, "solution.csv");
        write_grid_function_csv(os, wk.u, ctx.cfg.precision);
    }
    {
        auto os = open_artifact(ctx, "calibration_defect.csv");
        write_grid_function_csv(os, wk.calibration_defect, ctx.cfg.precision);
    }
    for (const auto& v : violations)
        std::cerr << "VIOLATION: " << v.name << " (" << v.detail << ")\n";
    std::cout << "property suite: " << violations.size() << " violation(s)\n";
    return violations.empty() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete weak KAM toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 1;

    const std::vector<std::string> names = {"effective-action", "weak-kam", "discounted",
                                            "select",           "mane",     "sweep-tau",
                                            "sweep-delta",      "validate"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker pool size for independent cells");
        sub->add_option("--seed", seed, "seed for randomized property tests");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    Context ctx;
    try {
        ctx.cfg = load_config(config_path);
        validate_config(ctx.cfg);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) ctx.out = out_dir;
    else if (const char* env = std::getenv("WEAKKAM_OUT")) ctx.out = env;
    else ctx.out = ctx.cfg.output_directory;
    ctx.threads = std::max(1, threads);
    ctx.seed = seed;

    try {
        if (sub == "effective-action") return cmd_effective_action(ctx);
        if (sub == "weak-kam") return cmd_weak_kam(ctx);
        if (sub == "discounted") return cmd_discounted(ctx);
        if (sub == "select") return cmd_select(ctx);
        if (sub == "mane") return cmd_mane(ctx);
        if (sub == "sweep-tau") return cmd_sweep_tau(ctx);
        if (sub == "sweep-delta") return cmd_sweep_delta(ctx);
        if (sub == "validate") return cmd_validate(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
