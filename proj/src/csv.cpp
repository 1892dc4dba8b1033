#include "weakkam/csv.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace weakkam {

std::string format_double(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    return buf;
}

void write_grid_function_csv(std::ostream& os, const GridFunction& f, int precision,
                             const std::string& provenance) {
    const PeriodicGrid& g = f.grid;
    const int d = g.dimension();
    if (!provenance.empty()) os << "# provenance: " << provenance << "\n";
    for (int k = 0; k < d; ++k) os << "index_" << k << ",";
    for (int k = 0; k < d; ++k) os << "x_" << k << ",";
    os << "value\n";
    std::vector<int> mi(d);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        g.multi_index(i, mi);
        g.coordinate(i, x);
        for (int k = 0; k < d; ++k) os << mi[k] << ",";
        for (int k = 0; k < d; ++k) os << format_double(x[k], precision) << ",";
        os << format_double(f[i], precision) << "\n";
    }
}

void write_solve_report_header(std::ostream& os) {
    os << "route,tau,delta,n,effective_action,normalized_effective,iterations,"
          "final_residual,wall_time\n";
}

void write_solve_report_row(std::ostream& os, const SolveReport& report, double tau,
                            double delta, int n, int precision) {
    os << report.route << "," << format_double(tau, precision) << ","
       << format_double(delta, precision) << "," << n << ","
       << format_double(report.effective_action, precision) << ","
       << format_double(report.normalized_effective, precision) << "," << report.iterations
       << "," << format_double(report.final_residual, precision) << ","
       << format_double(report.wall_time, precision) << "\n";
}

void write_measure_csv(std::ostream& os, const HolonomicMeasure& measure, int precision) {
    os << "node_index,offset,weight\n";
    for (const auto& e : measure.entries) {
        os << e.node << ",";
        auto off = measure.offset(e.slot);
        for (int k = 0; k < measure.dimension; ++k) {
            if (k) os << ";";
            os << off[k];
        }
        os << "," << format_double(e.weight, precision) << "\n";
    }
}

void write_rate_fit_csv(std::ostream& os, const RateFit& fit, int precision) {
    os << "log_scale,log_error\n";
    for (const auto& [x, y] : fit.pairs)
        os << format_double(x, precision) << "," << format_double(y, precision) << "\n";
    os << "# slope=" << format_double(fit.slope, precision)
       << " intercept=" << format_double(fit.intercept, precision)
       << " r2=" << format_double(fit.r2, precision) << " n_points=" << fit.n_points
       << " saturated=" << fit.saturated << (fit.defined ? "" : " (slope undefined)") << "\n";
}

}  // namespace weakkam
