#pragma once

// CSV writers for the on-disk artifacts.  Numbers are written with 17
// significant digits by default so doubles round-trip bit-faithfully.

#include <ostream>
#include <string>
#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/mather.hpp"
#include "weakkam/solvers.hpp"

namespace weakkam {

std::string format_double(double value, int precision = 17);

// Columns: index_0,...,index_{d-1},x_0,...,x_{d-1},value (row-major order).
void write_grid_function_csv(std::ostream& os, const GridFunction& f, int precision = 17,
                             const std::string& provenance = "");

void write_solve_report_header(std::ostream& os);
void write_solve_report_row(std::ostream& os, const SolveReport& report, double tau,
                            double delta, int n, int precision = 17);

// Columns: node_index,offset,weight; multi-dimensional offsets are joined
// with ';' inside the field.
void write_measure_csv(std::ostream& os, const HolonomicMeasure& measure, int precision = 17);

void write_rate_fit_csv(std::ostream& os, const RateFit& fit, int precision = 17);

}  // namespace weakkam
