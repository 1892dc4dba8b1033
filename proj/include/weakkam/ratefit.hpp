#pragma once

// Ordinary least squares on (log scale, log error) pairs, used by the
// convergence sweeps to turn error sequences into empirical rates.

#include <utility>
#include <vector>

#include "weakkam/errors.hpp"

namespace weakkam {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_points = 0;       // pairs that entered the fit
    int saturated = 0;      // pairs excluded because the error was <= 0
    bool defined = false;   // a slope is only reported from >= 3 points
    std::vector<std::pair<double, double>> pairs;  // (log scale, log error)
};

// Input pairs are (scale, error). Non-positive errors are excluded and
// counted as saturated; fewer than three input pairs is an error.
RateFit fit_rate(const std::vector<std::pair<double, double>>& scale_error);

}  // namespace weakkam
