#include "weakkam/ratefit.hpp"

#include <cmath>

namespace weakkam {

RateFit fit_rate(const std::vector<std::pair<double, double>>& scale_error) {
    if (scale_error.size() < 3)
        throw InsufficientPoints("fit_rate: need at least three (scale, error) pairs");
    RateFit fit;
    for (const auto& [scale, error] : scale_error) {
        if (!(error > 0.0)) {
            ++fit.saturated;
            continue;
        }
        fit.pairs.emplace_back(std::log(scale), std::log(error));
    }
    fit.n_points = static_cast<int>(fit.pairs.size());
    if (fit.n_points < 3) return fit;  // slope stays unreported

    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : fit.pairs) {
        sx += x;
        sy += y;
    }
    const double mx = sx / fit.n_points;
    const double my = sy / fit.n_points;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : fit.pairs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) return fit;  // degenerate abscissa, no slope
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : fit.pairs) {
        const double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res <= 1e-24 ? 1.0 : 0.0);
    fit.defined = true;
    return fit;
}

}  // namespace weakkam
