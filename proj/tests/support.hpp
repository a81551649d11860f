#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace testing {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares y = a + b x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

// Fit y = c x^2 through the origin; R^2 about the mean of y.
inline double quadratic_r2(const std::vector<double>& x, const std::vector<double>& y)
{
    double num = 0, den = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += x[i] * x[i] * y[i];
        den += std::pow(x[i], 4);
        my += y[i];
    }
    const double c = num / den;
    my /= static_cast<double>(y.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += std::pow(y[i] - c * x[i] * x[i], 2);
        ss_tot += std::pow(y[i] - my, 2);
    }
    return 1.0 - ss_res / ss_tot;
}

}  // namespace testing
