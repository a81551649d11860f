#pragma once

#include "magsim/fringe.hpp"
#include "magsim/table.hpp"

#include <cstdint>
#include <vector>

namespace magsim {

struct FringeEstimate {
    double freq = 0.0;      // cycles per unit x
    double contrast = 0.0;  // peak-to-peak of the dominant component
    double freq_sigma = 0.0;
    double contrast_sigma = 0.0;
};

struct FringeOptions {
    int zero_pad = 4;
    bool refine = false;  // follow the spectral estimate with a time-domain cosine fit
};

// Hann-windowed, zero-padded transform; Lorentzian fit to the strongest
// non-DC peak.
FringeEstimate fringe_extract(const FringeSeries& series, const FringeOptions& opts = {});

enum class FitModel { sigmoid, lorentzian, cosine_decay, linear };

// sigmoid       a / (1 + exp((x - x_t)/w)) + c       params {a, x_t, w, c}
// lorentzian    a / (1 + ((x - x0)/g)^2) + c         params {a, x0, g, c}
// cosine_decay  a cos(2 pi f x + ph) exp(-x/T) + c   params {a, f, ph, T, c}
// linear        a + b x                             params {a, b}
double model_value(FitModel m, const std::vector<double>& params, double x);
int model_param_count(FitModel m);
const char* model_name(FitModel m);

struct FitResult {
    FitModel model = FitModel::linear;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> params_opt;
    double sigma_y = 0.0;
    std::vector<double> param_sigmas;  // linearised after the fit, empirical after Monte Carlo
    std::vector<std::vector<double>> param_samples;
    int failed_trials = 0;
    int iterations = 0;
};

struct FitOptions {
    int max_evaluations = 2000;
    double tolerance = 1e-12;
};

FitResult chi2_fit(const std::vector<double>& x, const std::vector<double>& y, FitModel model,
                   const std::vector<double>& init, const FitOptions& opts = {});

FitResult monte_carlo_uncertainty(const FitResult& fit, int trials, std::uint64_t seed);

// Percentile interval of the Monte-Carlo samples of one parameter.
std::pair<double, double> sample_interval(const FitResult& fit, int param, double level);

ResultTable fit_table(const FitResult& fit);

}  // namespace magsim
