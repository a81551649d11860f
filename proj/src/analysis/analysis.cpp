#include "magsim/analysis.hpp"

#include "magsim/error.hpp"
#include "magsim/format.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

namespace magsim {

namespace {

constexpr double kPiA = 3.14159265358979323846;

struct ModelFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    FitModel model;
    const std::vector<double>& x;
    const std::vector<double>& y;

    int inputs() const { return model_param_count(model); }
    int values() const { return static_cast<int>(x.size()); }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const
    {
        std::vector<double> pv(p.data(), p.data() + p.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] = model_value(model, pv, x[i]) - y[i];
        return 0;
    }

    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const
    {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            switch (model) {
            case FitModel::linear:
                j(i, 0) = 1.0;
                j(i, 1) = xi;
                break;
            case FitModel::sigmoid: {
                const double u = (xi - p[1]) / p[2];
                const double e = std::exp(std::clamp(u, -700.0, 700.0));
                const double g = 1.0 / (1.0 + e);
                const double dg_du = -e * g * g;
                j(i, 0) = g;
                j(i, 1) = p[0] * dg_du * (-1.0 / p[2]);
                j(i, 2) = p[0] * dg_du * (-u / p[2]);
                j(i, 3) = 1.0;
                break;
            }
            case FitModel::lorentzian: {
                const double u = (xi - p[1]) / p[2];
                const double l = 1.0 / (1.0 + u * u);
                j(i, 0) = l;
                j(i, 1) = p[0] * l * l * 2.0 * u / p[2];
                j(i, 2) = p[0] * l * l * 2.0 * u * u / p[2];
                j(i, 3) = 1.0;
                break;
            }
            case FitModel::cosine_decay: {
                const double arg = 2.0 * kPiA * p[1] * xi + p[2];
                const double env = std::exp(-xi / p[3]);
                const double c = std::cos(arg);
                const double s = std::sin(arg);
                j(i, 0) = c * env;
                j(i, 1) = -p[0] * s * env * 2.0 * kPiA * xi;
                j(i, 2) = -p[0] * s * env;
                j(i, 3) = p[0] * c * env * xi / (p[3] * p[3]);
                j(i, 4) = 1.0;
                break;
            }
            }
        }
        return 0;
    }
};

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// |X_j| of the windowed, zero-padded real series.
std::vector<double> padded_spectrum(const std::vector<double>& v, int m)
{
    const int bins = m / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    std::fill(in.get(), in.get() + m, 0.0);
    std::copy(v.begin(), v.end(), in.get());
    fftw_plan plan = fftw_plan_dft_r2c_1d(m, in.get(), out.get(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> mag(bins);
    for (int j = 0; j < bins; ++j)
        mag[j] = std::hypot(out.get()[j][0], out.get()[j][1]);
    return mag;
}

}  // namespace

int model_param_count(FitModel m)
{
    switch (m) {
    case FitModel::sigmoid: return 4;
    case FitModel::lorentzian: return 4;
    case FitModel::cosine_decay: return 5;
    case FitModel::linear: return 2;
    }
    return 0;
}

const char* model_name(FitModel m)
{
    switch (m) {
    case FitModel::sigmoid: return "sigmoid";
    case FitModel::lorentzian: return "lorentzian";
    case FitModel::cosine_decay: return "cosine_decay";
    case FitModel::linear: return "linear";
    }
    return "?";
}

double model_value(FitModel m, const std::vector<double>& p, double x)
{
    switch (m) {
    case FitModel::sigmoid: {
        const double u = std::clamp((x - p[1]) / p[2], -700.0, 700.0);
        return p[0] / (1.0 + std::exp(u)) + p[3];
    }
    case FitModel::lorentzian: {
        const double u = (x - p[1]) / p[2];
        return p[0] / (1.0 + u * u) + p[3];
    }
    case FitModel::cosine_decay:
        return p[0] * std::cos(2.0 * kPiA * p[1] * x + p[2]) * std::exp(-x / p[3]) + p[4];
    case FitModel::linear:
        return p[0] + p[1] * x;
    }
    return 0.0;
}

FitResult chi2_fit(const std::vector<double>& x, const std::vector<double>& y, FitModel model,
                   const std::vector<double>& init, const FitOptions& opts)
{
    const int np = model_param_count(model);
    if (x.size() != y.size())
        throw ValidationError("chi2_fit: x and y differ in length");
    if (static_cast<int>(init.size()) != np)
        throw ValidationError(std::string("chi2_fit: ") + model_name(model) + " takes " +
                              std::to_string(np) + " parameters");
    if (static_cast<int>(x.size()) <= np)
        throw ValidationError("chi2_fit: need more points than parameters");

    ModelFunctor f{model, x, y};
    Eigen::LevenbergMarquardt<ModelFunctor> lm(f);
    lm.parameters.maxfev = opts.max_evaluations;
    lm.parameters.ftol = opts.tolerance;
    lm.parameters.xtol = opts.tolerance;
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(init.data(), np);
    const auto status = lm.minimize(p);

    FitResult r;
    r.model = model;
    r.x = x;
    r.y = y;
    r.params_opt.assign(p.data(), p.data() + np);
    r.iterations = static_cast<int>(lm.iter);
    if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
        status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
        !all_finite(r.params_opt))
        throw FitDiverged(std::string(model_name(model)) + " fit did not converge");

    const int n = static_cast<int>(x.size());
    Eigen::VectorXd res(n);
    f(p, res);
    r.sigma_y = std::sqrt(res.squaredNorm() / (n - 1));

    Eigen::MatrixXd jac(n, np);
    f.df(p, jac);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    r.param_sigmas.assign(np, 0.0);
    if (lu.isInvertible()) {
        const Eigen::MatrixXd cov = lu.inverse() * (r.sigma_y * r.sigma_y);
        for (int i = 0; i < np; ++i)
            r.param_sigmas[i] = std::sqrt(std::max(0.0, cov(i, i)));
    }
    return r;
}

FitResult monte_carlo_uncertainty(const FitResult& fit, int trials, std::uint64_t seed)
{
    if (trials < 1)
        throw ValidationError("monte_carlo_uncertainty: trials must be positive");
    const int np = model_param_count(fit.model);
    std::vector<double> model_y(fit.x.size());
    for (std::size_t i = 0; i < fit.x.size(); ++i)
        model_y[i] = model_value(fit.model, fit.params_opt, fit.x[i]);

    FitResult out = fit;
    out.param_samples.clear();
    out.failed_trials = 0;
    std::vector<double> y(fit.x.size());
    for (int t = 0; t < trials; ++t) {
        // One substream per trial so results do not depend on trial order.
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(ss);
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = model_y[i] + fit.sigma_y * noise(rng);
        try {
            out.param_samples.push_back(chi2_fit(fit.x, y, fit.model, fit.params_opt).params_opt);
        } catch (const FitDiverged&) {
            ++out.failed_trials;
        }
    }
    if (out.failed_trials * 20 >= trials)
        throw FitDiverged(std::to_string(out.failed_trials) + " of " + std::to_string(trials) +
                          " Monte-Carlo refits diverged");

    const double m = static_cast<double>(out.param_samples.size());
    out.param_sigmas.assign(np, 0.0);
    for (int k = 0; k < np; ++k) {
        double mean = 0.0;
        for (const auto& s : out.param_samples)
            mean += s[k];
        mean /= m;
        double var = 0.0;
        for (const auto& s : out.param_samples)
            var += (s[k] - mean) * (s[k] - mean);
        out.param_sigmas[k] = m > 1 ? std::sqrt(var / (m - 1)) : 0.0;
    }
    return out;
}

std::pair<double, double> sample_interval(const FitResult& fit, int param, double level)
{
    if (fit.param_samples.empty())
        throw ValidationError("sample_interval: no Monte-Carlo samples");
    std::vector<double> v;
    v.reserve(fit.param_samples.size());
    for (const auto& s : fit.param_samples)
        v.push_back(s.at(param));
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * (v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - lo) * (v[hi] - v[lo]);
    };
    const double tail = 0.5 * (1.0 - level);
    return {quantile(tail), quantile(1.0 - tail)};
}

ResultTable fit_table(const FitResult& fit)
{
    ResultTable t;
    const int np = model_param_count(fit.model);
    std::vector<double> idx(np);
    std::iota(idx.begin(), idx.end(), 0.0);
    t.add_column("parameter", idx);
    t.add_column("estimate", fit.params_opt);
    t.add_column("sigma", fit.param_sigmas);
    t.set_meta("model", model_name(fit.model));
    t.set_meta("sigma_y", format_double(fit.sigma_y));
    t.set_meta("samples", std::to_string(fit.param_samples.size()));
    t.set_meta("failed_trials", std::to_string(fit.failed_trials));
    return t;
}

FringeEstimate fringe_extract(const FringeSeries& series, const FringeOptions& opts)
{
    const auto n = static_cast<int>(series.x.size());
    if (n < 8 || series.s.size() != series.x.size())
        throw ValidationError("fringe_extract: need at least 8 points");
    const double dx = (series.x.back() - series.x.front()) / (n - 1);
    if (!(std::abs(dx) > 0.0))
        throw ValidationError("fringe_extract: x must be strictly monotone");
    for (int i = 1; i < n; ++i)
        if (std::abs(series.x[i] - series.x[i - 1] - dx) > 1e-6 * std::abs(dx))
            throw ValidationError("fringe_extract: x must be uniformly spaced");

    const double mean = std::accumulate(series.s.begin(), series.s.end(), 0.0) / n;
    std::vector<double> w(n), v(n);
    double wsum = 0.0;
    double spread = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPiA * i / (n - 1)));
        wsum += w[i];
        v[i] = (series.s[i] - mean) * w[i];
        spread = std::max(spread, std::abs(series.s[i] - mean));
    }
    if (spread < 1e-12)
        throw NoPeak("fringe_extract: series is flat");

    const int pad = std::max(1, opts.zero_pad);
    const int m = pad * n;
    const auto mag = padded_spectrum(v, m);
    const int bins = static_cast<int>(mag.size());

    // The Hann main lobe around DC spans two unpadded bins.
    const int first = std::min(2 * pad, bins - 1);
    int peak = first;
    for (int j = first; j < bins; ++j)
        if (mag[j] > mag[peak])
            peak = j;
    std::vector<double> sorted(mag.begin() + first, mag.end());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double floor = sorted[sorted.size() / 2];
    if (!(mag[peak] > 4.0 * floor) || peak == first || peak == bins - 1)
        throw NoPeak("fringe_extract: no spectral peak above the noise floor");

    const int lo = std::max(first, peak - 4);
    const int hi = std::min(bins - 1, peak + 4);
    std::vector<double> bx, by;
    for (int j = lo; j <= hi; ++j) {
        bx.push_back(j);
        by.push_back(mag[j]);
    }

    FringeEstimate est;
    const double to_freq = 1.0 / (m * std::abs(dx));
    double centre = peak;
    double height = mag[peak];
    double centre_sigma = 0.5;
    double height_sigma = 0.0;
    try {
        const auto fit = chi2_fit(bx, by, FitModel::lorentzian, {mag[peak], double(peak), 1.5 * pad, 0.0});
        if (std::abs(fit.params_opt[1] - peak) < 1.0) {
            centre = fit.params_opt[1];
            height = fit.params_opt[0] + fit.params_opt[3];
            centre_sigma = fit.param_sigmas[1];
            height_sigma = std::hypot(fit.param_sigmas[0], fit.param_sigmas[3]);
        }
    } catch (const FitDiverged&) {
    }
    est.freq = centre * to_freq;
    est.freq_sigma = centre_sigma * to_freq;
    est.contrast = 2.0 * (2.0 * height / wsum);
    est.contrast_sigma = 2.0 * (2.0 * height_sigma / wsum);

    if (opts.refine) {
        const double span = std::abs(series.x.back() - series.x.front());
        double best_phase = 0.0;
        double best = -1.0;
        // Coarse phase seed so the local fit starts in the right basin.
        for (int k = 0; k < 16; ++k) {
            const double ph = 2.0 * kPiA * k / 16;
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += (series.s[i] - mean) * std::cos(2.0 * kPiA * est.freq * series.x[i] + ph);
            if (acc > best) {
                best = acc;
                best_phase = ph;
            }
        }
        try {
            const auto fit = chi2_fit(series.x, series.s, FitModel::cosine_decay,
                                      {0.5 * est.contrast, est.freq, best_phase, 100.0 * span, mean});
            if (std::abs(fit.params_opt[1] - est.freq) < 2.0 * to_freq * pad) {
                est.freq = std::abs(fit.params_opt[1]);
                est.freq_sigma = fit.param_sigmas[1];
            }
        } catch (const FitDiverged&) {
        }
    }
    return est;
}

}  // namespace magsim
