#include "magsim/analysis.hpp"
#include "magsim/error.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace magsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = 3.14159265358979323846;

FringeSeries cosine_series(int n, double freq, double offset = 0.5, double amp = 0.5,
                           double phase = 0.0, double dx = 1.0)
{
    FringeSeries s;
    for (int i = 0; i < n; ++i) {
        s.x.push_back(i * dx);
        s.s.push_back(offset + amp * std::cos(2.0 * kPi * freq * i * dx + phase));
    }
    return s;
}

struct LinearData {
    std::vector<double> x, y;
};

LinearData noisy_line(double a, double b, double sigma, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    LinearData d;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        d.x.push_back(x);
        d.y.push_back(a + b * x + g(rng));
    }
    return d;
}

// Normal equations for y = a + b x.
std::array<double, 2> normal_equations(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {(sy - b * sx) / n, b};
}

}  // namespace

TEST_CASE("fringe_extract recovers a pure cosine")
{
    const double freq = 4.0 / 64.0;
    const auto est = fringe_extract(cosine_series(64, freq));
    CHECK_THAT(est.freq, WithinRel(freq, 1e-3));
    CHECK_THAT(est.contrast, WithinRel(1.0, 0.1));
    CHECK(est.freq_sigma >= 0.0);

    // x in pulses at 8 per point
    const auto scaled = fringe_extract(cosine_series(64, freq / 8.0, 0.5, 0.5, 0.3, 8.0));
    CHECK_THAT(scaled.freq, WithinRel(freq / 8.0, 1e-3));
}

TEST_CASE("fringe_extract with time-domain refinement")
{
    const double freq = 0.0731;
    FringeOptions o;
    o.refine = true;
    const auto est = fringe_extract(cosine_series(100, freq, 0.6, 0.3, 1.1), o);
    CHECK_THAT(est.freq, WithinRel(freq, 1e-6));
}

TEST_CASE("fringe_extract rejects flat and malformed series")
{
    FringeSeries flat;
    for (int i = 0; i < 64; ++i) {
        flat.x.push_back(i);
        flat.s.push_back(0.7);
    }
    CHECK_THROWS_AS(fringe_extract(flat), NoPeak);

    CHECK_THROWS_AS(fringe_extract(cosine_series(5, 0.2)), ValidationError);
    auto uneven = cosine_series(32, 0.1);
    uneven.x[5] += 0.3;
    CHECK_THROWS_AS(fringe_extract(uneven), ValidationError);
}

TEST_CASE("fringe_extract is invariant under a constant offset")
{
    for (double freq : {0.05, 0.0731, 0.2}) {
        const auto a = fringe_extract(cosine_series(80, freq, 0.5));
        const auto b = fringe_extract(cosine_series(80, freq, 3.25));
        CHECK_THAT(b.freq, WithinRel(a.freq, 1e-9));
        CHECK_THAT(b.contrast, WithinRel(a.contrast, 1e-9));
    }
}

TEST_CASE("linear fit matches the normal equations")
{
    const auto d = noisy_line(0.3, -1.7, 0.05, 40, 3);
    const auto fit = chi2_fit(d.x, d.y, FitModel::linear, {0.0, 0.0});
    const auto ne = normal_equations(d.x, d.y);
    CHECK_THAT(fit.params_opt[0], WithinAbs(ne[0], 1e-10));
    CHECK_THAT(fit.params_opt[1], WithinAbs(ne[1], 1e-10));
}

TEST_CASE("exact model data leaves no residual")
{
    const std::vector<double> truth{0.8, 1.5, 0.2, 0.1};
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(0.06 * i);
        y.push_back(model_value(FitModel::sigmoid, truth, x.back()));
    }
    const auto fit = chi2_fit(x, y, FitModel::sigmoid, truth);
    CHECK(fit.sigma_y < 1e-12);
    for (int k = 0; k < 4; ++k) CHECK_THAT(fit.params_opt[k], WithinAbs(truth[k], 1e-10));

    const auto mc = monte_carlo_uncertainty(fit, 20, 1);
    REQUIRE(mc.param_samples.size() == 20);
    for (const auto& s : mc.param_samples) CHECK(s == mc.param_samples.front());
    for (double sig : mc.param_sigmas) CHECK(sig < 1e-12);
}

TEST_CASE("fit argument checks")
{
    const std::vector<double> x{0, 1, 2}, y{0, 1, 2};
    CHECK_THROWS_AS(chi2_fit(x, y, FitModel::sigmoid, {1, 1, 1, 0}), ValidationError);
    CHECK_THROWS_AS(chi2_fit(x, y, FitModel::linear, {1}), ValidationError);
    CHECK_THROWS_AS(chi2_fit(x, {0, 1}, FitModel::linear, {0, 0}), ValidationError);
    const auto fit = chi2_fit(x, y, FitModel::linear, {0, 0});
    CHECK_THROWS_AS(monte_carlo_uncertainty(fit, 0, 1), ValidationError);
    CHECK_THROWS_AS(sample_interval(fit, 0, 0.95), ValidationError);
}

TEST_CASE("Monte-Carlo sigma matches the analytic least-squares sigma")
{
    const auto d = noisy_line(1.0, 2.0, 0.1, 30, 17);
    const auto fit = chi2_fit(d.x, d.y, FitModel::linear, {0.0, 0.0});
    const auto mc = monte_carlo_uncertainty(fit, 1000, 99);
    REQUIRE(mc.param_samples.size() == 1000);

    double sxx = 0.0, sx = 0.0;
    const double n = d.x.size();
    for (double x : d.x) {
        sx += x;
        sxx += x * x;
    }
    const double det = n * sxx - sx * sx;
    const double s2 = fit.sigma_y * fit.sigma_y;
    CHECK_THAT(mc.param_sigmas[0], WithinRel(std::sqrt(s2 * sxx / det), 0.10));
    CHECK_THAT(mc.param_sigmas[1], WithinRel(std::sqrt(s2 * n / det), 0.10));
    for (double sig : mc.param_sigmas) CHECK(sig >= 0.0);
}

TEST_CASE("95% Monte-Carlo intervals cover the truth")
{
    int covered = 0;
    for (int set = 0; set < 100; ++set) {
        const auto d = noisy_line(0.5, -0.8, 0.2, 25, 1000 + set);
        const auto fit = chi2_fit(d.x, d.y, FitModel::linear, {0.0, 0.0});
        const auto mc = monte_carlo_uncertainty(fit, 400, 7 + set);
        const auto [lo, hi] = sample_interval(mc, 1, 0.95);
        if (lo <= -0.8 && -0.8 <= hi) ++covered;
    }
    INFO("covered " << covered);
    CHECK(covered >= 90);
}

TEST_CASE("Monte-Carlo results are deterministic and converge")
{
    const auto d = noisy_line(0.2, 0.9, 0.05, 20, 5);
    const auto fit = chi2_fit(d.x, d.y, FitModel::linear, {0.0, 0.0});
    const auto a = monte_carlo_uncertainty(fit, 300, 42);
    const auto b = monte_carlo_uncertainty(fit, 300, 42);
    CHECK(a.param_samples == b.param_samples);
    CHECK(a.param_sigmas == b.param_sigmas);
    CHECK(monte_carlo_uncertainty(fit, 300, 43).param_samples != a.param_samples);

    const auto m500 = monte_carlo_uncertainty(fit, 500, 8);
    const auto m1000 = monte_carlo_uncertainty(fit, 1000, 8);
    for (int k = 0; k < 2; ++k) CHECK_THAT(m500.param_sigmas[k], WithinRel(m1000.param_sigmas[k], 0.05));
}

TEST_CASE("sigmoid threshold recovered from noisy contrast data")
{
    const std::vector<double> truth{0.9, 1.5, 0.15, 0.05};
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 0.02);
    std::vector<double> x, y;
    for (int i = 0; i < 61; ++i) {
        x.push_back(0.05 * i);
        y.push_back(model_value(FitModel::sigmoid, truth, x.back()) + g(rng));
    }
    const auto fit = chi2_fit(x, y, FitModel::sigmoid, {1.0, 1.0, 0.3, 0.0});
    CHECK_THAT(fit.params_opt[1], WithinRel(1.5, 0.05));
    CHECK_THAT(fit.sigma_y, WithinRel(0.02, 0.3));
    const auto mc = monte_carlo_uncertainty(fit, 200, 3);
    CHECK(mc.failed_trials * 20 < 200);
    const auto [lo, hi] = sample_interval(mc, 1, 0.95);
    CHECK(lo < hi);
}

TEST_CASE("fit table lists every parameter")
{
    const auto fit = chi2_fit({0, 1, 2, 3}, {1, 3, 5, 7.1}, FitModel::linear, {0, 0});
    const auto t = fit_table(fit);
    CHECK(t.rows() == 2);
    REQUIRE(t.meta("model") != nullptr);
    CHECK(*t.meta("model") == "linear");
    CHECK(t.column("estimate")[1] == fit.params_opt[1]);
}
