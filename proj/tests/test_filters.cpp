#include "magsim/error.hpp"
#include "magsim/filters.hpp"
#include "magsim/signal_model.hpp"

#include <catch_amalgamated.hpp>

#include "support.hpp"

#include <cmath>
#include <numeric>

using namespace magsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpinSystemParams kN14 = SpinSystemParams::nitrogen14();

double alpha_per_gauss(double delta)
{
    return derive_effective(kN14, field_at(kN14, delta, 1e-3)).alpha / 1e-3;
}

double resonant_tau(double delta)
{
    TauScanOptions o;
    o.points = 41;
    o.span = 0.03;
    return optimal_tau(kN14, field_at(kN14, delta, 0.2098), o).tau;
}

}  // namespace

TEST_CASE("DC tone gives equal angles")
{
    const auto t = tone_angles({0.1, 0.0, 0.4}, 0.04, 24, 0.24);
    REQUIRE(t.alpha.size() == 24);
    for (double a : t.alpha) CHECK(a == t.alpha.front());
    CHECK_THAT(t.alpha.front(), WithinRel(0.1 * 0.04 * std::cos(0.4), 1e-14));
    CHECK(t.regime_ok);
    CHECK_THROWS_AS(tone_angles({0.1, -1.0, 0.0}, 0.04, 4, 0.2), ValidationError);
}

TEST_CASE("whole tone periods cancel")
{
    const int blocks = 24;
    const double tb = 0.25;
    for (int periods : {1, 2, 5}) {
        const double f = periods / (blocks * tb);
        for (double phase : {0.0, 0.7, 2.0}) {
            const auto t = tone_angles({0.2, f, phase}, 0.03, blocks, tb);
            const double sum = std::accumulate(t.alpha.begin(), t.alpha.end(), 0.0);
            CHECK(std::abs(sum) < 1e-12);
        }
    }
}

TEST_CASE("regime flags")
{
    CHECK_FALSE(tone_angles({0.1, 5.0, 0.0}, 0.03, 8, 0.24, 4.12).regime_ok);
    CHECK_FALSE(tone_angles({0.1, 0.001, 0.0}, 0.03, 8, 0.24, 4.12, 200.0).regime_ok);
    CHECK(tone_angles({0.1, 0.1, 0.0}, 0.03, 8, 0.24, 4.12, 200.0).regime_ok);
}

TEST_CASE("filter response limits")
{
    for (int l : {4, 12, 32})
        for (double lp : {1.5, 6.0, 40.0}) CHECK(filter_response(0.0, l, lp, 0.3) == 1.0);

    // a full tone period inside the train: the grating factor vanishes
    for (int l : {12, 32, 52}) {
        CHECK(std::abs(grating_factor(l, l / 2.0)) < 1e-12);
        CHECK_THAT(filter_response(0.05, l, l / 2.0, 1.1), WithinAbs(1.0, 1e-12));
        CHECK_THAT(filter_response_averaged(0.05, l, l / 2.0), WithinAbs(1.0, 1e-12));
    }
    CHECK(grating_factor(12, std::numeric_limits<double>::infinity()) == 12.0);
    CHECK_THAT(grating_factor(12, 1e9), WithinRel(12.0, 1e-9));
}

TEST_CASE("DC response equals the static fringe")
{
    const double inf = std::numeric_limits<double>::infinity();
    for (double a : {0.001, 0.01, 0.05}) {
        const int l = 24;
        CHECK_THAT(filter_response(a, l, inf, 0.0), WithinAbs(std::cos(2.0 * a * l), 1e-15));
        // phase-averaged DC against a static field of equal RMS, small alpha
        CHECK_THAT(depth_ratio(a * 0.1, l, inf), WithinRel(1.0, 0.02));
    }
}

TEST_CASE("small-angle depth ratio follows the squared grating factor")
{
    const int l = 24;
    for (double lp : {5.0, 17.0, 60.0}) {
        const double g = grating_factor(l, lp) / l;
        CHECK_THAT(depth_ratio(1e-4, l, lp), WithinAbs(g * g, 1e-4));
    }
}

TEST_CASE("filter cutoff scales inversely with duration")
{
    for (int l : {12, 32, 52}) {
        const double t = l * 0.2414;
        const double c1 = filter_cutoff(t, l);
        const double c2 = filter_cutoff(2.0 * t, 2 * l);
        CHECK_THAT(c2, WithinRel(0.5 * c1, 1e-6));
        CHECK_THAT(c1, WithinRel(1.0 / t, 1e-6));
    }
    CHECK_THROWS_AS(filter_cutoff(0.0, 4), InvalidTiming);
    CHECK_THROWS_AS(filter_cutoff(1.0, 1), NoZeroFound);
}

TEST_CASE("cutoff falls with pulse number and follows 1/t")
{
    const double tau = resonant_tau(141.0);
    std::vector<double> inv_t, cut;
    double prev = 1e9;
    for (int cycles = 2; cycles <= 16; ++cycles) {
        const double t = 8.0 * cycles * tau;
        const double c = filter_cutoff(t, 4 * cycles);
        CHECK(c < prev);
        prev = c;
        inv_t.push_back(1.0 / t);
        cut.push_back(c);
    }
    CHECK(testing::fit_line(inv_t, cut).r2 > 0.95);
    // XY8-13 against the quoted 63.4 kHz, within the factor-2 convention slack
    const double c13 = filter_cutoff(8.0 * 13 * tau, 52);
    CHECK(c13 > 0.0634 / 2.0);
    CHECK(c13 < 0.0634 * 2.0);
}

TEST_CASE("Ramsey filter")
{
    const double t2 = 1.16;
    CHECK_THAT(ramsey_filter(0.0, t2), WithinRel(kPi * kPi * t2 * t2, 1e-14));
    CHECK_THAT(ramsey_filter(1e-7, t2), WithinRel(kPi * kPi * t2 * t2, 1e-9));
    CHECK_THAT(ramsey_filter_normalized(1e-7, t2), WithinRel(1.0, 1e-9));
    CHECK(ramsey_filter(1.0 / t2, t2) < 1e-28);
    CHECK(ramsey_filter_normalized(0.5 / t2, t2) > 0.3);
    CHECK_THAT(ramsey_cutoff(t2), WithinRel(0.862, 1e-3));
    CHECK_THROWS_AS(ramsey_cutoff(0.0), InvalidTiming);
}

TEST_CASE("filter curve carries the cutoff")
{
    const auto c = filter_curve(0.001, 12, 0.24, {0.0, 0.1, 0.2, 0.3}, 16);
    CHECK(c.response.front() == 1.0);
    CHECK_THAT(c.cutoff, WithinRel(1.0 / (12 * 0.24), 1e-6));
    for (double r : c.response) {
        CHECK(r <= 1.0);
        CHECK(r >= -1.0);
    }
    const auto t = filter_table(c);
    REQUIRE(t.meta("cutoff_MHz") != nullptr);
    CHECK(t.rows() == 4);
}

TEST_CASE("oracle with an injected tone reproduces the analytic filter")
{
    const double delta = 141.0;
    const double tau = resonant_tau(delta);
    const double amp = 0.05;
    const double alpha = alpha_per_gauss(delta) * amp;
    OracleToneOptions oo;
    oo.phases = 8;
    for (int cycles : {3, 8}) {
        const int l = 4 * cycles;
        const double tb = 2.0 * tau;
        const double cut = filter_cutoff(l * tb, l);
        double ss = 0.0;
        int n = 0;
        for (int i = 0; i <= 12; ++i) {
            const double f = cut / 10.0 * std::pow(100.0, i / 12.0);
            const double analytic = depth_ratio(alpha, l, half_period_blocks(f, tb), 8);
            const double oracle = oracle_depth_ratio(kN14, delta, {amp, f, 0.0}, cycles, tau, oo);
            ss += std::pow(oracle - analytic, 2);
            ++n;
        }
        const double rms = std::sqrt(ss / n);
        INFO("XY8-" << cycles << " rms " << rms);
        CHECK(rms < 0.05);
    }
}
