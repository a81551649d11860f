#include "magsim/filters.hpp"

#include "magsim/error.hpp"
#include "magsim/format.hpp"
#include "magsim/sequences.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>

namespace magsim {

ToneAngles tone_angles(const NoiseTone& tone, double alpha_per_gauss, int blocks,
                       double block_time, double omega0, double t2)
{
    if (tone.freq < 0.0) throw ValidationError("tone frequency must be non-negative");
    ToneAngles out;
    for (int j = 1; j <= blocks; ++j)
        out.alpha.push_back(alpha_per_gauss * tone.amplitude *
                            std::cos(kTwoPi * tone.freq * j * block_time + tone.phase));
    if (tone.freq > 0.0) {
        if (omega0 != 0.0 && tone.freq >= std::abs(omega0)) out.regime_ok = false;
        if (t2 > 0.0 && tone.freq <= 1.0 / t2) out.regime_ok = false;
    }
    return out;
}

double half_period_blocks(double freq, double block_time)
{
    if (freq <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * freq * block_time);
}

double grating_factor(int blocks, double l_p)
{
    if (!std::isfinite(l_p)) return blocks;
    const double x = kPi / (2.0 * l_p);
    const double den = std::sin(x);
    if (std::abs(den) < 1e-12) {
        // x = m pi: the tone aliases onto DC
        const long m = std::lround(x / kPi);
        return ((m * (blocks - 1)) % 2 == 0) ? blocks : -blocks;
    }
    return std::sin(blocks * x) / den;
}

double filter_response(double alpha, int blocks, double l_p, double phase)
{
    const double centre = std::isfinite(l_p) ? kPi * (blocks + 1) / (2.0 * l_p) : 0.0;
    return std::cos(2.0 * alpha * std::cos(centre + phase) * grating_factor(blocks, l_p));
}

double filter_response_averaged(double alpha, int blocks, double l_p, int quadrature)
{
    if (quadrature < 1) throw ValidationError("quadrature must be positive");
    double acc = 0.0;
    for (int k = 0; k < quadrature; ++k)
        acc += filter_response(alpha, blocks, l_p, kTwoPi * k / quadrature);
    return acc / quadrature;
}

double depth_ratio(double alpha, int blocks, double l_p, int quadrature)
{
    const double dc = 1.0 - std::cos(2.0 * blocks * alpha / std::sqrt(2.0));
    if (dc <= 0.0) return 1.0;
    return (1.0 - filter_response_averaged(alpha, blocks, l_p, quadrature)) / dc;
}

FilterCurve filter_curve(double alpha, int blocks, double block_time,
                         const std::vector<double>& freqs, int quadrature)
{
    FilterCurve c;
    c.freqs = freqs;
    for (double f : freqs) {
        const double lp = half_period_blocks(f, block_time);
        c.response.push_back(grating_factor(blocks, lp) / blocks);
        c.depth.push_back(depth_ratio(alpha, blocks, lp, quadrature));
    }
    c.cutoff = filter_cutoff(blocks * block_time, blocks);
    return c;
}

double filter_cutoff(double total_time, int blocks)
{
    if (!(total_time > 0.0)) throw InvalidTiming("filter_cutoff: total time must be positive");
    if (blocks < 1) throw ValidationError("filter_cutoff: need at least one block");
    const double tb = total_time / blocks;
    auto g = [&](double f) { return grating_factor(blocks, half_period_blocks(f, tb)); };
    const double band = 0.5 / tb;
    const int grid = 8 * blocks;
    double prev_f = 0.0;
    double prev = g(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double f = band * i / grid;
        const double v = g(f);
        if (v == 0.0) return f;
        if ((v > 0.0) != (prev > 0.0)) {
            boost::math::tools::eps_tolerance<double> tol(50);
            const auto r = boost::math::tools::bisect(g, prev_f, f, tol);
            return 0.5 * (r.first + r.second);
        }
        prev_f = f;
        prev = v;
    }
    throw NoZeroFound("filter response keeps its sign up to " + format_double(band) + " MHz");
}

double ramsey_filter(double omega, double t2_star)
{
    if (omega == 0.0) return kPi * kPi * t2_star * t2_star;
    const double s = std::sin(kPi * omega * t2_star) / omega;
    return s * s;
}

double ramsey_filter_normalized(double omega, double t2_star)
{
    return ramsey_filter(omega, t2_star) / (kPi * kPi * t2_star * t2_star);
}

double ramsey_cutoff(double t2_star)
{
    if (!(t2_star > 0.0)) throw InvalidTiming("T2* must be positive");
    return 1.0 / t2_star;
}

double oracle_tone_depth(const SpinSystemParams& p, double delta, const NoiseTone& tone,
                         int cycles, double tau, const OracleToneOptions& opts)
{
    if (opts.phases < 1) throw ValidationError("need at least one tone phase");
    const PulseSequence seq = build_xy8(cycles, tau);
    // The preparation pulse is instantaneous, so block 1 starts at t = 0.
    double acc = 0.0;
    for (int k = 0; k < opts.phases; ++k) {
        const double phase = tone.phase + kTwoPi * k / opts.phases;
        const oracle::FieldProfile profile = [&](double t) {
            return field_at(p, delta, tone.amplitude * std::cos(kTwoPi * tone.freq * t + phase));
        };
        acc += 1.0 - oracle::run_sequence(seq, p, profile, opts.init, opts.run);
    }
    return acc / opts.phases;
}

double oracle_depth_ratio(const SpinSystemParams& p, double delta, const NoiseTone& tone,
                          int cycles, double tau, const OracleToneOptions& opts)
{
    const PulseSequence seq = build_xy8(cycles, tau);
    const double dc = 1.0 - oracle::run_sequence(
                                seq, p, field_at(p, delta, tone.amplitude / std::sqrt(2.0)),
                                opts.init, opts.run);
    if (dc <= 0.0) throw NoPeak("no DC fringe depth to normalise against");
    return oracle_tone_depth(p, delta, tone, cycles, tau, opts) / dc;
}

ResultTable filter_table(const FilterCurve& curve)
{
    ResultTable t;
    t.add_column("freq_MHz", curve.freqs);
    t.add_column("response", curve.response);
    t.add_column("depth", curve.depth);
    t.set_meta("cutoff_MHz", format_double(curve.cutoff));
    return t;
}

}  // namespace magsim
