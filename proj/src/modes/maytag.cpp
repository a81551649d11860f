#include "magsim/error.hpp"
#include "magsim/modes.hpp"
#include "magsim/sequences.hpp"
#include "magsim/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace magsim {

namespace {

constexpr double kProbeField = 0.1;  // G, for the tau scans

double alpha_per_gauss(const SpinSystemParams& p, double delta)
{
    constexpr double b = 1e-3;
    return derive_effective(p, field_at(p, delta, b)).alpha / b;
}

// Reference modulation of block j.
double modulation(const MaytagConfig& cfg, const MaytagPlan& plan, const MaytagTimeline& tl,
                  std::size_t j)
{
    if (cfg.waveform == MaytagWaveform::square) return tl.sign[j];
    const double mid = tl.start[j] + tl.tau[j];
    return std::cos(kTwoPi * plan.omega_lf * mid);
}

}  // namespace

MaytagPlan plan_maytag(const MaytagConfig& cfg, const SpinSystemParams& p)
{
    if (!(cfg.omega_lf > 0.0)) throw ValidationError("maytag.omega_lf must be positive");
    if (!(cfg.delta_amp > 0.0)) throw ValidationError("maytag.delta_amp must be positive");
    if (cfg.cycles < 1) throw ValidationError("maytag.cycles must be positive");
    MaytagPlan plan;
    plan.tau_plus = optimal_tau(p, field_at(p, cfg.delta_amp, kProbeField)).tau;
    plan.tau_minus = optimal_tau(p, field_at(p, -cfg.delta_amp, kProbeField)).tau;
    const double block = plan.tau_plus + plan.tau_minus;  // mean two-pulse block
    plan.blocks_per_half = std::max(1, static_cast<int>(std::lround(0.5 / (cfg.omega_lf * block))));
    plan.omega_lf = 1.0 / (2.0 * plan.blocks_per_half * block);
    plan.alpha_per_gauss_plus = alpha_per_gauss(p, cfg.delta_amp);
    plan.alpha_per_gauss_minus = alpha_per_gauss(p, -cfg.delta_amp);
    return plan;
}

MaytagTimeline maytag_timeline(const MaytagPlan& plan, int cycles)
{
    MaytagTimeline tl;
    double t = 0.0;
    for (int c = 0; c < cycles; ++c) {
        for (int half = 0; half < 2; ++half) {
            const double tau = half == 0 ? plan.tau_plus : plan.tau_minus;
            for (int b = 0; b < plan.blocks_per_half; ++b) {
                tl.start.push_back(t);
                tl.tau.push_back(tau);
                tl.sign.push_back(half == 0 ? 1 : -1);
                t += 2.0 * tau;
            }
        }
    }
    tl.total = t;
    return tl;
}

std::vector<double> maytag_angles(const MaytagConfig& cfg, const MaytagPlan& plan,
                                  const NoiseTone& tone)
{
    const auto tl = maytag_timeline(plan, cfg.cycles);
    std::vector<double> out;
    for (std::size_t j = 0; j < tl.start.size(); ++j) {
        const double mid = tl.start[j] + tl.tau[j];
        const double b = tone.amplitude * std::cos(kTwoPi * tone.freq * mid + tone.phase);
        if (cfg.waveform == MaytagWaveform::square)
            out.push_back((tl.sign[j] > 0 ? plan.alpha_per_gauss_plus : plan.alpha_per_gauss_minus) * b);
        else
            out.push_back(plan.alpha_per_gauss_plus * modulation(cfg, plan, tl, j) * b);
    }
    return out;
}

double maytag_response(const MaytagConfig& cfg, const MaytagPlan& plan, double freq)
{
    const auto tl = maytag_timeline(plan, cfg.cycles);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < tl.start.size(); ++j) {
        const double mid = tl.start[j] + tl.tau[j];
        acc += modulation(cfg, plan, tl, j) * std::polar(1.0, kTwoPi * freq * mid);
    }
    return std::abs(acc) / static_cast<double>(tl.start.size());
}

FringeSeries maytag_signal(const MaytagConfig& cfg, const SpinSystemParams& p)
{
    const auto plan = plan_maytag(cfg, p);
    const auto angles = maytag_angles(cfg, plan, cfg.signal_tone);
    FringeSeries out;
    out.x_label = "N";
    out.s_label = "S";
    out.x.push_back(0.0);
    out.s.push_back(1.0);
    const int per_cycle = 2 * plan.blocks_per_half;
    double phase = 0.0;
    for (std::size_t j = 0; j < angles.size(); ++j) {
        phase += 2.0 * angles[j];
        if ((j + 1) % per_cycle == 0) {
            out.x.push_back(2.0 * (j + 1));
            out.s.push_back(analytic_signal(phase, 1.0));
        }
    }
    return out;
}

double maytag_oracle_signal(const MaytagConfig& cfg, const SpinSystemParams& p,
                            const NoiseTone& tone, double phase_offset,
                            const MaytagOracleOptions& opts)
{
    if (cfg.waveform != MaytagWaveform::square)
        throw ValidationError("the oracle models square-wave maytagging only");
    const auto plan = plan_maytag(cfg, p);
    const auto tl = maytag_timeline(plan, cfg.cycles);

    PulseSequence seq = preparation_pulse();
    for (std::size_t j = 0; j < tl.start.size(); ++j) {
        const auto block = cpmg_block(tl.tau[j], static_cast<int>(2 * j));
        seq.elements.insert(seq.elements.end(), block.elements.begin(), block.elements.end());
    }
    const auto ro = readout_pulse();
    seq.elements.insert(seq.elements.end(), ro.elements.begin(), ro.elements.end());

    const oracle::FieldProfile profile = [&](double t) {
        auto it = std::upper_bound(tl.start.begin(), tl.start.end(), t);
        const std::size_t j = it == tl.start.begin() ? 0 : (it - tl.start.begin()) - 1;
        const double b =
            tone.amplitude * std::cos(kTwoPi * tone.freq * t + tone.phase + phase_offset);
        return field_at(p, tl.sign[j] * cfg.delta_amp, b);
    };
    return oracle::run_sequence(seq, p, profile, opts.init, opts.run);
}

double maytag_oracle_depth(const MaytagConfig& cfg, const SpinSystemParams& p,
                           const NoiseTone& tone, const MaytagOracleOptions& opts)
{
    if (opts.phases < 1) throw ValidationError("need at least one tone phase");
    double acc = 0.0;
    for (int k = 0; k < opts.phases; ++k)
        acc += 1.0 - maytag_oracle_signal(cfg, p, tone, kTwoPi * k / opts.phases, opts);
    return acc / opts.phases;
}

}  // namespace magsim
