#include "magsim/error.hpp"
#include "magsim/modes.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace magsim {

double effective_rabi(const SpinLockConfig& cfg)
{
    return cfg.rabi * std::pow(10.0, cfg.detuning_db / 20.0);
}

double spinlock_rate(const EffectiveModel& model)
{
    return std::abs(model.alpha * model.omega0);
}

double spinlock_signal(const SpinLockConfig& cfg, const SpinSystemParams& p,
                       const FieldConfig& field)
{
    if (!(cfg.rabi > 0.0)) throw ValidationError("spinlock.rabi must be positive");
    const auto m = derive_effective(p, field);
    const double g = spinlock_rate(m);
    const double d = kPi * (effective_rabi(cfg) - std::abs(m.omega0));
    const double w2 = g * g + d * d;
    if (w2 == 0.0) return 1.0;
    const double s = std::sin(std::sqrt(w2) * cfg.lock_time);
    const double transfer = g * g / w2 * s * s;
    const double decay = cfg.t1rho > 0.0 ? std::exp(-cfg.lock_time / cfg.t1rho) : 1.0;
    return 1.0 - decay * transfer;
}

double spinlock_oracle_signal(const SpinLockConfig& cfg, const SpinSystemParams& p,
                              const FieldConfig& field)
{
    if (!(cfg.rabi > 0.0)) throw ValidationError("spinlock.rabi must be positive");
    if (cfg.lock_time < 0.0) throw InvalidTiming("spinlock.lock_time must be non-negative");
    const double rabi = effective_rabi(cfg);
    PulseSequence seq;
    seq.elements.push_back(Pulse{0.5 * kPi, 0.5 * kPi, 0.0, 0.0});
    if (cfg.lock_time > 0.0)
        seq.elements.push_back(Pulse{0.0, kTwoPi * rabi * cfg.lock_time, cfg.lock_time, rabi});
    seq.elements.push_back(Pulse{-0.5 * kPi, 0.5 * kPi, 0.0, 0.0});
    oracle::RunOptions opts;
    opts.pulse_model = oracle::PulseModel::finite_rwa;
    return oracle::run_sequence(seq, p, field, {}, opts);
}

ResonanceCurve spinlock_resonance(const SpinLockConfig& cfg, const SpinSystemParams& p,
                                  const FieldConfig& field, const std::vector<double>& rabis,
                                  bool use_oracle)
{
    if (rabis.empty()) throw ValidationError("spinlock resonance needs at least one drive");
    ResonanceCurve c;
    c.rabi = rabis;
    for (double r : rabis) {
        SpinLockConfig at = cfg;
        at.rabi = r;
        const double s =
            use_oracle ? spinlock_oracle_signal(at, p, field) : spinlock_signal(at, p, field);
        c.transfer.push_back(1.0 - s);
    }
    const auto best = std::max_element(c.transfer.begin(), c.transfer.end());
    c.peak_rabi = c.rabi[best - c.transfer.begin()];
    return c;
}

double spinlock_match(const SpinLockConfig& cfg, const SpinSystemParams& p,
                      const FieldConfig& field, double lo, double hi, int points)
{
    if (!(hi > lo) || points < 3) throw ValidationError("spinlock_match needs lo < hi and points >= 3");
    const double g = spinlock_rate(derive_effective(p, field));
    if (!(g > 0.0)) throw NoPeak("no exchange without a transverse field");
    const double window = kTwoPi / g;  // two periods of cos(2 g t)
    constexpr int samples = 32;
    auto mean_transfer = [&](double rabi) {
        SpinLockConfig at = cfg;
        at.rabi = rabi;
        at.detuning_db = 0.0;
        double acc = 0.0;
        for (int k = 1; k <= samples; ++k) {
            at.lock_time = window * k / samples;
            acc += 1.0 - spinlock_oracle_signal(at, p, field);
        }
        return acc / samples;
    };
    const double step = (hi - lo) / (points - 1);
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i < points; ++i) {
        const double v = mean_transfer(lo + i * step);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    const double a = std::max(lo, lo + (best - 1) * step);
    const double b = std::min(hi, lo + (best + 1) * step);
    const auto r = boost::math::tools::brent_find_minima(
        [&](double rabi) { return -mean_transfer(rabi); }, a, b, 30);
    return -r.second > best_v ? r.first : lo + best * step;
}

FringeSeries spinlock_fringe(const SpinLockConfig& cfg, const SpinSystemParams& p,
                             const FieldConfig& field, double dt, int points, bool use_oracle)
{
    if (!(dt > 0.0) || points < 1) throw ValidationError("spinlock fringe needs dt > 0 and points >= 1");
    FringeSeries out;
    out.x_label = "t_us";
    out.s_label = "S";
    for (int k = 0; k < points; ++k) {
        SpinLockConfig at = cfg;
        at.lock_time = k * dt;
        out.x.push_back(at.lock_time);
        out.s.push_back(use_oracle ? spinlock_oracle_signal(at, p, field)
                                   : spinlock_signal(at, p, field));
    }
    return out;
}

}  // namespace magsim
