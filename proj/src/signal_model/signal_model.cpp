#include "magsim/signal_model.hpp"

#include "magsim/analysis.hpp"
#include "magsim/error.hpp"
#include "magsim/sequences.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace magsim {

double analytic_signal(double alpha, double n_pulses)
{
    return 0.5 * (1.0 + std::cos(n_pulses * alpha));
}

double overlap_signal(const EffectiveModel& model, double n_pulses)
{
    const double s = std::sin(0.5 * n_pulses * model.alpha);
    const double c = std::cos(0.5 * model.alpha);
    return 1.0 - s * s * c * c;
}

FringeSeries fringe_vs_field(const SpinSystemParams& p, const std::vector<FieldConfig>& sweep,
                             double n_pulses)
{
    FringeSeries out;
    out.x_label = "b_e_G";
    out.s_label = "S";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (i > 0 && !(sweep[i].b_e > sweep[i - 1].b_e))
            throw ValidationError("fringe_vs_field: b_e must increase along the sweep");
        out.x.push_back(sweep[i].b_e);
        out.s.push_back(overlap_signal(derive_effective(p, sweep[i]), n_pulses));
    }
    return out;
}

namespace {

int probe_cycles(const SpinSystemParams& p, const FieldConfig& field)
{
    const double alpha = std::abs(derive_effective(p, field).alpha);
    if (!(alpha > 0.0)) return 8;
    const double pulses = 1.5 * kPi / alpha;
    return std::clamp(static_cast<int>(std::ceil(pulses / 8.0)), 8, 20000);
}

using ScanKey = std::tuple<double, double, double, double, double, double, int, double, double,
                           double, double, double, int, int, int, int, int>;

ScanKey scan_key(const SpinSystemParams& p, const FieldConfig& f, const TauScanOptions& o)
{
    return {p.delta0, p.gamma_e, p.gamma_n, p.q0, p.a_par, p.a_perp,
            static_cast<int>(p.ancilla_kind), f.b_z, f.b_e, f.b_i, f.beta, o.span, o.points,
            static_cast<int>(o.init.ancilla), static_cast<int>(o.init.sensor),
            static_cast<int>(o.run.truncation), static_cast<int>(o.run.pulse_model)};
}

}  // namespace

double fringe_depth(const SpinSystemParams& p, const FieldConfig& field, double tau,
                    const TauScanOptions& opts)
{
    const auto s = oracle::repeated_block_signal(preparation_pulse(), xy8_cycle(tau),
                                                 readout_pulse(), probe_cycles(p, field), p,
                                                 field, opts.init, opts.run);
    return 1.0 - *std::min_element(s.begin(), s.end());
}

TauScan optimal_tau(const SpinSystemParams& p, const FieldConfig& field, const TauScanOptions& opts)
{
    static std::mutex mu;
    static std::map<ScanKey, TauScan> cache;
    const auto key = scan_key(p, field, opts);
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    if (opts.points < 3 || !(opts.span > 0.0 && opts.span < 1.0))
        throw ValidationError("optimal_tau: need points >= 3 and 0 < span < 1");

    const double tau0 = 1.0 / (2.0 * std::abs(derive_effective(p, field).omega0));
    TauScan scan;
    int best = 0;
    for (int i = 0; i < opts.points; ++i) {
        const double tau = tau0 * (1.0 - opts.span + 2.0 * opts.span * i / (opts.points - 1));
        scan.taus.push_back(tau);
        scan.depths.push_back(fringe_depth(p, field, tau, opts));
        if (scan.depths[i] > scan.depths[best]) best = i;
    }
    scan.tau = scan.taus[best];
    scan.depth = scan.depths[best];
    if (best > 0 && best + 1 < opts.points) {
        const auto r = boost::math::tools::brent_find_minima(
            [&](double t) { return -fringe_depth(p, field, t, opts); }, scan.taus[best - 1],
            scan.taus[best + 1], 30);
        if (-r.second > scan.depth) {
            scan.tau = r.first;
            scan.depth = -r.second;
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, scan);
    return scan;
}

FringeSeries oracle_fringe(const SpinSystemParams& p, const FieldConfig& field, double tau,
                           int cycles, const oracle::InitialState& init,
                           const oracle::RunOptions& opts)
{
    if (cycles < 1) throw ValidationError("oracle_fringe: cycles must be positive");
    FringeSeries out;
    out.x_label = "N";
    out.s_label = "S";
    out.s = oracle::repeated_block_signal(preparation_pulse(), xy8_cycle(tau), readout_pulse(),
                                          cycles, p, field, init, opts);
    for (int k = 0; k <= cycles; ++k)
        out.x.push_back(8.0 * k);
    return out;
}

double oracle_alpha(const FringeSeries& fringe)
{
    FringeOptions o;
    o.refine = true;
    return kTwoPi * fringe_extract(fringe, o).freq;
}

ResultTable fringe_table(const FringeSeries& series)
{
    ResultTable t;
    t.add_column(series.x_label, series.x);
    t.add_column(series.s_label, series.s);
    return t;
}

}  // namespace magsim
