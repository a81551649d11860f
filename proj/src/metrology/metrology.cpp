#include "magsim/metrology.hpp"

#include "magsim/analysis.hpp"
#include "magsim/error.hpp"
#include "magsim/format.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace magsim {

ReadoutModel ReadoutModel::from_noise_ratio(double ds_over_c, double dead_time)
{
    ReadoutModel r;
    r.c_factor = 0.5 / ds_over_c;
    r.dead_time = dead_time;
    r.validate();
    return r;
}

void ReadoutModel::validate() const
{
    if (!(c_factor > 0.0)) throw ValidationError("readout.c_factor must be positive");
    if (!(dead_time >= 0.0)) throw ValidationError("readout.dead_time must be non-negative");
    if (csr) {
        if (!(csr->c_multiplier > 0.0))
            throw ValidationError("readout.csr_multiplier must be positive");
        if (!(csr->dead_time >= 0.0))
            throw ValidationError("readout.csr_dead_time must be non-negative");
    }
}

double DecayModel::envelope(double t) const { return std::exp(-std::pow(t / t2, p_exp)); }

void DecayModel::validate() const
{
    if (!(t2_star > 0.0)) throw ValidationError("decay.t2_star must be positive");
    if (!(t2 > t2_star)) throw ValidationError("decay.t2 must exceed decay.t2_star");
    if (!(p_exp > 0.0)) throw ValidationError("decay.p must be positive");
}

namespace {

// Delta/2 over C gamma_e |A_perp F|, the slope-free prefactor in G sqrt(us) us.
double prefactor(const SpinSystemParams& p, const EffectiveModel& m, double c)
{
    const double coupling = std::abs(p.a_perp * m.f_factor);
    if (coupling == 0.0) throw DegenerateFrame("A_perp F vanishes");
    return 0.5 * std::abs(m.delta) / (c * p.gamma_e * coupling);
}

double eta_raw(double pref, const DecayModel& d, double dead, double t)
{
    return pref * std::sqrt(t + dead) / (t * d.envelope(t));
}

}  // namespace

double sensitivity(const SpinSystemParams& p, const EffectiveModel& model,
                   const DecayModel& decay, const ReadoutModel& readout, double t)
{
    if (!(t > 0.0)) throw InvalidTiming("sensitivity: t must be positive");
    return kGaussRootMicrosecond *
           eta_raw(prefactor(p, model, readout.c_factor), decay, readout.dead_time, t);
}

double sensitivity_limit(const SpinSystemParams& p, const EffectiveModel& model,
                         const ReadoutModel& readout, double t2)
{
    return kGaussRootMicrosecond * prefactor(p, model, readout.c_factor) / std::sqrt(t2);
}

OptimalTime optimal_time(const SpinSystemParams& p, const EffectiveModel& model,
                         const DecayModel& decay, const ReadoutModel& readout)
{
    const auto r = boost::math::tools::brent_find_minima(
        [&](double t) { return sensitivity(p, model, decay, readout, t); }, 0.1 * decay.t2,
        3.0 * decay.t2, 40);
    return {r.first, r.second};
}

double ramsey_sensitivity(const SpinSystemParams& p, const ReadoutModel& readout, double t)
{
    if (!(t > 0.0)) throw InvalidTiming("ramsey_sensitivity: t must be positive");
    return kGaussRootMicrosecond / (kTwoPi * readout.c_factor * p.gamma_e * std::sqrt(t));
}

double min_field(double eta, long long m, double t, double t_d)
{
    if (m < 1) throw ValidationError("min_field: need at least one repetition");
    const double seconds = (t + t_d) * 1e-6;
    return eta / std::sqrt(static_cast<double>(m) * seconds);
}

double signal_noise_gain(double t2, double omega_n) { return std::sqrt(t2 * omega_n); }

double csr_gain(const ReadoutModel& readout, double t)
{
    if (!readout.csr) throw CsrNotConfigured("CSR readout is not configured");
    if (!(t > 0.0)) throw InvalidTiming("csr_gain: t must be positive");
    return std::sqrt((t + readout.csr->dead_time) / (t + readout.dead_time)) /
           readout.csr->c_multiplier;
}

double crossover_ratio(const SpinSystemParams& p, const EffectiveModel& model,
                       const DecayModel& decay)
{
    return kPi * std::abs(model.delta) / std::abs(p.a_perp * model.f_factor) *
           std::sqrt(decay.t2_star / decay.t2);
}

double fit_turning_point(const FringeSeries& contrast)
{
    const auto& x = contrast.x;
    const auto& y = contrast.s;
    if (x.size() < 5 || y.size() != x.size())
        throw FitDiverged("sigmoid fit needs at least 5 points");
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*hi - *lo < 1e-9) throw FitDiverged("contrast data are flat");

    const double a0 = y.front() - y.back();
    const double mid = 0.5 * (y.front() + y.back());
    std::size_t cross = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if ((y[i - 1] - mid) * (y[i] - mid) <= 0.0) {
            cross = i;
            break;
        }
    const double span = x.back() - x.front();
    const std::vector<double> init{a0, x[cross], 0.1 * span, y.back()};
    const auto fit = chi2_fit(x, y, FitModel::sigmoid, init);
    const double bt = fit.params_opt[1];
    if (!(bt >= x.front() - span && bt <= x.back() + span))
        throw FitDiverged("sigmoid turning point outside the data range");
    return bt;
}

DynamicRangeReport dynamic_range(const SpinSystemParams& p, const EffectiveModel& model,
                                 double b_perp, double rabi,
                                 const std::optional<FringeSeries>& contrast_data)
{
    if (!(rabi > 0.0)) throw ValidationError("dynamic_range: rabi must be positive");
    DynamicRangeReport r;
    const double mix = p.gamma_e * b_perp;
    r.tilt_loss = model.delta * model.delta / (model.delta * model.delta + mix * mix);
    r.pulse_infidelity = mix * mix / (2.0 * rabi * rabi);
    r.rwa_ok = rabi < std::abs(model.delta) / 5.0;
    if (contrast_data) r.b_t = fit_turning_point(*contrast_data);
    return r;
}

double compensated_preparation(double b0_perp, double delta, double gamma_e, double epsilon)
{
    if (std::abs(delta) < epsilon) throw DegenerateFrame("Delta vanishes");
    return 0.5 * kPi - std::atan(gamma_e * b0_perp / delta);
}

ResultTable sensitivity_table(const SpinSystemParams& p, const std::vector<double>& deltas,
                              double b_perp, double t, const DecayModel& decay,
                              const ReadoutModel& readout)
{
    std::vector<double> d, ts, eta, topt, eta_opt, ramsey, perturbative;
    for (double delta : deltas) {
        const auto m = derive_effective(p, field_at(p, delta, b_perp));
        const auto best = optimal_time(p, m, decay, readout);
        d.push_back(delta);
        ts.push_back(t);
        eta.push_back(sensitivity(p, m, decay, readout, t));
        topt.push_back(best.t);
        eta_opt.push_back(best.eta);
        ramsey.push_back(ramsey_sensitivity(p, readout, decay.t2_star));
        perturbative.push_back(std::abs(delta) >= 5.0 * std::abs(m.omega0) ? 1.0 : 0.0);
    }
    ResultTable tab;
    tab.add_column("delta_MHz", d);
    tab.add_column("t_us", ts);
    tab.add_column("eta_uT_sqrtHz", eta);
    tab.add_column("t_opt_us", topt);
    tab.add_column("eta_opt_uT_sqrtHz", eta_opt);
    tab.add_column("eta_ramsey_uT_sqrtHz", ramsey);
    tab.add_column("perturbative", perturbative);
    tab.set_meta("c_factor", format_double(readout.c_factor));
    tab.set_meta("dead_time_us", format_double(readout.dead_time));
    return tab;
}

}  // namespace magsim
