#include "magsim/experiment.hpp"

#include "magsim/analysis.hpp"
#include "magsim/error.hpp"
#include "magsim/filters.hpp"
#include "magsim/format.hpp"
#include "magsim/metrology.hpp"
#include "magsim/modes.hpp"
#include "magsim/sequences.hpp"
#include "magsim/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace magsim {

namespace {

std::vector<double> linspace(double a, double b, long long n)
{
    if (n < 1) throw ValidationError("sweep needs at least one point");
    std::vector<double> v;
    for (long long i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
}

int positive_int(const ExperimentConfig& cfg, const std::string& key)
{
    const long long v = cfg.integer(key);
    if (v < 1 || v > 1000000) throw ValidationError(key + " must lie in [1, 1e6]");
    return static_cast<int>(v);
}

oracle::InitialState initial_state(const ExperimentConfig& cfg)
{
    oracle::InitialState s;
    const std::string a = cfg.get("run.ancilla_init");
    if (a == "polarized")
        s.ancilla = oracle::AncillaInit::polarized;
    else if (a == "mixed")
        s.ancilla = oracle::AncillaInit::maximally_mixed;
    else
        throw ValidationError("run.ancilla_init: expected polarized or mixed");
    return s;
}

oracle::RunOptions run_options(const ExperimentConfig& cfg)
{
    oracle::RunOptions o;
    const std::string t = cfg.get("run.truncation");
    if (t == "full")
        o.truncation = oracle::Truncation::full;
    else if (t == "manifold")
        o.truncation = oracle::Truncation::manifold;
    else
        throw ValidationError("run.truncation: expected full or manifold");
    return o;
}

TauScanOptions scan_options(const ExperimentConfig& cfg)
{
    TauScanOptions o;
    o.span = cfg.number("tau_scan.span");
    o.points = positive_int(cfg, "tau_scan.points");
    o.init = initial_state(cfg);
    o.run = run_options(cfg);
    return o;
}

double pulse_spacing(const ExperimentConfig& cfg, const FieldConfig& field)
{
    const double tau = cfg.number("run.tau");
    if (tau > 0.0) return tau;
    if (tau < 0.0) throw ValidationError("run.tau must be non-negative");
    return optimal_tau(cfg.system, field, scan_options(cfg)).tau;
}

ResultTable run_xy8_fringe(const ExperimentConfig& cfg)
{
    const auto& p = cfg.system;
    const auto m = derive_effective(p, cfg.field);
    const double tau = pulse_spacing(cfg, cfg.field);
    int cycles = static_cast<int>(cfg.integer("run.cycles"));
    if (cycles <= 0) {
        const double a = std::abs(m.alpha);
        cycles = a > 0.0 ? static_cast<int>(std::ceil(3.0 * kTwoPi / a / 8.0)) : 64;
        cycles = std::clamp(cycles, 8, 20000);
    }
    const auto fringe = oracle_fringe(p, cfg.field, tau, cycles, initial_state(cfg), run_options(cfg));

    ResultTable t;
    std::vector<double> analytic, overlap;
    for (double n : fringe.x) {
        analytic.push_back(analytic_signal(m.alpha, n));
        overlap.push_back(overlap_signal(m, n));
    }
    t.add_column("N", fringe.x);
    t.add_column("S_analytic", analytic);
    t.add_column("S_overlap", overlap);
    t.add_column("S_oracle", fringe.s);
    t.set_meta("tau_us", format_double(tau));
    t.set_meta("alpha_closed", format_double(m.alpha));
    t.set_meta("alpha_geometric", format_double(m.alpha_geometric));
    double est_freq = 0.0;
    try {
        FringeOptions fo;
        fo.refine = true;
        est_freq = fringe_extract(fringe, fo).freq;
        t.set_meta("alpha_oracle", format_double(kTwoPi * est_freq));
    } catch (const NoPeak&) {
        t.set_meta("alpha_oracle", "nan");
    }

    const long long trials = cfg.integer("run.fit_trials");
    if (trials > 0 && est_freq > 0.0) {
        const double span = fringe.x.back();
        const auto fit = chi2_fit(fringe.x, fringe.s, FitModel::cosine_decay,
                                  {0.5, est_freq, 0.0, 100.0 * span, 0.5});
        const auto mc = monte_carlo_uncertainty(fit, static_cast<int>(trials), cfg.seed);
        t.set_meta("alpha_fit", format_double(kTwoPi * std::abs(mc.params_opt[1])));
        t.set_meta("alpha_fit_sigma", format_double(kTwoPi * mc.param_sigmas[1]));
        t.set_meta("fit_failed_trials", std::to_string(mc.failed_trials));
    }
    return t;
}

ResultTable run_tau_scan(const ExperimentConfig& cfg)
{
    const auto scan = optimal_tau(cfg.system, cfg.field, scan_options(cfg));
    ResultTable t;
    t.add_column("tau_us", scan.taus);
    t.add_column("depth", scan.depths);
    t.set_meta("best_tau_us", format_double(scan.tau));
    t.set_meta("best_depth", format_double(scan.depth));
    t.set_meta("tau_closed_us",
               format_double(1.0 / (2.0 * std::abs(derive_effective(cfg.system, cfg.field).omega0))));
    return t;
}

ResultTable run_field_sweep(const ExperimentConfig& cfg)
{
    const auto bes = linspace(cfg.number("sweep.b_e_start"), cfg.number("sweep.b_e_stop"),
                              cfg.integer("sweep.points"));
    const double n = cfg.number("sweep.n_pulses");
    std::vector<FieldConfig> sweep;
    std::vector<double> bperp, alpha, analytic;
    for (double be : bes) {
        FieldConfig f = cfg.field;
        f.b_e = be;
        f.validate();
        sweep.push_back(f);
        const auto m = derive_effective(cfg.system, f);
        bperp.push_back(m.b_perp);
        alpha.push_back(m.alpha);
        analytic.push_back(analytic_signal(m.alpha, n));
    }
    const auto series = fringe_vs_field(cfg.system, sweep, n);
    ResultTable t;
    t.add_column("b_e_G", series.x);
    t.add_column("b_perp_G", bperp);
    t.add_column("alpha_rad", alpha);
    t.add_column("S_analytic", analytic);
    t.add_column("S_overlap", series.s);
    return t;
}

ResultTable run_filter_map(const ExperimentConfig& cfg)
{
    const auto& p = cfg.system;
    const double delta = cfg.delta();
    const double amp = cfg.number("filter.amplitude");
    const double tau = pulse_spacing(cfg, cfg.field);
    const auto freqs = linspace(0.0, cfg.number("filter.f_max"), cfg.integer("filter.points"));
    const int quad = positive_int(cfg, "filter.phases");
    const bool with_oracle = cfg.flag("filter.oracle");
    OracleToneOptions oo;
    oo.phases = positive_int(cfg, "filter.oracle_phases");
    oo.init = initial_state(cfg);
    oo.run = run_options(cfg);

    constexpr double probe = 1e-3;
    const double alpha = derive_effective(p, field_at(p, delta, probe)).alpha / probe * amp;

    std::vector<double> cyc, f, resp, depth, odepth;
    ResultTable t;
    for (double c : cfg.list("filter.cycles")) {
        if (c < 1 || c != std::floor(c)) throw ValidationError("filter.cycles must hold positive integers");
        const int blocks = 4 * static_cast<int>(c);
        const auto curve = filter_curve(alpha, blocks, 2.0 * tau, freqs, quad);
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            cyc.push_back(c);
            f.push_back(freqs[i]);
            resp.push_back(curve.response[i]);
            depth.push_back(curve.depth[i]);
            if (with_oracle)
                odepth.push_back(oracle_depth_ratio(p, delta, {amp, freqs[i], 0.0},
                                                    static_cast<int>(c), tau, oo));
        }
        t.set_meta("cutoff_MHz.xy8_" + format_double(c), format_double(curve.cutoff));
    }
    t.add_column("cycles", cyc);
    t.add_column("freq_MHz", f);
    t.add_column("response", resp);
    t.add_column("depth", depth);
    if (with_oracle) t.add_column("depth_oracle", odepth);
    t.set_meta("tau_us", format_double(tau));
    t.set_meta("ramsey_cutoff_MHz", format_double(ramsey_cutoff(cfg.decay.t2_star)));
    return t;
}

ResultTable run_sensitivity(const ExperimentConfig& cfg)
{
    const double bperp = total_transverse(cfg.field).b_perp;
    ResultTable t = sensitivity_table(cfg.system, cfg.list("sensitivity.deltas"), bperp,
                                      cfg.number("sensitivity.t"), cfg.decay, cfg.readout);
    if (cfg.readout.csr) {
        const double g = csr_gain(cfg.readout, cfg.number("sensitivity.t"));
        std::vector<double> csr;
        for (double e : t.column("eta_uT_sqrtHz")) csr.push_back(e * g);
        t.add_column("eta_csr_uT_sqrtHz", csr);
    }
    return t;
}

MaytagConfig maytag_config(const ExperimentConfig& cfg)
{
    MaytagConfig m;
    m.omega_lf = cfg.number("maytag.omega_lf");
    m.delta_amp = cfg.number("maytag.delta_amp");
    m.cycles = positive_int(cfg, "maytag.cycles");
    m.signal_tone = {cfg.number("maytag.tone_amplitude"), m.omega_lf, cfg.number("maytag.tone_phase")};
    const std::string w = cfg.get("maytag.waveform");
    if (w == "square")
        m.waveform = MaytagWaveform::square;
    else if (w == "sine")
        m.waveform = MaytagWaveform::sine;
    else
        throw ValidationError("maytag.waveform: expected square or sine");
    return m;
}

ResultTable run_maytag(const ExperimentConfig& cfg)
{
    const auto mc = maytag_config(cfg);
    const auto plan = plan_maytag(mc, cfg.system);
    const auto freqs = linspace(0.0, cfg.number("maytag.f_max_factor") * plan.omega_lf,
                                cfg.integer("maytag.points"));
    const bool with_oracle = cfg.flag("maytag.oracle");
    MaytagOracleOptions oo;
    oo.phases = positive_int(cfg, "maytag.oracle_phases");
    oo.init = initial_state(cfg);
    oo.run = run_options(cfg);

    std::vector<double> resp, depth;
    for (double f : freqs) {
        resp.push_back(maytag_response(mc, plan, f));
        if (with_oracle) {
            NoiseTone tone = mc.signal_tone;
            tone.freq = f;
            depth.push_back(maytag_oracle_depth(mc, cfg.system, tone, oo));
        }
    }
    ResultTable t;
    t.add_column("freq_MHz", freqs);
    t.add_column("response", resp);
    if (with_oracle) t.add_column("depth_oracle", depth);
    t.set_meta("omega_lf_MHz", format_double(plan.omega_lf));
    t.set_meta("blocks_per_half", std::to_string(plan.blocks_per_half));
    t.set_meta("tau_plus_us", format_double(plan.tau_plus));
    t.set_meta("tau_minus_us", format_double(plan.tau_minus));
    return t;
}

ResultTable run_spinlock(const ExperimentConfig& cfg)
{
    const auto m = derive_effective(cfg.system, cfg.field);
    const double w0 = std::abs(m.omega0);
    SpinLockConfig sl;
    sl.lock_time = cfg.number("spinlock.lock_time");
    sl.detuning_db = cfg.number("spinlock.detuning_db");
    sl.t1rho = cfg.number("spinlock.t1rho");
    sl.rabi = w0;
    const auto rabis = linspace(cfg.number("spinlock.rabi_min") * w0,
                                cfg.number("spinlock.rabi_max") * w0, cfg.integer("spinlock.points"));
    const auto analytic = spinlock_resonance(sl, cfg.system, cfg.field, rabis, false);
    ResultTable t;
    t.add_column("rabi_MHz", rabis);
    t.add_column("transfer_analytic", analytic.transfer);
    if (cfg.flag("spinlock.oracle")) {
        const auto o = spinlock_resonance(sl, cfg.system, cfg.field, rabis, true);
        t.add_column("transfer_oracle", o.transfer);
        t.set_meta("peak_rabi_oracle_MHz", format_double(o.peak_rabi));
    }
    t.set_meta("omega0_MHz", format_double(m.omega0));
    t.set_meta("peak_rabi_analytic_MHz", format_double(analytic.peak_rabi));
    t.set_meta("exchange_rate_rad_per_us", format_double(spinlock_rate(m)));
    return t;
}

ResultTable run_vector(const ExperimentConfig& cfg)
{
    const BiasField bias{cfg.number("vector.bias"), cfg.number("vector.bias_direction")};
    const auto v = vector_reconstruct(cfg.number("vector.b_par"), cfg.number("vector.b_perp"),
                                      cfg.number("vector.b_perp_with_bias"), bias);
    ResultTable t;
    t.add_column("theta_rad", {v.theta});
    t.add_column("theta_deg", {v.theta * 180.0 / kPi});
    t.add_column("phi_rad", {v.phi_defined ? v.phi : std::nan("")});
    t.add_column("phi_alt_rad", {v.phi_defined ? v.phi_alt : std::nan("")});
    t.add_column("phi_defined", {v.phi_defined ? 1.0 : 0.0});
    return t;
}

ResultTable run_interp_demo(const ExperimentConfig& cfg)
{
    const auto& p = cfg.system;
    const double window = cfg.number("interp.window");
    if (!(window > 0.0)) throw ValidationError("interp.window must be positive");
    const int slices = positive_int(cfg, "interp.slices");
    const double tau = pulse_spacing(cfg, cfg.field);
    const double base = std::floor(tau / window) * window;
    const auto init = initial_state(cfg);

    std::vector<double> order, teff, s_interp, s_uniform;
    for (double l : cfg.list("interp.orders")) {
        if (l < 1 || l != std::floor(l)) throw ValidationError("interp.orders must hold positive integers");
        const int n = 4 * static_cast<int>(l);
        if (slices > n) throw InvalidPlan("interp.slices exceeds the blocks of XY8-" + format_double(l));
        std::vector<int> ps;
        for (int j = 0; j <= slices; ++j) ps.push_back(static_cast<int>((static_cast<long long>(j) * n) / slices));
        const auto fr = supersampled_fringe(n, base, window, ps, p, cfg.field, init);
        const auto un = uniform_fringe(n, fr.x, p, cfg.field, init);
        for (std::size_t i = 0; i < fr.x.size(); ++i) {
            order.push_back(l);
            teff.push_back(fr.x[i]);
            s_interp.push_back(fr.s[i]);
            s_uniform.push_back(un.s[i]);
        }
    }
    ResultTable t;
    t.add_column("order", order);
    t.add_column("tau_eff_us", teff);
    t.add_column("S_interp", s_interp);
    t.add_column("S_uniform", s_uniform);
    t.set_meta("base_tau_us", format_double(base));
    t.set_meta("tau_opt_us", format_double(tau));
    return t;
}

std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

const char* version() { return MAGSIM_VERSION; }

ResultTable run_experiment(const ExperimentConfig& cfg)
{
    ResultTable t;
    try {
        switch (cfg.mode) {
        case Mode::xy8_fringe: t = run_xy8_fringe(cfg); break;
        case Mode::tau_scan: t = run_tau_scan(cfg); break;
        case Mode::field_sweep: t = run_field_sweep(cfg); break;
        case Mode::filter_map: t = run_filter_map(cfg); break;
        case Mode::sensitivity_table: t = run_sensitivity(cfg); break;
        case Mode::maytag: t = run_maytag(cfg); break;
        case Mode::spinlock: t = run_spinlock(cfg); break;
        case Mode::vector: t = run_vector(cfg); break;
        case Mode::interp_demo: t = run_interp_demo(cfg); break;
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), e.name(), std::string(mode_name(cfg.mode)) + ": " + e.what());
    }

    ResultTable out;
    out.set_meta("version", version());
    out.set_meta("mode", mode_name(cfg.mode));
    out.set_meta("seed", std::to_string(cfg.seed));
    out.set_meta("config_hash", hex(config_hash(cfg)));
    out.set_meta("derived.delta_MHz", format_double(cfg.delta()));
    out.set_meta("derived.b_z_G", format_double(cfg.field.b_z));
    for (const auto& [k, v] : t.metadata) out.set_meta("result." + k, v);
    for (const auto& [k, v] : cfg.values) out.set_meta(k, v);
    out.names = std::move(t.names);
    out.columns = std::move(t.columns);
    return out;
}

ConfigMap config_from_metadata(const ResultTable& t)
{
    ConfigMap m;
    for (const auto& k : config_keys())
        if (const auto* v = t.meta(k.name)) m[k.name] = *v;
    if (m.empty()) throw ValidationError("table metadata holds no configuration");
    return m;
}

}  // namespace magsim
