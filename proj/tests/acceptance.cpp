// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "magsim/analysis.hpp"
#include "magsim/config.hpp"
#include "magsim/error.hpp"
#include "magsim/experiment.hpp"
#include "magsim/filters.hpp"
#include "magsim/metrology.hpp"
#include "magsim/modes.hpp"
#include "magsim/sequences.hpp"
#include "magsim/signal_model.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace magsim;

namespace {

const SpinSystemParams kN14 = SpinSystemParams::nitrogen14();

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [miss]");
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double scan_tau(const FieldConfig& f)
{
    TauScanOptions o;
    o.points = 41;
    o.span = 0.03;
    return optimal_tau(kN14, f, o).tau;
}

// Oracle fringe over `periods` closed-form periods at the optimal spacing.
FringeSeries fringe_at(const FieldConfig& f, double periods)
{
    const double alpha = std::abs(derive_effective(kN14, f).alpha);
    const int cycles = static_cast<int>(std::ceil(periods * kTwoPi / alpha / 8.0));
    return oracle_fringe(kN14, f, scan_tau(f), cycles);
}

Outcome effective_model_fidelity()
{
    Outcome o;
    double worst = 0.0, lo = 1e9, hi = 0.0;
    for (double delta : {139.0, 141.0, 150.0, 174.5})
        for (double b : {0.05, 0.1, 0.2098}) {
            const auto f = field_at(kN14, delta, b);
            const double closed = std::abs(derive_effective(kN14, f).alpha);
            const double ratio = oracle_alpha(fringe_at(f, 4.0)) / closed;
            worst = std::max(worst, std::abs(ratio - 1.0));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    o.require(worst <= 0.05, fmt("oracle/closed alpha in [%.4f, %.4f], worst rel %.4f <= 0.05", lo, hi, worst));
    return o;
}

Outcome signal_equivalence()
{
    Outcome o;
    double worst_bound = -1.0;
    for (double alpha : {1e-3, 0.002, 0.008032, 0.03, 0.1})
        for (int i = 0; i <= 400; ++i) {
            EffectiveModel m;
            m.alpha = alpha;
            const double n = (kPi / alpha) * i / 400.0;
            const double d = std::abs(analytic_signal(alpha, n) - overlap_signal(m, n));
            worst_bound = std::max(worst_bound, d - alpha * alpha / 4.0);
        }
    o.require(worst_bound <= 1e-15, fmt("max(|S1 - S_overlap| - alpha^2/4) = %.2e", worst_bound));

    double worst = 0.0;
    for (double b : {0.1, 0.2098}) {
        const auto f = field_at(kN14, 141.0, b);
        const auto m = derive_effective(kN14, f);
        const int cycles = static_cast<int>(std::floor(kPi / std::abs(m.alpha) / 8.0));
        const auto fr = oracle_fringe(kN14, f, scan_tau(f), cycles);
        for (std::size_t i = 0; i < fr.size(); ++i)
            worst = std::max(worst, std::abs(fr.s[i] - overlap_signal(m, fr.x[i])));
    }
    o.require(worst <= 0.01, fmt("|S_overlap - S_oracle| max %.4f <= 0.01 (N alpha <= pi)", worst));
    return o;
}

Outcome fringe_ratio()
{
    Outcome o;
    const double r1 = oracle_alpha(fringe_at(field_at(kN14, 141.0, 0.0978), 4.0));
    const double r2 = oracle_alpha(fringe_at(field_at(kN14, 141.0, 0.2098), 4.0));
    const double want = 0.2098 / 0.0978;
    o.require(std::abs(r2 / r1 / want - 1.0) <= 0.05, fmt("frequency ratio %.4f vs %.4f", r2 / r1, want));
    return o;
}

Outcome filter_cutoffs()
{
    Outcome o;
    const double tau = scan_tau(field_at(kN14, 141.0, 0.2098));
    const double c13 = filter_cutoff(8.0 * 13 * tau, 52);
    o.require(c13 >= 0.0634 / 2.0 && c13 <= 0.0634 * 2.0, fmt("XY8-13 cutoff %.2f kHz vs 63.4", 1e3 * c13));

    std::vector<double> inv_t, cut;
    for (int cycles : {2, 4, 8, 13, 16}) {
        const double t = 8.0 * cycles * tau;
        inv_t.push_back(1.0 / t);
        cut.push_back(filter_cutoff(t, 4 * cycles));
    }
    const double r2 = testing::fit_line(inv_t, cut).r2;
    o.require(r2 > 0.95, fmt("cutoff vs 1/t over 5 pulse numbers R^2 %.6f", r2));

    const double rc = ramsey_cutoff(1.16);
    o.require(rc == 1.0 / 1.16 && std::abs(rc - 0.862) < 5e-4, fmt("Ramsey cutoff %.4f kHz", 1e3 * rc));
    return o;
}

Outcome interpolation()
{
    Outcome o;
    const auto f = field_at(kN14, 150.0, 0.0683);
    const double window = 0.001;
    const double tau = scan_tau(f);
    const double base = std::floor(tau / window) * window;
    // blocks for half an oracle fringe period
    const double rate = oracle_alpha(fringe_at(f, 4.0));
    const int n = 4 * static_cast<int>(std::lround(kPi / (2.0 * rate) / 4.0));

    const auto peak = supersample_peak(n, base, window, 16, kN14, f);
    std::vector<double> taus;
    for (int i = 0; i <= 400; ++i) taus.push_back(base + window * i / 400.0);
    const auto fine = uniform_fringe(n, taus, kN14, f);
    const double fine_depth = 1.0 - *std::min_element(fine.s.begin(), fine.s.end());
    const double rel = std::abs(peak.depth - fine_depth) / fine_depth;
    o.require(rel <= 0.02, fmt("n = %.0f blocks: supersampled depth %.4f vs fine %.4f", n, peak.depth, fine_depth) +
                               fmt(" (rel %.4f)", rel));

    const auto f141 = field_at(kN14, 141.0, 0.2098);
    std::vector<double> ns, err;
    for (int blocks : {8, 16, 32, 64}) {
        ns.push_back(blocks);
        err.push_back(measured_interpolation_error(make_plan(0, blocks / 2, blocks), 0.1207, window, kN14, f141));
    }
    const double r2 = testing::quadratic_r2(ns, err);
    o.require(r2 > 0.9, fmt("interpolation error vs N^2 R^2 %.5f", r2));
    return o;
}

Outcome sensitivity_checks()
{
    Outcome o;
    const auto readout = ReadoutModel::from_noise_ratio(17.27);
    DecayModel decay;
    decay.t2 = 60.0;
    decay.p_exp = 1.0;
    decay.t2_star = 1.16;
    const auto m = derive_effective(kN14, field_at(kN14, 139.0, 0.2098));
    const double eta = sensitivity(kN14, m, decay, readout, 60.0);
    o.require(eta >= 6.02 / 2.0 && eta <= 6.02 * 2.0, fmt("ancilla eta %.3f vs 6.02 uT/rtHz", eta));
    const double ramsey = ramsey_sensitivity(kN14, readout, decay.t2_star);
    o.require(ramsey >= 3.86 / 2.0 && ramsey <= 3.86 * 2.0, fmt("Ramsey eta %.3f vs 3.86 uT/rtHz", ramsey));
    ReadoutModel csr = readout;
    csr.csr = CsrReadout{2.0, readout.dead_time};
    const double g = csr_gain(csr, 60.0);
    o.require(std::abs(g - 0.5) < 1e-12, fmt("CSR 2C gives eta x %.12f (%.3f uT/rtHz)", g, eta * g));
    return o;
}

Outcome maytag_selectivity()
{
    Outcome o;
    MaytagOracleOptions opts;
    opts.phases = 4;
    for (int cycles : {16, 24}) {
        MaytagConfig cfg;
        cfg.omega_lf = 0.5;
        cfg.delta_amp = 141.0;
        cfg.cycles = cycles;
        const auto plan = plan_maytag(cfg, kN14);
        const double b = 0.02;
        const double matched = maytag_oracle_depth(cfg, kN14, {b, plan.omega_lf, 0.0}, opts);
        const double dc = maytag_oracle_depth(cfg, kN14, {b, 0.0, 0.0}, opts);
        const double second = maytag_oracle_depth(cfg, kN14, {b, 2.0 * plan.omega_lf, 0.0}, opts);
        o.require(matched >= 10.0 * dc && matched >= 10.0 * second,
                  fmt("%.0f cycles: matched/DC %.1f, ", cycles, matched / dc) +
                      fmt("matched/2w %.1f", matched / second));
    }
    return o;
}

Outcome spin_lock()
{
    Outcome o;
    const auto f = field_at(kN14, 141.0, 0.2098);
    const auto m = derive_effective(kN14, f);
    const double w0 = std::abs(m.omega0);
    SpinLockConfig cfg;
    cfg.rabi = w0;
    std::vector<double> rabis;
    for (int i = 0; i <= 40; ++i) rabis.push_back(w0 * (0.5 + i / 40.0));
    const double step = w0 / 40.0;
    const auto curve = spinlock_resonance(cfg, kN14, f, rabis, true);
    o.require(std::abs(curve.peak_rabi - w0) <= step,
              fmt("oracle resonance at %.4f MHz vs |omega0| %.4f, step %.4f", curve.peak_rabi, w0, step));

    cfg.rabi = spinlock_match(cfg, kN14, f, 0.9 * w0, 1.1 * w0);
    cfg.t1rho = 0.0;
    const double g = spinlock_rate(m);
    const double period = kPi / g;
    const auto fr = spinlock_fringe(cfg, kN14, f, period / 32.0, 4 * 32 + 1, true);
    FringeOptions fo;
    fo.refine = true;
    const double got = fringe_extract(fr, fo).freq;
    const double want = g / kPi;
    o.require(std::abs(got / want - 1.0) <= 0.05,
              fmt("exchange at match %.4f MHz: %.5f vs %.5f MHz", cfg.rabi, got, want));
    return o;
}

Outcome fitting_pipeline()
{
    Outcome o;
    auto line = [](double a, double b, double sigma, int n, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma);
        std::vector<double> x, y;
        for (int i = 0; i < n; ++i) {
            x.push_back(-1.0 + 2.0 * i / (n - 1));
            y.push_back(a + b * x.back() + noise(rng));
        }
        return std::pair{x, y};
    };
    int covered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // same datasets and seeds as the unit suite
        const auto [x, y] = line(0.5, -0.8, 0.2, 25, 1000 + trial);
        const auto mc = monte_carlo_uncertainty(chi2_fit(x, y, FitModel::linear, {0.0, 0.0}), 400, 7 + trial);
        const auto [lo, hi] = sample_interval(mc, 1, 0.95);
        if (lo <= -0.8 && -0.8 <= hi) ++covered;
    }
    o.require(covered >= 90, fmt("95%% intervals cover the truth in %.0f/100", covered));

    const auto [x, y] = line(1.0, 2.0, 0.1, 30, 17);
    const auto fit = chi2_fit(x, y, FitModel::linear, {0.0, 0.0});
    const auto mc = monte_carlo_uncertainty(fit, 1000, 99);
    double sx = 0.0, sxx = 0.0;
    for (double v : x) {
        sx += v;
        sxx += v * v;
    }
    const double n = x.size();
    const double det = n * sxx - sx * sx;
    const double s2 = fit.sigma_y * fit.sigma_y;
    const double ra = mc.param_sigmas[0] / std::sqrt(s2 * sxx / det);
    const double rb = mc.param_sigmas[1] / std::sqrt(s2 * n / det);
    o.require(std::abs(ra - 1.0) <= 0.1 && std::abs(rb - 1.0) <= 0.1,
              fmt("MC/analytic sigma %.3f (intercept), %.3f (slope)", ra, rb));
    return o;
}

Outcome determinism()
{
    Outcome o;
    auto csv = [](const ExperimentConfig& cfg) {
        std::ostringstream os;
        write_csv(os, run_experiment(cfg));
        return os.str();
    };
    int runs = 0, mismatched = 0;
    std::string which;
    auto check = [&](const ExperimentConfig& cfg, const std::string& label) {
        ++runs;
        if (csv(cfg) != csv(cfg)) {
            ++mismatched;
            which += " " + label;
        }
    };
    for (Mode mode : all_modes()) check(build_config({{"run.mode", mode_name(mode)}}), mode_name(mode));
    for (const auto& entry : std::filesystem::directory_iterator(MAGSIM_CONFIG_DIR))
        if (entry.path().extension() == ".ini") check(load_config(entry.path().string()), entry.path().filename());
    o.require(mismatched == 0, fmt("%.0f runs, %.0f not byte-identical", runs, mismatched) + which);
    return o;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 effective-model fidelity", effective_model_fidelity},
        {"2 signal equivalence", signal_equivalence},
        {"3 fringe-frequency ratio", fringe_ratio},
        {"4 filter cutoffs", filter_cutoffs},
        {"5 quantum interpolation", interpolation},
        {"6 sensitivity", sensitivity_checks},
        {"7 maytag selectivity", maytag_selectivity},
        {"8 spin lock", spin_lock},
        {"9 fitting pipeline", fitting_pipeline},
        {"10 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("threw: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!out.pass) ++failed;
        std::printf("%s  criterion %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), secs,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
