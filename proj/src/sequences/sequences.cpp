#include "magsim/sequences.hpp"

#include "magsim/error.hpp"
#include "magsim/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace magsim {

namespace {

constexpr double kXY8[8] = {0.0, kPi / 2, 0.0, kPi / 2, kPi / 2, 0.0, kPi / 2, 0.0};

PulseTiming resolve(PulseTiming t)
{
    if (t.t_pi < 0.0) throw InvalidTiming("t_pi must be non-negative");
    if (t.t_pi > 0.0) {
        const double implied = 1.0 / (2.0 * t.t_pi);
        if (t.rabi <= 0.0)
            t.rabi = implied;
        else if (std::abs(t.rabi - implied) > 1e-9 * implied)
            throw InvalidTiming("rabi and t_pi disagree: a pi pulse lasts 1/(2 rabi)");
    }
    return t;
}

Pulse make_pulse(double phase, double angle, const PulseTiming& t)
{
    Pulse p;
    p.phase = phase;
    p.angle = angle;
    p.rabi = t.rabi;
    p.duration = t.t_pi * angle / kPi;
    return p;
}

void append_block(PulseSequence& seq, double tau, int first, const PulseTiming& t)
{
    if (!(tau > t.t_pi)) throw InvalidTiming("tau must exceed t_pi");
    const double d = tau - t.t_pi;
    seq.elements.push_back(Delay{0.5 * d});
    seq.elements.push_back(make_pulse(xy8_phase(first), kPi, t));
    seq.elements.push_back(Delay{d});
    seq.elements.push_back(make_pulse(xy8_phase(first + 1), kPi, t));
    seq.elements.push_back(Delay{0.5 * d});
    seq.meta.n_pi += 2;
}

void append(PulseSequence& a, const PulseSequence& b)
{
    a.elements.insert(a.elements.end(), b.elements.begin(), b.elements.end());
}

std::string axis_label(double phase)
{
    const double w = std::fmod(std::fmod(phase, kTwoPi) + kTwoPi, kTwoPi);
    const char* names[] = {"x", "y", "-x", "-y"};
    for (int q = 0; q < 4; ++q)
        if (std::abs(w - q * kPi / 2) < 1e-12) return names[q];
    return format_double(phase);
}

}  // namespace

double xy8_phase(int i) { return kXY8[((i % 8) + 8) % 8]; }

PulseSequence preparation_pulse(const PulseTiming& timing)
{
    PulseSequence s;
    s.elements.push_back(make_pulse(0.0, kPi / 2, resolve(timing)));
    s.meta.label = "prep";
    return s;
}

PulseSequence readout_pulse(const PulseTiming& timing)
{
    PulseSequence s;
    s.elements.push_back(make_pulse(kPi, kPi / 2, resolve(timing)));
    s.meta.label = "readout";
    return s;
}

PulseSequence cpmg_block(double tau, int first, const PulseTiming& timing)
{
    PulseSequence s;
    append_block(s, tau, first, resolve(timing));
    s.meta.tau = tau;
    s.meta.label = "cpmg";
    return s;
}

PulseSequence xy8_cycle(double tau, const PulseTiming& timing)
{
    const PulseTiming t = resolve(timing);
    PulseSequence s;
    for (int b = 0; b < 4; ++b) append_block(s, tau, 2 * b, t);
    s.meta.tau = tau;
    s.meta.label = "xy8";
    return s;
}

PulseSequence build_xy8(int cycles, double tau, double t_pi, double rabi)
{
    if (cycles < 0) throw InvalidTiming("cycle count must be non-negative");
    const PulseTiming t = resolve({t_pi, rabi});
    if (!(tau > t.t_pi)) throw InvalidTiming("tau must exceed t_pi");
    PulseSequence s = preparation_pulse(t);
    for (int b = 0; b < 4 * cycles; ++b) append_block(s, tau, 2 * b, t);
    append(s, readout_pulse(t));
    s.meta.tau = tau;
    s.meta.label = "XY8-" + std::to_string(cycles);
    return s;
}

double duty_cycle(const PulseSequence& seq)
{
    for (const auto& e : seq.elements)
        if (const auto* p = std::get_if<Pulse>(&e); p && p->angle == kPi)
            return seq.meta.tau > 0.0 ? p->duration / seq.meta.tau : 0.0;
    return 0.0;
}

InterpolationPlan make_plan(int k, int p, int n)
{
    if (n <= 0 || p < 0 || p > n) throw InvalidPlan("need 0 <= p <= n and n >= 1");
    InterpolationPlan plan{k, p, n, std::vector<int>(n, 0)};
    for (int j = 0; j < n; ++j)
        plan.pattern[j] = static_cast<int>((static_cast<long long>(j + 1) * p) / n -
                                           (static_cast<long long>(j) * p) / n);
    return plan;
}

void validate_plan(const InterpolationPlan& plan)
{
    if (plan.n <= 0 || plan.p < 0 || plan.p > plan.n) throw InvalidPlan("need 0 <= p <= n");
    if (static_cast<int>(plan.pattern.size()) != plan.n)
        throw InvalidPlan("pattern length differs from n");
    int ones = 0;
    for (int b : plan.pattern) {
        if (b != 0 && b != 1) throw InvalidPlan("pattern entries must be 0 or 1");
        ones += b;
    }
    if (ones != plan.p) throw InvalidPlan("pattern must hold exactly p long blocks");
}

PulseSequence interpolated_blocks(const InterpolationPlan& plan, double base_tau, double dtau,
                                  const PulseTiming& timing)
{
    validate_plan(plan);
    const PulseTiming t = resolve(timing);
    PulseSequence s;
    for (int j = 0; j < plan.n; ++j)
        append_block(s, plan.pattern[j] ? base_tau + dtau : base_tau, 2 * j, t);
    s.meta.tau = base_tau + dtau * plan.p / plan.n;
    s.meta.label = "interp";
    return s;
}

PulseSequence interpolated_sequence(const InterpolationPlan& plan, double base_tau, double dtau,
                                    double t_pi, double rabi)
{
    const PulseTiming t = resolve({t_pi, rabi});
    PulseSequence s = preparation_pulse(t);
    const PulseSequence blocks = interpolated_blocks(plan, base_tau, dtau, t);
    append(s, blocks);
    append(s, readout_pulse(t));
    s.meta = blocks.meta;
    s.meta.label = "interp " + std::to_string(plan.p) + "/" + std::to_string(plan.n);
    return s;
}

double interpolation_error(int n_pulses, double alpha, double dtau)
{
    const double na = n_pulses * alpha;
    const double g = 2.0 - 0.5 * alpha * alpha;
    return 0.25 * na * na * dtau * dtau * g * g;
}

double measured_interpolation_error(const InterpolationPlan& plan, double base_tau, double dtau,
                                    const SpinSystemParams& p, const FieldConfig& field)
{
    const PulseSequence approx = interpolated_blocks(plan, base_tau, dtau);
    const InterpolationPlan flat = make_plan(plan.k, 0, plan.n);
    const PulseSequence exact = interpolated_blocks(flat, base_tau + dtau * plan.p / plan.n, 0.0);
    const auto ua = oracle::sequence_unitary(approx, p, field);
    const auto ue = oracle::sequence_unitary(exact, p, field);
    return 1.0 - oracle::gate_fidelity(ua.u, ue.u);
}

FringeSeries supersampled_fringe(int n, double base_tau, double dtau, const std::vector<int>& ps,
                                 const SpinSystemParams& p, const FieldConfig& field,
                                 const oracle::InitialState& init)
{
    FringeSeries out;
    out.x_label = "tau_eff_us";
    out.s_label = "S";
    for (int num : ps) {
        const auto seq = interpolated_sequence(make_plan(0, num, n), base_tau, dtau);
        out.x.push_back(seq.meta.tau);
        out.s.push_back(oracle::run_sequence(seq, p, field, init));
    }
    return out;
}

FringeSeries uniform_fringe(int n, const std::vector<double>& taus, const SpinSystemParams& p,
                            const FieldConfig& field, const oracle::InitialState& init)
{
    FringeSeries out;
    out.x_label = "tau_us";
    out.s_label = "S";
    const InterpolationPlan flat = make_plan(0, 0, n);
    for (double tau : taus) {
        out.x.push_back(tau);
        out.s.push_back(oracle::run_sequence(interpolated_sequence(flat, tau, 0.0), p, field, init));
    }
    return out;
}

PeakSearch supersample_peak(int n, double base_tau, double dtau, int slices,
                            const SpinSystemParams& p, const FieldConfig& field,
                            const oracle::InitialState& init)
{
    if (slices < 1 || slices > n) throw InvalidPlan("need 1 <= slices <= n");
    std::vector<int> coarse;
    for (int j = 0; j <= slices; ++j)
        coarse.push_back(static_cast<int>((static_cast<long long>(j) * n) / slices));
    PeakSearch r;
    r.coarse = supersampled_fringe(n, base_tau, dtau, coarse, p, field, init);
    const auto best = std::min_element(r.coarse.s.begin(), r.coarse.s.end()) - r.coarse.s.begin();
    const int lo = coarse[std::max<long>(0, best - 1)];
    const int hi = coarse[std::min<long>(slices, best + 1)];
    std::vector<int> fine;
    for (int num = lo; num <= hi; ++num)
        fine.push_back(num);
    r.fine = supersampled_fringe(n, base_tau, dtau, fine, p, field, init);
    const auto k = std::min_element(r.fine.s.begin(), r.fine.s.end()) - r.fine.s.begin();
    r.tau = r.fine.x[k];
    r.depth = 1.0 - r.fine.s[k];
    return r;
}

void write_timeline(std::ostream& os, const PulseSequence& seq)
{
    os << "t_start_us,kind,axis,angle_rad,duration_us\n";
    double t = 0.0;
    for (const auto& e : seq.elements) {
        if (const auto* d = std::get_if<Delay>(&e)) {
            os << format_double(t) << ",delay,,0," << format_double(d->t) << '\n';
            t += d->t;
        } else {
            const Pulse& p = std::get<Pulse>(e);
            os << format_double(t) << ",pulse," << axis_label(p.phase) << ','
               << format_double(p.angle) << ',' << format_double(p.duration) << '\n';
            t += p.duration;
        }
    }
}

}  // namespace magsim
