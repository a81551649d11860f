#pragma once

#include "magsim/oracle.hpp"
#include "magsim/spin_core.hpp"
#include "magsim/table.hpp"

#include <vector>

// Low-frequency transverse tones seen through a pulse train of L two-pulse
// blocks of duration t_b. A tone at f has a half period of
// L_p = 1/(2 f t_b) blocks.
namespace magsim {

struct NoiseTone {
    double amplitude = 0.0;  // G
    double freq = 0.0;       // MHz
    double phase = 0.0;      // rad
};

struct ToneAngles {
    std::vector<double> alpha;  // per-pulse mixing angle during block j = 1..L
    bool regime_ok = true;      // 1/T2 < f < |omega0|, or f = 0
};

// alpha_per_gauss: closed-form alpha per Gauss of transverse field.
// omega0 or t2 of zero skip the corresponding regime bound.
ToneAngles tone_angles(const NoiseTone& tone, double alpha_per_gauss, int blocks,
                       double block_time, double omega0 = 0.0, double t2 = 0.0);

double half_period_blocks(double freq, double block_time);

// sin(pi L / 2L_p) / sin(pi / 2L_p), with its limits; L at DC.
double grating_factor(int blocks, double l_p);

// cos{2 alpha cos(pi (L+1)/2L_p + phase) G}; G as above.
double filter_response(double alpha, int blocks, double l_p, double phase);
// Uniform quadrature of filter_response over phase in [0, 2 pi).
double filter_response_averaged(double alpha, int blocks, double l_p, int quadrature = 64);

// Phase-averaged fringe depth with the tone over the depth of a DC field
// with the same RMS. Tends to (G/L)^2 for small alpha.
double depth_ratio(double alpha, int blocks, double l_p, int quadrature = 64);

struct FilterCurve {
    std::vector<double> freqs;     // MHz
    std::vector<double> response;  // signed G/L
    std::vector<double> depth;     // depth_ratio
    double cutoff = 0.0;           // MHz
};

FilterCurve filter_curve(double alpha, int blocks, double block_time,
                         const std::vector<double>& freqs, int quadrature = 64);

// First sign change of G/L for `blocks` blocks filling total_time. Throws
// NoZeroFound when the response keeps its sign up to the block Nyquist rate.
double filter_cutoff(double total_time, int blocks);

// [sin(pi omega T2*)/omega]^2
double ramsey_filter(double omega, double t2_star);
double ramsey_filter_normalized(double omega, double t2_star);
double ramsey_cutoff(double t2_star);

struct OracleToneOptions {
    int phases = 16;
    oracle::InitialState init{};
    oracle::RunOptions run{};
};

// 1 - S averaged over the tone phase for XY8-`cycles` at spacing tau, with
// the tone as the only transverse field.
double oracle_tone_depth(const SpinSystemParams& p, double delta, const NoiseTone& tone,
                         int cycles, double tau, const OracleToneOptions& opts = {});

// oracle_tone_depth over the depth of a static field amplitude/sqrt(2).
double oracle_depth_ratio(const SpinSystemParams& p, double delta, const NoiseTone& tone,
                          int cycles, double tau, const OracleToneOptions& opts = {});

ResultTable filter_table(const FilterCurve& curve);

}  // namespace magsim
