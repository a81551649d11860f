#pragma once

#include "magsim/filters.hpp"
#include "magsim/fringe.hpp"
#include "magsim/oracle.hpp"
#include "magsim/spin_core.hpp"

#include <optional>
#include <vector>

namespace magsim {

// ---- maytagging ----------------------------------------------------------

enum class MaytagWaveform { square, sine };

// The bias alternates between Delta = +delta_amp and -delta_amp. Each half
// period holds a whole number of two-pulse blocks, so the realised rate can
// differ slightly from omega_lf.
struct MaytagConfig {
    double omega_lf = 0.5;  // MHz
    double delta_amp = 141.0;
    NoiseTone signal_tone{};
    int cycles = 16;  // maytag periods
    MaytagWaveform waveform = MaytagWaveform::square;
};

struct MaytagPlan {
    int blocks_per_half = 1;
    double tau_plus = 0.0;   // spacing at +Delta, us
    double tau_minus = 0.0;  // spacing at -Delta, us
    double omega_lf = 0.0;   // realised rate, MHz
    double alpha_per_gauss_plus = 0.0;
    double alpha_per_gauss_minus = 0.0;
};

MaytagPlan plan_maytag(const MaytagConfig& cfg, const SpinSystemParams& p);

// Block timeline of the maytag train: block j runs at sign[j] Delta.
struct MaytagTimeline {
    std::vector<double> start;  // us
    std::vector<double> tau;
    std::vector<int> sign;
    double total = 0.0;
};

MaytagTimeline maytag_timeline(const MaytagPlan& plan, int cycles);

// Per-pulse mixing angle of each block under the modulation.
std::vector<double> maytag_angles(const MaytagConfig& cfg, const MaytagPlan& plan,
                                  const NoiseTone& tone);

// |sum_j s_j exp(i 2 pi f t_j)| / L over the block midpoints.
double maytag_response(const MaytagConfig& cfg, const MaytagPlan& plan, double freq);

// S after each maytag period, x = pulses so far. Analytic from the block angles.
FringeSeries maytag_signal(const MaytagConfig& cfg, const SpinSystemParams& p);

struct MaytagOracleOptions {
    int phases = 8;  // tone phase average; 1 keeps the configured phase
    oracle::InitialState init{};
    oracle::RunOptions run{};
};

// S after the full train from the oracle with the square-wave bias.
double maytag_oracle_signal(const MaytagConfig& cfg, const SpinSystemParams& p,
                            const NoiseTone& tone, double phase_offset = 0.0,
                            const MaytagOracleOptions& opts = {});

// 1 - S averaged over tone phase.
double maytag_oracle_depth(const MaytagConfig& cfg, const SpinSystemParams& p,
                           const NoiseTone& tone, const MaytagOracleOptions& opts = {});

// ---- spin lock -----------------------------------------------------------

struct SpinLockConfig {
    double rabi = 4.12;      // MHz
    double lock_time = 10.0;  // us
    double detuning_db = 0.0;  // drive amplitude offset, 20 log10
    double t1rho = 350.0;     // us
};

double effective_rabi(const SpinLockConfig& cfg);

// Exchange rate alpha |omega0| in rad/us; the DD fringe with N = 2 |omega0| t.
double spinlock_rate(const EffectiveModel& model);

// 1 - g^2/(g^2+d^2) sin^2(sqrt(g^2+d^2) t) under exp(-t/T1rho), with
// g = spinlock_rate and d = pi (Omega - |omega0|). At the match this is
// 1/2 [1 + cos(2 g t)].
double spinlock_signal(const SpinLockConfig& cfg, const SpinSystemParams& p,
                       const FieldConfig& field);

// Oracle: prepare along x, lock with a continuous x drive in the rotating
// frame, return. No decay.
double spinlock_oracle_signal(const SpinLockConfig& cfg, const SpinSystemParams& p,
                              const FieldConfig& field);

struct ResonanceCurve {
    std::vector<double> rabi;
    std::vector<double> transfer;  // 1 - S
    double peak_rabi = 0.0;
};

ResonanceCurve spinlock_resonance(const SpinLockConfig& cfg, const SpinSystemParams& p,
                                  const FieldConfig& field, const std::vector<double>& rabis,
                                  bool use_oracle);

// Oracle Hartmann-Hahn match: the drive in [lo, hi] that maximises the
// transfer averaged over two analytic exchange periods. Grid of `points`
// then Brent inside the best cell.
double spinlock_match(const SpinLockConfig& cfg, const SpinSystemParams& p,
                      const FieldConfig& field, double lo, double hi, int points = 41);

// S vs lock time at k * dt, k = 0..points-1.
FringeSeries spinlock_fringe(const SpinLockConfig& cfg, const SpinSystemParams& p,
                             const FieldConfig& field, double dt, int points, bool use_oracle);

// ---- vector reconstruction -----------------------------------------------

struct BiasField {
    double magnitude = 0.0;  // G
    double direction = 0.0;  // rad, in-plane
};

struct VectorEstimate {
    double theta = 0.0;  // polar angle, rad
    double phi = 0.0;    // in-plane direction, rad
    double phi_alt = 0.0;  // mirror solution about the bias axis
    bool phi_defined = true;
};

VectorEstimate vector_reconstruct(double b_par, double b_perp, double b_perp_with_bias,
                                  const BiasField& bias, double tolerance = 1e-9);

// |B_perp + bias| for a transverse field of magnitude b_perp at angle phi.
double biased_magnitude(double b_perp, double phi, const BiasField& bias);

}  // namespace magsim
