#pragma once

#include "magsim/fringe.hpp"
#include "magsim/spin_core.hpp"
#include "magsim/table.hpp"

#include <optional>
#include <vector>

// Sensitivities are in uT/sqrt(Hz); fields in G, times in us.
namespace magsim {

struct CsrReadout {
    double c_multiplier = 2.0;
    double dead_time = 1.3;  // us
};

struct ReadoutModel {
    double c_factor = 0.5 / 17.27;  // projection noise 1/2 over the quoted readout noise
    double dead_time = 1.3;         // us
    std::optional<CsrReadout> csr;

    // C such that a projection noise of 1/2 corresponds to the given dS/C.
    static ReadoutModel from_noise_ratio(double ds_over_c, double dead_time = 1.3);
    void validate() const;
};

struct DecayModel {
    double t2 = 60.0;
    double p_exp = 1.0;
    double t2_star = 1.16;

    double envelope(double t) const;  // exp(-(t/T2)^p)
    void validate() const;
};

// G sqrt(us) to uT/sqrt(Hz)
inline constexpr double kGaussRootMicrosecond = 0.1;

double sensitivity(const SpinSystemParams& p, const EffectiveModel& model,
                   const DecayModel& decay, const ReadoutModel& readout, double t);

// Decay-free, dead-time-free form at t = T2.
double sensitivity_limit(const SpinSystemParams& p, const EffectiveModel& model,
                         const ReadoutModel& readout, double t2);

struct OptimalTime {
    double t = 0.0;
    double eta = 0.0;
};

// Minimum of sensitivity over [T2/10, 3 T2].
OptimalTime optimal_time(const SpinSystemParams& p, const EffectiveModel& model,
                         const DecayModel& decay, const ReadoutModel& readout);

double ramsey_sensitivity(const SpinSystemParams& p, const ReadoutModel& readout, double t);

// eta / sqrt(M (t + t_d)), in uT.
double min_field(double eta, long long m, double t, double t_d);

// sqrt(T2 omega_n): gain over Ramsey when signal noise is cut at omega_n.
double signal_noise_gain(double t2, double omega_n);

// eta with C -> C_CSR and t_d -> CSR dead time, over eta without CSR.
double csr_gain(const ReadoutModel& readout, double t);

// (pi Delta / |A_perp F|) sqrt(T2*/T2); the ancilla protocol wins at equal C below 1.
double crossover_ratio(const SpinSystemParams& p, const EffectiveModel& model,
                       const DecayModel& decay);

struct DynamicRangeReport {
    double tilt_loss = 1.0;
    double pulse_infidelity = 0.0;
    bool rwa_ok = true;
    std::optional<double> b_t;  // G, when contrast data were fitted
};

DynamicRangeReport dynamic_range(const SpinSystemParams& p, const EffectiveModel& model,
                                 double b_perp, double rabi,
                                 const std::optional<FringeSeries>& contrast_data = std::nullopt);

// Sigmoid turning point of contrast vs applied field.
double fit_turning_point(const FringeSeries& contrast);

// pi/2 - arctan(gamma_e B0 / Delta)
double compensated_preparation(double b0_perp, double delta, double gamma_e,
                               double epsilon = kDegenerateEpsilon);

ResultTable sensitivity_table(const SpinSystemParams& p, const std::vector<double>& deltas,
                              double b_perp, double t, const DecayModel& decay,
                              const ReadoutModel& readout);

}  // namespace magsim
