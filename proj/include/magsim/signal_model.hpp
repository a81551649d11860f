#pragma once

#include "magsim/fringe.hpp"
#include "magsim/oracle.hpp"
#include "magsim/spin_core.hpp"
#include "magsim/table.hpp"

#include <vector>

namespace magsim {

// N counts pi pulses throughout.
double analytic_signal(double alpha, double n_pulses);

// Trace-overlap form 1 - sin^2(N alpha/2) cos^2(alpha/2).
double overlap_signal(const EffectiveModel& model, double n_pulses);

// x is b_e of each sweep point, which must increase strictly.
FringeSeries fringe_vs_field(const SpinSystemParams& p, const std::vector<FieldConfig>& sweep,
                             double n_pulses);

struct TauScan {
    double tau = 0.0;    // spacing with the deepest fringe, us
    double depth = 0.0;  // 1 - min S over the probed pulse counts
    std::vector<double> taus;
    std::vector<double> depths;
};

struct TauScanOptions {
    double span = 0.05;  // relative half-width around 1/(2|omega0|)
    int points = 201;
    oracle::InitialState init{};
    oracle::RunOptions run{};
};

// Depth of the XY8 fringe over 1.5 closed-form half periods at spacing tau.
double fringe_depth(const SpinSystemParams& p, const FieldConfig& field, double tau,
                    const TauScanOptions& opts = {});

// Grid scan followed by a bracketed Brent refinement. Results are cached
// per (params, field, options) for the lifetime of the process.
TauScan optimal_tau(const SpinSystemParams& p, const FieldConfig& field,
                    const TauScanOptions& opts = {});

// XY8 fringe vs pulse count N = 8k, k = 0..cycles.
FringeSeries oracle_fringe(const SpinSystemParams& p, const FieldConfig& field, double tau,
                           int cycles, const oracle::InitialState& init = {},
                           const oracle::RunOptions& opts = {});

// Per-pulse fringe phase rate of the oracle in rad, from the spectral
// estimate refined by a cosine fit.
double oracle_alpha(const FringeSeries& fringe);

ResultTable fringe_table(const FringeSeries& series);

}  // namespace magsim
