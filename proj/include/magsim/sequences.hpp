#pragma once

#include "magsim/fringe.hpp"
#include "magsim/oracle.hpp"
#include "magsim/pulse_sequence.hpp"

#include <iosfwd>
#include <vector>

namespace magsim {

// Phase of the i-th pi pulse in the X-Y-X-Y-Y-X-Y-X cycle.
double xy8_phase(int i);

// Pulse timing: tau is the centre-to-centre spacing of the pi pulses, each
// two-pulse block is [tau/2, pi, tau, pi, tau/2] less the pulse widths.
// t_pi = 0 gives instantaneous pulses. rabi <= 0 is derived from t_pi.
struct PulseTiming {
    double t_pi = 0.0;
    double rabi = 0.0;
};

// Preparation pi/2 about x.
PulseSequence preparation_pulse(const PulseTiming& timing = {});
// Closing pi/2 about -x: S = 1 when nothing happens in between.
PulseSequence readout_pulse(const PulseTiming& timing = {});

// Two pi pulses starting at pulse index `first` of the XY8 pattern.
PulseSequence cpmg_block(double tau, int first, const PulseTiming& timing = {});
// One XY8 cycle without preparation or readout.
PulseSequence xy8_cycle(double tau, const PulseTiming& timing = {});

PulseSequence build_xy8(int cycles, double tau, double t_pi = 0.0, double rabi = 0.0);

double duty_cycle(const PulseSequence& seq);

struct InterpolationPlan {
    int k = 0;
    int p = 0;
    int n = 0;
    std::vector<int> pattern;  // 1 selects tau_{k+1}
};

// Spreads the p long blocks as evenly as possible over n slots.
InterpolationPlan make_plan(int k, int p, int n);
void validate_plan(const InterpolationPlan& plan);

// n two-pulse blocks with spacing base_tau or base_tau + dtau per the plan,
// wrapped in preparation and readout. meta.tau is base_tau + (p/n) dtau.
PulseSequence interpolated_sequence(const InterpolationPlan& plan, double base_tau, double dtau,
                                    double t_pi = 0.0, double rabi = 0.0);

// The same blocks without preparation and readout.
PulseSequence interpolated_blocks(const InterpolationPlan& plan, double base_tau, double dtau,
                                  const PulseTiming& timing = {});

double interpolation_error(int n_pulses, double alpha, double dtau);

// 1 - gate fidelity between the interpolated block product and n uniform
// blocks at the effective spacing.
double measured_interpolation_error(const InterpolationPlan& plan, double base_tau, double dtau,
                                    const SpinSystemParams& p, const FieldConfig& field);

// Oracle S of n interpolated blocks (with preparation and readout) for each
// numerator in `ps`; x is the effective spacing.
FringeSeries supersampled_fringe(int n, double base_tau, double dtau, const std::vector<int>& ps,
                                 const SpinSystemParams& p, const FieldConfig& field,
                                 const oracle::InitialState& init = {});

// Oracle S of n uniform blocks at each spacing.
FringeSeries uniform_fringe(int n, const std::vector<double>& taus, const SpinSystemParams& p,
                            const FieldConfig& field, const oracle::InitialState& init = {});

struct PeakSearch {
    FringeSeries coarse;  // `slices` + 1 supersamples across the window
    FringeSeries fine;    // every numerator within one coarse slice of the best
    double tau = 0.0;     // effective spacing of the deepest supersample
    double depth = 0.0;   // 1 - S there
};

// Locates the deepest point of the n-block fringe inside [base_tau, base_tau + dtau].
PeakSearch supersample_peak(int n, double base_tau, double dtau, int slices,
                            const SpinSystemParams& p, const FieldConfig& field,
                            const oracle::InitialState& init = {});

void write_timeline(std::ostream& os, const PulseSequence& seq);

}  // namespace magsim
