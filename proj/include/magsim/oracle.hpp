#pragma once

#include "magsim/pulse_sequence.hpp"
#include "magsim/spin_core.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

// Exact propagation of the sensor-ancilla pair.
//
// The rotating frame is the exactly block-diagonalised ("dressed") frame:
// the lab Hamiltonian is rotated by the unitary T that removes every
// coupling between different sensor levels, and the sensor carrier is
// subtracted from the ms = -1 block. T is the canonical choice closest to
// the identity. Pulses act on the dressed sensor pair {0, -1}. Preparation
// starts from the bare |ms = 0> and readout projects onto the bare
// |ms = 0>, averaged over the carrier period.
namespace magsim::oracle {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Frame { lab, rotating };
// manifold keeps ms in {0, -1} and the two highest ancilla levels.
enum class Truncation { full, manifold };

struct Basis {
    std::vector<int> sensor;      // ms, outer index
    std::vector<double> ancilla;  // mI, inner index

    int dim() const { return static_cast<int>(sensor.size() * ancilla.size()); }
    int index(int ms, double mi) const;  // -1 when absent
    int sensor_of(int i) const { return sensor[i / ancilla.size()]; }
    double ancilla_of(int i) const { return ancilla[i % ancilla.size()]; }

    static Basis make(const SpinSystemParams& p, Truncation trunc);
};

struct HamiltonianMatrix {
    CMatrix h;
    Basis basis;
    Frame frame = Frame::lab;
    double carrier = 0.0;  // MHz, rotating frame only
    CMatrix to_bare;       // dressed -> bare coordinates; identity in the lab frame

    int dim() const { return static_cast<int>(h.rows()); }
};

struct UnitaryMatrix {
    CMatrix u;
    int dim() const { return static_cast<int>(u.rows()); }
};

enum class SensorInit { ground, prepared };
enum class AncillaInit { polarized, maximally_mixed };

struct InitialState {
    SensorInit sensor = SensorInit::ground;
    AncillaInit ancilla = AncillaInit::polarized;
};

struct Dressing {
    CMatrix t;     // h = t * h_bd * t^dagger
    CMatrix h_bd;  // block diagonal in ms
};

// Lab frame is H0 + V. The rotating frame carrier defaults to the mean
// {0,-1} splitting of the two highest ancilla levels.
HamiltonianMatrix build_hamiltonian(const SpinSystemParams& p, const FieldConfig& field,
                                    Frame frame = Frame::lab,
                                    Truncation trunc = Truncation::full,
                                    std::optional<double> carrier = std::nullopt);

Dressing dress(const CMatrix& h, const Basis& basis);

UnitaryMatrix evolve(const HamiltonianMatrix& h, double t);
UnitaryMatrix evolve(const CMatrix& h, double t);

enum class PulseModel { ideal, finite_rwa };

struct PulseOutcome {
    UnitaryMatrix u;
    bool rwa_violated = false;  // rabi > |Delta|/5
};

// Pulse on the {0,-1} sensor pair of a rotating-frame Hamiltonian. A
// finite_rwa pulse evolves under h + (rabi/2)(cos phase sx + sin phase sy)
// for angle/(2 pi rabi).
PulseOutcome apply_pulse(PulseModel model, double phase, double angle, double rabi,
                         const HamiltonianMatrix& rotating, double delta);

struct RunOptions {
    PulseModel pulse_model = PulseModel::ideal;
    Truncation truncation = Truncation::full;
    bool dressed_pulses = true;  // false: ideal pulses in the bare basis
};

using FieldProfile = std::function<FieldConfig(double t_mid)>;

// Sensor |0> population after the sequence, ancilla traced out.
double run_sequence(const PulseSequence& seq, const SpinSystemParams& p, const FieldConfig& field,
                    const InitialState& init, const RunOptions& opts = {});

// Piecewise-constant field: each delay uses profile(midpoint time).
double run_sequence(const PulseSequence& seq, const SpinSystemParams& p,
                    const FieldProfile& profile, const InitialState& init,
                    const RunOptions& opts = {});

// Signal after preparation, k repetitions of `block`, and readout, for
// k = 0..repeats. Static field.
std::vector<double> repeated_block_signal(const PulseSequence& prep, const PulseSequence& block,
                                          const PulseSequence& readout, int repeats,
                                          const SpinSystemParams& p, const FieldConfig& field,
                                          const InitialState& init, const RunOptions& opts = {});

// Product of the element propagators of `seq` in the rotating frame.
UnitaryMatrix sequence_unitary(const PulseSequence& seq, const SpinSystemParams& p,
                               const FieldConfig& field, const RunOptions& opts = {});

// |Tr(a^dagger b)|^2 / d^2
double gate_fidelity(const CMatrix& a, const CMatrix& b);

double unitarity_error(const CMatrix& u);

}  // namespace magsim::oracle
