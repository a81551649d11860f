#pragma once

#include <array>
#include <vector>

// Sensor (spin-1) coupled to one nuclear ancilla. Frequencies are cyclic
// MHz, times are microseconds, fields are Gauss. Phases are 2*pi*f*t.
namespace magsim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kDegenerateEpsilon = 1e-6;  // MHz

enum class AncillaKind { nitrogen14, carbon13 };

struct SpinSystemParams {
    double delta0 = 2870.0;      // zero-field splitting
    double gamma_e = 2.8;        // MHz/G
    double gamma_n = -3.077e-4;  // MHz/G
    double q0 = -4.95;
    double a_par = -2.16;
    double a_perp = -2.62;
    AncillaKind ancilla_kind = AncillaKind::nitrogen14;

    static SpinSystemParams nitrogen14();
    static SpinSystemParams carbon13();

    // Nuclear spin quantum number: 1 or 1/2.
    double ancilla_spin() const;
    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct FieldConfig {
    double b_z = 0.0;
    double b_e = 0.0;   // applied transverse field
    double b_i = 0.0;   // intrinsic misalignment
    double beta = 0.0;  // angle between b_e and b_i

    void validate() const;
};

// Longitudinal field that puts the sensor splitting at `delta`.
double bz_for_delta(const SpinSystemParams& p, double delta);
// Field along the e axis at splitting delta. Negative b_perp points the
// field along -e through b_i with beta = pi.
FieldConfig field_at(const SpinSystemParams& p, double delta, double b_perp);

struct TransverseField {
    double b_perp = 0.0;
    double cos_phi = 1.0;
    bool linear_regime = true;  // phi <= pi/8
};

TransverseField total_transverse(const FieldConfig& field);

using Vec3 = std::array<double, 3>;

struct EffectiveModel {
    double delta = 0.0;
    double q = 0.0;
    double omega0 = 0.0;
    double f_factor = 0.0;
    Vec3 n0{};
    Vec3 n1{};
    double alpha = 0.0;            // closed form
    double alpha_geometric = 0.0;  // angle between n0 and n1
    double b_perp = 0.0;
};

EffectiveModel derive_effective(const SpinSystemParams& p, const FieldConfig& field,
                                double epsilon = kDegenerateEpsilon);

struct Harmonics {
    double omega1 = 0.0;
    double omega2 = 0.0;
};

// Ancilla line frequencies averaged over ms = 0, -1: omega1 between the two
// highest nuclear levels, omega2 between the next pair (equal to omega1 for
// a spin-1/2 ancilla). Exact for the longitudinal field; b_e and b_i are
// ignored.
Harmonics harmonics(const SpinSystemParams& p, const FieldConfig& field,
                    double epsilon = kDegenerateEpsilon);

// Odd-harmonic pulse spacings (2k-1)/(2|omega|), k = 1..count, in us.
std::vector<double> odd_harmonic_delays(double omega, int count);

// Fractional change of omega0 when B_z moves by delta_bz at fixed Delta.
double drift_robustness(const SpinSystemParams& p, const FieldConfig& field, double delta_bz,
                        double epsilon = kDegenerateEpsilon);

double angle_between(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

}  // namespace magsim
