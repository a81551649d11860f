#include "magsim/error.hpp"
#include "magsim/modes.hpp"

#include <algorithm>
#include <cmath>

namespace magsim {

double biased_magnitude(double b_perp, double phi, const BiasField& bias)
{
    const double x = b_perp * std::cos(phi) + bias.magnitude * std::cos(bias.direction);
    const double y = b_perp * std::sin(phi) + bias.magnitude * std::sin(bias.direction);
    return std::hypot(x, y);
}

VectorEstimate vector_reconstruct(double b_par, double b_perp, double b_perp_with_bias,
                                  const BiasField& bias, double tolerance)
{
    if (b_par == 0.0) throw ValidationError("vector_reconstruct: b_par must be non-zero");
    if (!(bias.magnitude > 0.0)) throw ValidationError("vector_reconstruct: bias must be non-zero");
    if (b_perp < 0.0 || b_perp_with_bias < 0.0)
        throw ValidationError("vector_reconstruct: magnitudes must be non-negative");

    VectorEstimate out;
    out.theta = std::atan(b_perp / b_par);
    if (b_perp == 0.0) {
        out.phi_defined = false;
        return out;
    }
    const double b = bias.magnitude;
    double c = (b_perp_with_bias * b_perp_with_bias - b_perp * b_perp - b * b) / (2.0 * b_perp * b);
    if (std::abs(c) > 1.0 + tolerance)
        throw InconsistentMeasurements("no in-plane angle reproduces the biased magnitude");
    c = std::clamp(c, -1.0, 1.0);
    const double rel = std::acos(c);
    out.phi = std::remainder(bias.direction + rel, kTwoPi);
    out.phi_alt = std::remainder(bias.direction - rel, kTwoPi);
    return out;
}

}  // namespace magsim
