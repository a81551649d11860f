#include "magsim/spin_core.hpp"

#include "magsim/error.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace magsim {

namespace {

void require_nonzero(double value, double epsilon, const char* what)
{
    if (!(std::abs(value) > epsilon))
        throw DegenerateFrame(std::string(what) + " is within epsilon of zero");
}

// Ancilla-manifold rotation axes from second-order perturbation theory
// inside {ms = 0, -1}.
void nitrogen_axes(const SpinSystemParams& p, double delta, double q, double b_perp,
                   double eps, Vec3& n0, Vec3& n1)
{
    const double ap = p.a_perp;
    const double d1 = p.a_par - delta;
    const double d2 = p.a_par - q - delta;
    const double d3 = q - p.a_par + delta;
    require_nonzero(d1, eps, "A_par - Delta");
    require_nonzero(d2, eps, "A_par - Q - Delta");
    require_nonzero(d3, eps, "Q - A_par + Delta");
    const double mix = ap * p.gamma_e * b_perp / (2.0 * std::sqrt(2.0));
    const double shift = ap * ap / d3;
    n0 = {mix * (1.0 / d1 + 1.0 / d2), 0.0, 0.5 * (q + shift)};
    n1 = {mix * (1.0 / delta + 1.0 / d3), 0.0, 0.5 * (q - p.a_par + shift)};
}

void carbon_axes(const SpinSystemParams& p, double delta, double b_z, double b_perp,
                 double eps, Vec3& n0, Vec3& n1)
{
    const double z = p.gamma_n * b_z;
    const double h = 0.5 * p.a_par;
    const double d0 = h - delta;
    const double d1 = h - z - delta;
    const double d2 = delta + z - h;
    const double d3 = delta + h;
    require_nonzero(d0, eps, "A_par/2 - Delta");
    require_nonzero(d1, eps, "A_par/2 - gamma_n B_z - Delta");
    require_nonzero(d3, eps, "Delta + A_par/2");
    const double mix = p.gamma_e * b_perp * p.a_perp / 4.0;
    const double shift = 0.5 * p.a_perp * p.a_perp / d2;
    n0 = {mix * (1.0 / d0 + 1.0 / d1), 0.0, 0.5 * (z + shift)};
    n1 = {mix * (1.0 / d2 + 1.0 / d3), 0.0, 0.5 * (z - p.a_par + shift)};
}

}  // namespace

SpinSystemParams SpinSystemParams::nitrogen14() { return {}; }

SpinSystemParams SpinSystemParams::carbon13()
{
    SpinSystemParams p;
    p.gamma_n = 1.0705e-3;
    p.q0 = 0.0;
    p.a_par = 12.8;
    p.a_perp = 3.0;
    p.ancilla_kind = AncillaKind::carbon13;
    return p;
}

double SpinSystemParams::ancilla_spin() const
{
    return ancilla_kind == AncillaKind::nitrogen14 ? 1.0 : 0.5;
}

void SpinSystemParams::validate() const
{
    const double all[] = {delta0, gamma_e, gamma_n, q0, a_par, a_perp};
    for (double v : all)
        if (!std::isfinite(v)) throw ValidationError("system: non-finite parameter");
    if (!(gamma_e > 0.0)) throw ValidationError("system.gamma_e must be positive");
    if (ancilla_kind == AncillaKind::carbon13 && q0 != 0.0)
        throw ValidationError("system.q0 must be zero for a spin-1/2 ancilla");
}

void FieldConfig::validate() const
{
    if (!std::isfinite(b_z) || !std::isfinite(b_e) || !std::isfinite(b_i) || !std::isfinite(beta))
        throw ValidationError("field: non-finite value");
    if (b_e < 0.0) throw ValidationError("field.b_e must be non-negative");
    if (b_i < 0.0) throw ValidationError("field.b_i must be non-negative");
    if (beta < 0.0 || beta > kPi) throw ValidationError("field.beta must lie in [0, pi]");
}

double bz_for_delta(const SpinSystemParams& p, double delta) { return (p.delta0 - delta) / p.gamma_e; }

FieldConfig field_at(const SpinSystemParams& p, double delta, double b_perp)
{
    FieldConfig f;
    f.b_z = bz_for_delta(p, delta);
    if (b_perp >= 0.0) {
        f.b_e = b_perp;
    } else {
        f.b_i = -b_perp;
        f.beta = kPi;
    }
    return f;
}

TransverseField total_transverse(const FieldConfig& field)
{
    const double be = field.b_e;
    const double bi = field.b_i;
    const double sq = be * be + bi * bi + 2.0 * be * bi * std::cos(field.beta);
    TransverseField out;
    out.b_perp = std::sqrt(std::max(sq, 0.0));
    out.cos_phi = out.b_perp > 0.0 ? (be + bi * std::cos(field.beta)) / out.b_perp : 1.0;
    out.linear_regime = out.cos_phi >= std::cos(kPi / 8.0);
    return out;
}

double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

double angle_between(const Vec3& a, const Vec3& b)
{
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    // atan2 of cross and dot keeps precision for nearly parallel axes
    const Vec3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    const double d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return std::atan2(norm(c), d);
}

EffectiveModel derive_effective(const SpinSystemParams& p, const FieldConfig& field, double epsilon)
{
    EffectiveModel m;
    m.delta = p.delta0 - p.gamma_e * field.b_z;
    m.q = p.q0 + p.gamma_n * field.b_z;
    m.b_perp = total_transverse(field).b_perp;
    require_nonzero(m.delta, epsilon, "Delta");

    if (p.ancilla_kind == AncillaKind::nitrogen14) {
        const double d3 = m.q - p.a_par + m.delta;
        require_nonzero(d3, epsilon, "Q - A_par + Delta");
        require_nonzero(m.q, epsilon, "Q");
        require_nonzero(m.q - p.a_par, epsilon, "Q - A_par");
        m.omega0 = m.q - 0.5 * p.a_par + p.a_perp * p.a_perp / d3;
        const double h = m.q - 0.5 * p.a_par;
        m.f_factor = 2.0 * std::sqrt(2.0) * h * h / ((m.q - p.a_par) * m.q);
        nitrogen_axes(p, m.delta, m.q, m.b_perp, epsilon, m.n0, m.n1);
    } else {
        const double zb = p.gamma_n * field.b_z;
        require_nonzero(2.0 * p.a_par - zb, epsilon, "2 A_par - gamma_n B_par");
        m.omega0 = zb;
        m.f_factor = 4.0 * (p.a_par - zb) / (2.0 * p.a_par - zb);
        carbon_axes(p, m.delta, field.b_z, m.b_perp, epsilon, m.n0, m.n1);
    }
    require_nonzero(m.omega0, epsilon, "omega0");
    m.alpha = p.gamma_e * m.b_perp * p.a_perp * m.f_factor / (m.delta * m.omega0);
    m.alpha_geometric = angle_between(m.n0, m.n1);
    return m;
}

Harmonics harmonics(const SpinSystemParams& p, const FieldConfig& field, double epsilon)
{
    const double delta = p.delta0 - p.gamma_e * field.b_z;
    require_nonzero(delta, epsilon, "Delta");

    const double j = p.ancilla_spin();
    auto diag = [&](int ms, double mi) {
        return p.delta0 * ms * ms + field.b_z * (p.gamma_e * ms + p.gamma_n * mi) +
               p.q0 * mi * mi + p.a_par * ms * mi;
    };
    auto ladder = [](double s, double m) { return std::sqrt(s * (s + 1.0) - m * (m + 1.0)); };

    // Without transverse field ms + mI is conserved; diagonalise that block
    // and return the eigenvalue whose eigenvector is mostly |ms, mi>.
    auto energy = [&](int ms, double mi) {
        const double total = ms + mi;
        std::vector<std::pair<int, double>> states;
        for (int s = 1; s >= -1; --s) {
            const double m = total - s;
            if (std::abs(m) <= j + 1e-9) states.emplace_back(s, m);
        }
        const int n = static_cast<int>(states.size());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        int self = 0;
        for (int a = 0; a < n; ++a) {
            h(a, a) = diag(states[a].first, states[a].second);
            if (states[a].first == ms) self = a;
            if (a + 1 < n) {
                // |s, m> -> |s + 1, m - 1> through S+ I-
                const auto [s, m] = states[a + 1];
                h(a, a + 1) = h(a + 1, a) = 0.5 * p.a_perp * ladder(1.0, s) * ladder(j, -m);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        int best = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(es.eigenvectors()(self, k)) > std::abs(es.eigenvectors()(self, best)))
                best = k;
        return es.eigenvalues()(best);
    };

    auto line = [&](double upper, double lower) {
        return 0.5 * ((energy(0, upper) - energy(0, lower)) + (energy(-1, upper) - energy(-1, lower)));
    };
    Harmonics h;
    h.omega1 = line(j, j - 1.0);
    h.omega2 = j >= 1.0 ? line(j - 2.0, j - 1.0) : h.omega1;
    return h;
}

std::vector<double> odd_harmonic_delays(double omega, int count)
{
    if (omega == 0.0) throw DegenerateFrame("harmonic frequency is zero");
    std::vector<double> out;
    out.reserve(count > 0 ? count : 0);
    for (int k = 1; k <= count; ++k) out.push_back((2.0 * k - 1.0) / (2.0 * std::abs(omega)));
    return out;
}

double drift_robustness(const SpinSystemParams& p, const FieldConfig& field, double delta_bz,
                        double epsilon)
{
    // d omega0 / d B_z at fixed Delta over omega0.
    const EffectiveModel m = derive_effective(p, field, epsilon);
    double slope = p.gamma_n;
    if (p.ancilla_kind == AncillaKind::nitrogen14) {
        const double d3 = m.q - p.a_par + m.delta;
        slope *= 1.0 - p.a_perp * p.a_perp / (d3 * d3);
    }
    return slope * delta_bz / m.omega0;
}

}  // namespace magsim
