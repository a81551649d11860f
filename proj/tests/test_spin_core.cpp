#include "magsim/error.hpp"
#include "magsim/oracle.hpp"
#include "magsim/spin_core.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

using namespace magsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Eigen-mixing angle of the ancilla pair: the 2x2 blocks of the exactly
// block-diagonalised Hamiltonian for ms = 0 and ms = -1, as Bloch vectors.
double exact_mixing_angle(const SpinSystemParams& p, const FieldConfig& f)
{
    const auto h = oracle::build_hamiltonian(p, f, oracle::Frame::rotating);
    const auto& b = h.basis;
    auto bloch = [&](int ms) {
        const int i = b.index(ms, 1.0), k = b.index(ms, 0.0);
        const std::complex<double> off = h.h(i, k);
        return Vec3{2.0 * off.real(), -2.0 * off.imag(), (h.h(i, i) - h.h(k, k)).real()};
    };
    return angle_between(bloch(0), bloch(-1));
}

}  // namespace

TEST_CASE("total_transverse adds the two in-plane fields")
{
    FieldConfig f;
    f.b_e = 1.0;
    f.beta = 2.0;
    auto t = total_transverse(f);
    CHECK(t.b_perp == 1.0);
    CHECK(t.cos_phi == 1.0);

    f.b_i = 1.0;
    f.beta = kPi;
    CHECK_THAT(total_transverse(f).b_perp, WithinAbs(0.0, 1e-12));

    f = {};
    f.b_e = 0.3;
    f.b_i = 0.0978;
    f.beta = 3.0 * kPi / 4.0;
    const double x = f.b_e + f.b_i * std::cos(f.beta);
    const double y = f.b_i * std::sin(f.beta);
    t = total_transverse(f);
    CHECK_THAT(t.b_perp, WithinRel(std::hypot(x, y), 1e-14));
    CHECK_THAT(t.cos_phi, WithinRel(x / std::hypot(x, y), 1e-14));

    FieldConfig zero;
    CHECK(total_transverse(zero).cos_phi == 1.0);
}

TEST_CASE("total_transverse asymptotes at 100:1 field ratios")
{
    for (double beta : {0.3, 1.0, 2.0, 2.8}) {
        FieldConfig f;
        f.beta = beta;
        f.b_e = 1.0;
        f.b_i = 0.01;
        CHECK(std::abs(total_transverse(f).b_perp - (f.b_e + f.b_i * std::cos(beta))) <=
              f.b_i * f.b_i / f.b_e);
        f.b_e = 0.01;
        f.b_i = 1.0;
        CHECK(std::abs(total_transverse(f).b_perp - (f.b_i + f.b_e * std::cos(beta))) <=
              f.b_e * f.b_e / f.b_i);
    }
}

TEST_CASE("linear regime starts at phi = pi/8")
{
    FieldConfig f;
    f.b_i = 1.0;
    f.beta = kPi / 2.0;
    f.b_e = 1.0 / std::tan(kPi / 8.0) * 1.001;
    CHECK(total_transverse(f).linear_regime);
    f.b_e = 1.0 / std::tan(kPi / 8.0) * 0.999;
    CHECK_FALSE(total_transverse(f).linear_regime);
}

TEST_CASE("no transverse field gives no mixing")
{
    const auto p = SpinSystemParams::nitrogen14();
    const auto m = derive_effective(p, field_at(p, 141.0, 0.0));
    CHECK(m.alpha == 0.0);
    CHECK(m.alpha_geometric == 0.0);
    CHECK(m.n0[0] == 0.0);
    CHECK(m.n1[0] == 0.0);
    CHECK(m.n0[2] != 0.0);
}

TEST_CASE("effective model at the two-field operating point")
{
    const auto p = SpinSystemParams::nitrogen14();
    const auto m = derive_effective(p, field_at(p, 141.0, 0.2098));
    const double bz = (2870.0 - 141.0) / 2.8;
    const double q = -4.95 - 3.077e-4 * bz;
    const double omega0 = q + 1.08 + 2.62 * 2.62 / (q + 2.16 + 141.0);
    const double f = 2.0 * std::sqrt(2.0) * std::pow(q + 1.08, 2) / ((q + 2.16) * q);
    CHECK_THAT(m.delta, WithinRel(141.0, 1e-12));
    CHECK_THAT(m.q, WithinRel(q, 1e-12));
    CHECK_THAT(m.omega0, WithinRel(omega0, 1e-12));
    CHECK_THAT(m.f_factor, WithinRel(f, 1e-12));
    CHECK_THAT(m.alpha, WithinRel(2.8 * 0.2098 * -2.62 * f / (141.0 * omega0), 1e-12));
    // F sits near 3.1
    CHECK_THAT(m.f_factor, WithinRel(3.1, 0.05));
    CHECK_THAT(m.alpha, WithinRel(0.008032, 1e-3));
}

TEST_CASE("alpha is linear in the transverse field against the eigen-mixing angle")
{
    const auto p = SpinSystemParams::nitrogen14();
    const double a1 = exact_mixing_angle(p, field_at(p, 141.0, 0.05));
    const double a2 = exact_mixing_angle(p, field_at(p, 141.0, 0.1));
    CHECK_THAT(a2 / a1, WithinRel(2.0, 1e-3));
    const double c1 = derive_effective(p, field_at(p, 141.0, 0.05)).alpha;
    const double c2 = derive_effective(p, field_at(p, 141.0, 0.1)).alpha;
    CHECK_THAT(c2 / c1, WithinRel(2.0, 1e-12));
    // closed form tracks the exact mixing angle at first order
    CHECK_THAT(c1, WithinRel(a1, 0.05));
}

TEST_CASE("alpha grows monotonically with the transverse field")
{
    const auto p = SpinSystemParams::nitrogen14();
    double last = 0.0;
    for (double b = 0.02; b <= 0.5; b += 0.02) {
        const double a = std::abs(derive_effective(p, field_at(p, 141.0, b)).alpha);
        CHECK(a > last);
        last = a;
    }
}

TEST_CASE("closed-form and geometric alpha agree to 1e-3 for Delta >= 50 |A_perp|")
{
    const auto p = SpinSystemParams::nitrogen14();
    for (double delta : {131.0, 141.0, 174.5, 500.0, 2000.0})
        for (double b : {0.05, 0.2098, 0.5}) {
            const auto m = derive_effective(p, field_at(p, delta, b));
            INFO("delta " << delta << " b_perp " << b);
            CHECK_THAT(m.alpha_geometric, WithinRel(m.alpha, 1e-3));
        }
}

TEST_CASE("closed-form vs geometric alpha gap closes as 1/Delta")
{
    const auto p = SpinSystemParams::nitrogen14();
    auto gap = [&](double delta) {
        const auto m = derive_effective(p, field_at(p, delta, 0.2));
        return std::abs(m.alpha_geometric / m.alpha - 1.0);
    };
    CHECK_THAT(gap(1000.0) / gap(2000.0), WithinRel(2.0, 0.05));
    CHECK(gap(2000.0) < gap(141.0));
}

TEST_CASE("harmonics reduce to Q without splitting terms")
{
    auto p = SpinSystemParams::nitrogen14();
    p.a_par = 0.0;
    p.gamma_n = 0.0;
    p.a_perp = 0.0;
    const auto h = harmonics(p, field_at(p, 141.0, 0.0));
    CHECK_THAT(h.omega1, WithinAbs(p.q0, 1e-12));
    CHECK_THAT(h.omega2, WithinAbs(p.q0, 1e-12));
}

TEST_CASE("harmonics match the 9-level eigenvalues")
{
    const auto p = SpinSystemParams::nitrogen14();
    for (double delta : {141.0, 500.0, -893.0}) {
        const auto f = field_at(p, delta, 0.0);
        const auto h = oracle::build_hamiltonian(p, f, oracle::Frame::lab);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.h);
        // label each eigenvalue by its dominant bare state
        auto energy = [&](int ms, double mi) {
            const int target = h.basis.index(ms, mi);
            int best = 0;
            for (int k = 1; k < h.dim(); ++k)
                if (std::norm(es.eigenvectors()(target, k)) >
                    std::norm(es.eigenvectors()(target, best)))
                    best = k;
            return es.eigenvalues()(best);
        };
        const double w1 = 0.5 * ((energy(0, 1) - energy(0, 0)) + (energy(-1, 1) - energy(-1, 0)));
        const double w2 =
            0.5 * ((energy(0, -1) - energy(0, 0)) + (energy(-1, -1) - energy(-1, 0)));
        const auto hm = harmonics(p, f);
        INFO("delta " << delta);
        CHECK_THAT(hm.omega1, WithinAbs(w1, 1e-6));
        CHECK_THAT(hm.omega2, WithinAbs(w2, 1e-6));
    }
}

TEST_CASE("two harmonic families far above the anti-crossing")
{
    const auto p = SpinSystemParams::nitrogen14();
    FieldConfig f;
    f.b_z = 1344.0;
    CHECK_THAT(p.delta0 - p.gamma_e * f.b_z, WithinAbs(-893.2, 0.1));
    const auto h = harmonics(p, f);
    CHECK(std::abs(std::abs(h.omega1) - std::abs(h.omega2)) > 1.0);
    const auto d = odd_harmonic_delays(h.omega1, 3);
    REQUIRE(d.size() == 3);
    CHECK_THAT(d[0], WithinRel(1.0 / (2.0 * std::abs(h.omega1)), 1e-14));
    CHECK_THAT(d[2], WithinRel(5.0 * d[0], 1e-14));
}

TEST_CASE("omega0 is robust to longitudinal drift")
{
    const auto p = SpinSystemParams::nitrogen14();
    const auto f = field_at(p, 141.0, 0.0);
    CHECK(drift_robustness(p, f, 0.0) == 0.0);
    const double r = drift_robustness(p, f, 1.0);
    CHECK(std::abs(r) < 1e-4);
    CHECK_THAT(std::abs(r), WithinRel(7.75e-5, 0.1));

    // central difference over +-0.5 G at fixed Delta
    auto omega0 = [&](double dbz) {
        auto q = p;
        q.delta0 += q.gamma_e * dbz;
        auto g = f;
        g.b_z += dbz;
        return derive_effective(q, g).omega0;
    };
    const double fd = (omega0(0.5) - omega0(-0.5)) / omega0(0.0);
    CHECK_THAT(r, WithinRel(fd, 0.01));
}

TEST_CASE("anti-crossing field and degenerate frames")
{
    const auto p = SpinSystemParams::nitrogen14();
    CHECK_THAT(bz_for_delta(p, 0.0), WithinAbs(1025.0, 0.1));
    FieldConfig f;
    f.b_z = bz_for_delta(p, 0.0);
    CHECK_THROWS_AS(derive_effective(p, f), DegenerateFrame);
    CHECK_THROWS_AS(harmonics(p, f), DegenerateFrame);
    f.b_z = bz_for_delta(p, 5e-7);
    CHECK_THROWS_AS(derive_effective(p, f), DegenerateFrame);
    CHECK_NOTHROW(derive_effective(p, f, 1e-9));
}

TEST_CASE("parameter validation")
{
    auto p = SpinSystemParams::nitrogen14();
    CHECK_NOTHROW(p.validate());
    CHECK(p.q0 < 0.0);
    CHECK(p.gamma_n < 0.0);
    p.gamma_e = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);

    auto c = SpinSystemParams::carbon13();
    CHECK(c.q0 == 0.0);
    CHECK(c.ancilla_spin() == 0.5);
    CHECK_NOTHROW(c.validate());
    c.q0 = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);

    FieldConfig f;
    f.b_e = -1.0;
    CHECK_THROWS_AS(f.validate(), ValidationError);
    f.b_e = 0.0;
    f.beta = 4.0;
    CHECK_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("negative transverse field flips through the misalignment")
{
    const auto p = SpinSystemParams::nitrogen14();
    const auto f = field_at(p, 141.0, -0.2);
    CHECK(f.b_e == 0.0);
    CHECK(f.b_i == 0.2);
    CHECK(f.beta == kPi);
    CHECK_THAT(total_transverse(f).b_perp, WithinRel(0.2, 1e-14));
}

TEST_CASE("carbon-13 ancilla precesses at the nuclear Zeeman frequency")
{
    const auto p = SpinSystemParams::carbon13();
    const auto f = field_at(p, 141.0, 0.1);
    const auto m = derive_effective(p, f);
    CHECK_THAT(m.omega0, WithinRel(p.gamma_n * f.b_z, 1e-14));
    const double zb = p.gamma_n * f.b_z;
    CHECK_THAT(m.f_factor, WithinRel(4.0 * (p.a_par - zb) / (2.0 * p.a_par - zb), 1e-14));
}
