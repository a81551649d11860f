#include "magsim/oracle.hpp"

#include "magsim/error.hpp"
#include "magsim/simd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace magsim::oracle {

namespace {

using cplx = std::complex<double>;
const cplx I(0.0, 1.0);

struct SpinOps {
    CMatrix z, plus, minus, x, y;
};

// Spin-j operators in descending-m order.
SpinOps spin_ops(double j)
{
    const int n = static_cast<int>(std::lround(2.0 * j)) + 1;
    SpinOps s;
    s.z = CMatrix::Zero(n, n);
    s.plus = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double m = j - k;
        s.z(k, k) = m;
        if (k > 0) s.plus(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    s.minus = s.plus.adjoint();
    s.x = 0.5 * (s.plus + s.minus);
    s.y = -0.5 * I * (s.plus - s.minus);
    return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix lab_full(const SpinSystemParams& p, const FieldConfig& field)
{
    const SpinOps s = spin_ops(1.0);
    const SpinOps n = spin_ops(p.ancilla_spin());
    const CMatrix is = CMatrix::Identity(3, 3);
    const CMatrix in = CMatrix::Identity(n.z.rows(), n.z.rows());
    // b_e sets the x axis; b_i is rotated by beta from it.
    const double bx = field.b_e + field.b_i * std::cos(field.beta);
    const double by = field.b_i * std::sin(field.beta);

    const CMatrix sz = kron(s.z, in);
    const CMatrix iz = kron(is, n.z);
    CMatrix h = p.delta0 * sz * sz + field.b_z * (p.gamma_e * sz + p.gamma_n * iz) +
                p.q0 * iz * iz + p.a_par * sz * iz;
    h += p.gamma_e * (bx * kron(s.x, in) + by * kron(s.y, in));
    h += 0.5 * p.a_perp * (kron(s.plus, n.minus) + kron(s.minus, n.plus));
    return h;
}

CMatrix sensor_projector(const Basis& b, int ms)
{
    const int d = b.dim();
    CMatrix p = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        if (b.sensor_of(i) == ms) p(i, i) = 1.0;
    return p;
}

// Generator of a rotation on the {0,-1} sensor pair for every ancilla level.
CMatrix pair_generator(const Basis& b, double phase)
{
    const int d = b.dim();
    CMatrix g = CMatrix::Zero(d, d);
    const cplx e = std::exp(-I * phase);
    for (double mi : b.ancilla) {
        const int i0 = b.index(0, mi);
        const int i1 = b.index(-1, mi);
        if (i0 < 0 || i1 < 0) continue;
        // 0.5 (cos phase sx + sin phase sy) with sx, sy on (|0>, |-1>)
        g(i0, i1) = 0.5 * e;
        g(i1, i0) = 0.5 * std::conj(e);
    }
    return g;
}

CMatrix ideal_rotation(const Basis& b, double phase, double angle)
{
    const int d = b.dim();
    CMatrix u = CMatrix::Identity(d, d);
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const cplx e = std::exp(-I * phase);
    for (double mi : b.ancilla) {
        const int i0 = b.index(0, mi);
        const int i1 = b.index(-1, mi);
        if (i0 < 0 || i1 < 0) continue;
        u(i0, i0) = c;
        u(i1, i1) = c;
        u(i0, i1) = -I * s * e;
        u(i1, i0) = -I * s * std::conj(e);
    }
    return u;
}

double default_carrier(const CMatrix& h_bd, const Basis& b)
{
    double sum = 0.0;
    int count = 0;
    const int levels = std::min<int>(2, static_cast<int>(b.ancilla.size()));
    for (int k = 0; k < levels; ++k) {
        const double mi = b.ancilla[k];
        const int i0 = b.index(0, mi);
        const int i1 = b.index(-1, mi);
        if (i0 < 0 || i1 < 0) continue;
        sum += h_bd(i1, i1).real() - h_bd(i0, i0).real();
        ++count;
    }
    return count ? sum / count : 0.0;
}

CMatrix mul(const CMatrix& a, const CMatrix& b)
{
    CMatrix c(a.rows(), b.cols());
    simd::cmatmul(static_cast<std::size_t>(a.rows()), a.data(), b.data(), c.data());
    return c;
}

void check_hermitian(const CMatrix& h)
{
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonHermitian("Hamiltonian is not Hermitian");
}

// Spectral form of a Hermitian matrix for repeated exponentials.
struct Spectral {
    CMatrix v;
    Eigen::VectorXd e;

    explicit Spectral(const CMatrix& h)
    {
        check_hermitian(h);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        if (es.info() != Eigen::Success) throw NonHermitian("eigendecomposition failed");
        v = es.eigenvectors();
        e = es.eigenvalues();
    }

    CMatrix exp(double t) const
    {
        CMatrix scaled = v;
        for (int k = 0; k < e.size(); ++k) scaled.col(k) *= std::exp(-I * (kTwoPi * e(k) * t));
        return scaled * v.adjoint();
    }
};

// Rotating-frame description of one static field.
struct Frame1 {
    HamiltonianMatrix ham;
    Spectral spec;
    double delta;

    Frame1(const SpinSystemParams& p, const FieldConfig& f, Truncation trunc)
        : ham(build_hamiltonian(p, f, Frame::rotating, trunc)), spec(ham.h),
          delta(p.delta0 - p.gamma_e * f.b_z)
    {}
};

class Engine {
public:
    Engine(const SpinSystemParams& p, const RunOptions& opts) : p_(p), opts_(opts) {}

    const Frame1& frame(const FieldConfig& f)
    {
        const auto key = std::make_tuple(f.b_z, f.b_e, f.b_i, f.beta);
        auto it = frames_.find(key);
        if (it == frames_.end()) it = frames_.emplace(key, Frame1(p_, f, opts_.truncation)).first;
        return it->second;
    }

    CMatrix pulse(const Frame1& fr, const Pulse& pl)
    {
        if (!std::isfinite(pl.angle) || !std::isfinite(pl.phase))
            throw InvalidAngle("pulse angle or phase is not finite");
        const Basis& b = fr.ham.basis;
        if (opts_.pulse_model == PulseModel::ideal || pl.duration <= 0.0) {
            CMatrix r = ideal_rotation(b, pl.phase, pl.angle);
            if (opts_.dressed_pulses) return r;
            const CMatrix& t = fr.ham.to_bare;
            return t.adjoint() * r * t;
        }
        return apply_pulse(PulseModel::finite_rwa, pl.phase, pl.angle, pl.rabi, fr.ham, fr.delta)
            .u.u;
    }

    std::vector<std::pair<CVector, double>> initial(const Frame1& fr, const InitialState& init)
    {
        const Basis& b = fr.ham.basis;
        std::vector<double> levels;
        if (init.ancilla == AncillaInit::polarized)
            levels.push_back(b.ancilla.front());
        else
            levels = b.ancilla;
        std::vector<std::pair<CVector, double>> out;
        const CMatrix prep = ideal_rotation(b, 0.0, kPi / 2.0);
        for (double mi : levels) {
            CVector bare = CVector::Zero(b.dim());
            bare(b.index(0, mi)) = 1.0;
            CVector psi = fr.ham.to_bare.adjoint() * bare;
            if (init.sensor == SensorInit::prepared) psi = prep * psi;
            out.emplace_back(psi, 1.0 / levels.size());
        }
        return out;
    }

    double readout(const Frame1& fr, const CVector& psi) const
    {
        const Basis& b = fr.ham.basis;
        double s = 0.0;
        for (int ms : b.sensor) {
            CVector part = CVector::Zero(b.dim());
            for (int i = 0; i < b.dim(); ++i)
                if (b.sensor_of(i) == ms) part(i) = psi(i);
            const CVector bare = fr.ham.to_bare * part;
            for (int i = 0; i < b.dim(); ++i)
                if (b.sensor_of(i) == 0) s += std::norm(bare(i));
        }
        return s;
    }

    const RunOptions& options() const { return opts_; }

private:
    SpinSystemParams p_;
    RunOptions opts_;
    std::map<std::tuple<double, double, double, double>, Frame1> frames_;
};

void apply_unitary(CVector& psi, const CMatrix& u)
{
    CVector out(psi.size());
    simd::cmatvec(static_cast<std::size_t>(psi.size()), u.data(), psi.data(), out.data());
    psi.swap(out);
}

// Static-field propagator cache keyed by delay length.
class StaticPropagator {
public:
    StaticPropagator(Engine& eng, const Frame1& fr) : eng_(eng), fr_(fr) {}

    const CMatrix& element(const Element& e)
    {
        if (const auto* d = std::get_if<Delay>(&e)) {
            if (d->t < 0.0) throw InvalidTiming("negative delay");
            auto it = delays_.find(d->t);
            if (it == delays_.end()) it = delays_.emplace(d->t, fr_.spec.exp(d->t)).first;
            return it->second;
        }
        const Pulse& pl = std::get<Pulse>(e);
        const auto key = std::make_tuple(pl.phase, pl.angle, pl.duration, pl.rabi);
        auto it = pulses_.find(key);
        if (it == pulses_.end()) it = pulses_.emplace(key, eng_.pulse(fr_, pl)).first;
        return it->second;
    }

    CMatrix product(const PulseSequence& seq)
    {
        const int d = fr_.ham.dim();
        CMatrix u = CMatrix::Identity(d, d);
        int count = 0;
        for (const auto& e : seq.elements) {
            u = mul(element(e), u);
            if (++count % 100 == 0 && unitarity_error(u) > 1e-10)
                throw NonHermitian("propagator lost unitarity");
        }
        return u;
    }

private:
    Engine& eng_;
    const Frame1& fr_;
    std::map<double, CMatrix> delays_;
    std::map<std::tuple<double, double, double, double>, CMatrix> pulses_;
};

}  // namespace

int Basis::index(int ms, double mi) const
{
    for (std::size_t a = 0; a < sensor.size(); ++a) {
        if (sensor[a] != ms) continue;
        for (std::size_t b = 0; b < ancilla.size(); ++b)
            if (std::abs(ancilla[b] - mi) < 1e-9) return static_cast<int>(a * ancilla.size() + b);
    }
    return -1;
}

Basis Basis::make(const SpinSystemParams& p, Truncation trunc)
{
    Basis b;
    const double j = p.ancilla_spin();
    for (double m = j; m >= -j - 1e-9; m -= 1.0) b.ancilla.push_back(m);
    if (trunc == Truncation::full) {
        b.sensor = {1, 0, -1};
    } else {
        b.sensor = {0, -1};
        b.ancilla.resize(2);
    }
    return b;
}

HamiltonianMatrix build_hamiltonian(const SpinSystemParams& p, const FieldConfig& field,
                                    Frame frame, Truncation trunc, std::optional<double> carrier)
{
    const Basis full = Basis::make(p, Truncation::full);
    const Basis target = Basis::make(p, trunc);
    const CMatrix hf = lab_full(p, field);

    HamiltonianMatrix out;
    out.basis = target;
    out.h.resize(target.dim(), target.dim());
    for (int i = 0; i < target.dim(); ++i) {
        const int fi = full.index(target.sensor_of(i), target.ancilla_of(i));
        for (int k = 0; k < target.dim(); ++k)
            out.h(i, k) = hf(fi, full.index(target.sensor_of(k), target.ancilla_of(k)));
    }
    out.to_bare = CMatrix::Identity(target.dim(), target.dim());
    if (frame == Frame::lab) return out;

    Dressing dr = dress(out.h, target);
    out.frame = Frame::rotating;
    out.carrier = carrier ? *carrier : default_carrier(dr.h_bd, target);
    out.h = dr.h_bd - out.carrier * sensor_projector(target, -1);
    out.h = 0.5 * (out.h + out.h.adjoint());
    out.to_bare = dr.t;
    return out;
}

Dressing dress(const CMatrix& h, const Basis& basis)
{
    const int d = static_cast<int>(h.rows());
    check_hermitian(h);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CMatrix& v = es.eigenvectors();
    const Eigen::VectorXd& e = es.eigenvalues();

    // Label each eigenvector by the bare state it overlaps most, greedily.
    std::vector<int> owner(d, -1);
    std::vector<bool> used(d, false);
    Eigen::MatrixXd weight = v.cwiseAbs2();
    for (int step = 0; step < d; ++step) {
        double best = -1.0;
        int bi = 0, bj = 0;
        for (int i = 0; i < d; ++i) {
            if (owner[i] >= 0) continue;
            for (int j = 0; j < d; ++j)
                if (!used[j] && weight(i, j) > best) {
                    best = weight(i, j);
                    bi = i;
                    bj = j;
                }
        }
        owner[bi] = bj;
        used[bj] = true;
    }

    CMatrix vp(d, d);
    Eigen::VectorXd ep(d);
    for (int i = 0; i < d; ++i) {
        vp.col(i) = v.col(owner[i]);
        ep(i) = e(owner[i]);
    }
    CMatrix blocks = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            if (basis.sensor_of(i) == basis.sensor_of(k)) blocks(i, k) = vp(i, k);
    Eigen::JacobiSVD<CMatrix> svd(blocks, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const CMatrix w = svd.matrixU() * svd.matrixV().adjoint();

    Dressing out;
    out.t = vp * w.adjoint();
    out.h_bd = w * ep.asDiagonal() * w.adjoint();
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            if (basis.sensor_of(i) != basis.sensor_of(k)) out.h_bd(i, k) = 0.0;
    return out;
}

UnitaryMatrix evolve(const CMatrix& h, double t) { return {Spectral(h).exp(t)}; }

UnitaryMatrix evolve(const HamiltonianMatrix& h, double t) { return evolve(h.h, t); }

PulseOutcome apply_pulse(PulseModel model, double phase, double angle, double rabi,
                         const HamiltonianMatrix& rotating, double delta)
{
    if (!std::isfinite(angle) || !std::isfinite(phase))
        throw InvalidAngle("pulse angle or phase is not finite");
    PulseOutcome out;
    if (model == PulseModel::ideal) {
        out.u.u = ideal_rotation(rotating.basis, phase, angle);
        return out;
    }
    if (!(rabi > 0.0)) throw InvalidTiming("finite pulse needs a positive Rabi frequency");
    out.rwa_violated = rabi > std::abs(delta) / 5.0;
    const double duration = std::abs(angle) / (kTwoPi * rabi);
    const double sign = angle < 0.0 ? -1.0 : 1.0;
    const CMatrix h = rotating.h + sign * rabi * pair_generator(rotating.basis, phase);
    out.u = evolve(CMatrix(0.5 * (h + h.adjoint())), duration);
    return out;
}

double run_sequence(const PulseSequence& seq, const SpinSystemParams& p, const FieldConfig& field,
                    const InitialState& init, const RunOptions& opts)
{
    Engine eng(p, opts);
    const Frame1& fr = eng.frame(field);
    StaticPropagator prop(eng, fr);
    const CMatrix u = prop.product(seq);
    double s = 0.0;
    for (auto& [psi, w] : eng.initial(fr, init)) {
        CVector out = psi;
        apply_unitary(out, u);
        s += w * eng.readout(fr, out);
    }
    return std::clamp(s, 0.0, 1.0);
}

double run_sequence(const PulseSequence& seq, const SpinSystemParams& p,
                    const FieldProfile& profile, const InitialState& init, const RunOptions& opts)
{
    Engine eng(p, opts);
    const Frame1& first = eng.frame(profile(0.0));
    auto states = eng.initial(first, init);
    const Frame1* current = &first;
    double t = 0.0;
    for (const auto& e : seq.elements) {
        CMatrix u;
        if (const auto* d = std::get_if<Delay>(&e)) {
            if (d->t < 0.0) throw InvalidTiming("negative delay");
            current = &eng.frame(profile(t + 0.5 * d->t));
            u = current->spec.exp(d->t);
            t += d->t;
        } else {
            const Pulse& pl = std::get<Pulse>(e);
            current = &eng.frame(profile(t + 0.5 * pl.duration));
            u = eng.pulse(*current, pl);
            t += pl.duration;
        }
        for (auto& st : states) apply_unitary(st.first, u);
    }
    double s = 0.0;
    for (auto& [psi, w] : states) s += w * eng.readout(*current, psi);
    return std::clamp(s, 0.0, 1.0);
}

std::vector<double> repeated_block_signal(const PulseSequence& prep, const PulseSequence& block,
                                          const PulseSequence& readout, int repeats,
                                          const SpinSystemParams& p, const FieldConfig& field,
                                          const InitialState& init, const RunOptions& opts)
{
    Engine eng(p, opts);
    const Frame1& fr = eng.frame(field);
    StaticPropagator prop(eng, fr);
    const CMatrix up = prop.product(prep);
    const CMatrix ub = prop.product(block);
    const CMatrix ur = prop.product(readout);

    std::vector<double> out(repeats + 1, 0.0);
    for (auto& [psi0, w] : eng.initial(fr, init)) {
        CVector psi = psi0;
        apply_unitary(psi, up);
        for (int k = 0; k <= repeats; ++k) {
            CVector r = psi;
            apply_unitary(r, ur);
            out[k] += w * eng.readout(fr, r);
            apply_unitary(psi, ub);
        }
    }
    for (double& s : out) s = std::clamp(s, 0.0, 1.0);
    return out;
}

UnitaryMatrix sequence_unitary(const PulseSequence& seq, const SpinSystemParams& p,
                               const FieldConfig& field, const RunOptions& opts)
{
    Engine eng(p, opts);
    const Frame1& fr = eng.frame(field);
    StaticPropagator prop(eng, fr);
    return {prop.product(seq)};
}

double gate_fidelity(const CMatrix& a, const CMatrix& b)
{
    const double d = static_cast<double>(a.rows());
    return std::norm((a.adjoint() * b).trace()) / (d * d);
}

double unitarity_error(const CMatrix& u)
{
    const int d = static_cast<int>(u.rows());
    return (u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

}  // namespace magsim::oracle
