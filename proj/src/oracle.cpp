#include "jcent/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace jcent {

namespace {

constexpr cplx I(0.0, 1.0);
constexpr double kNormGuard = 1.0 + 1e-6;

// sy x sy over {|ee>, |eg>, |ge>, |gg>}.
Eigen::Matrix4d spin_flip() {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 3) = -1.0;
    s(3, 0) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    return s;
}

void check_density(const ReducedDensityMatrix& rho) {
    const Eigen::Matrix4cd& m = rho.entries;
    if (!m.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument("density matrix is not positive semidefinite");
}

}  // namespace

std::string BasisState::label() const {
    std::string s;
    s += atom_a ? 'e' : 'g';
    s += atom_b ? 'e' : 'g';
    s += static_cast<char>('0' + photons_a);
    s += static_cast<char>('0' + photons_b);
    return s;
}

int BasisState::atom_index() const { return 2 * (1 - atom_a) + (1 - atom_b); }

const std::vector<BasisState>& sector_basis(Family family) {
    static const std::vector<BasisState> psi = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    static const std::vector<BasisState> phi = {
        {1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 0, 0, 0}};
    switch (family) {
        case Family::Psi: return psi;
        case Family::Phi: return phi;
    }
    throw std::invalid_argument("unknown state family");
}

HamiltonianSector build_sector(const ModelParams& params, Family family, Frame frame) {
    params.validate();
    const auto& basis = sector_basis(family);
    const double g = params.g;
    const double kappa = params.kappa();

    double atom_energy = 0.0, photon_energy = 0.0;
    switch (frame) {
        case Frame::Lab:
            atom_energy = params.omega / g;
            photon_energy = params.nu / g;
            break;
        case Frame::Cavity:
            atom_energy = -params.delta_over_g();
            break;
        case Frame::Symmetric:
            atom_energy = -0.5 * params.delta_over_g();
            photon_energy = 0.5 * params.delta_over_g();
            break;
        default:
            throw std::invalid_argument("unknown frame");
    }

    HamiltonianSector h;
    h.family = family;
    h.frame = frame;
    const auto n = static_cast<Eigen::Index>(basis.size());
    h.matrix = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const BasisState& b = basis[static_cast<size_t>(i)];
        h.basis_labels.push_back(b.label());
        const int atoms = b.atom_a + b.atom_b;
        h.matrix(i, i) = cplx(atom_energy * atoms + photon_energy * (b.photons_a + b.photons_b), -0.5 * kappa * atoms);
    }
    // g (a^dag s-_A + a s+_A) + g (b^dag s-_B + b s+_B); sqrt(n+1) = 1 for n = 0.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const BasisState& u = basis[static_cast<size_t>(i)];
            const BasisState& v = basis[static_cast<size_t>(j)];
            const bool a_swap = u.atom_a == 1 && v.atom_a == 0 && v.photons_a == u.photons_a + 1 &&
                                u.atom_b == v.atom_b && u.photons_b == v.photons_b;
            const bool b_swap = u.atom_b == 1 && v.atom_b == 0 && v.photons_b == u.photons_b + 1 &&
                                u.atom_a == v.atom_a && u.photons_a == v.photons_a;
            if (a_swap || b_swap) {
                const int n_before = a_swap ? u.photons_a : u.photons_b;
                const double amp = std::sqrt(static_cast<double>(n_before + 1));
                h.matrix(i, j) += amp;
                h.matrix(j, i) += amp;
            }
        }
    }
    return h;
}

StateVector initial_state(const InitialState& init) {
    StateVector s;
    s.family = init.family;
    const auto n = static_cast<Eigen::Index>(sector_basis(init.family).size());
    s.amplitudes = Eigen::VectorXcd::Zero(n);
    switch (init.family) {
        case Family::Psi:  // cos|eg00> + sin|ge00>
            s.amplitudes(0) = std::cos(init.alpha);
            s.amplitudes(1) = std::sin(init.alpha);
            break;
        case Family::Phi:  // cos|ee00> + sin|gg00>
            s.amplitudes(0) = std::cos(init.alpha);
            s.amplitudes(4) = std::sin(init.alpha);
            break;
    }
    return s;
}

Rk4Integrator::Rk4Integrator(const HamiltonianSector& sector, double dT)
    : generator_(-I * sector.matrix), family_(sector.family), dT_(dT) {
    if (!(dT > 0.0) || dT > kMaxStep)
        throw std::invalid_argument("integration step dT must lie in (0, 0.01]");
}

void Rk4Integrator::rk4_step(Eigen::VectorXcd& psi, double h) const {
    const Eigen::VectorXcd k1 = generator_ * psi;
    const Eigen::VectorXcd k2 = generator_ * (psi + 0.5 * h * k1);
    const Eigen::VectorXcd k3 = generator_ * (psi + 0.5 * h * k2);
    const Eigen::VectorXcd k4 = generator_ * (psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void Rk4Integrator::check_norm(const Eigen::VectorXcd& psi, double T) const {
    const double n = psi.squaredNorm();
    if (!std::isfinite(n) || n > kNormGuard)
        throw std::runtime_error("state norm grew to " + std::to_string(n) + " at T = " + std::to_string(T));
}

StateVector Rk4Integrator::advance(StateVector state, double T_target) const {
    if (state.family != family_) throw std::invalid_argument("state and sector belong to different families");
    if (state.amplitudes.size() != generator_.rows()) throw std::invalid_argument("state dimension mismatch");
    if (!std::isfinite(T_target) || T_target < state.T)
        throw std::invalid_argument("target time must not precede the current time");
    const double span = T_target - state.T;
    if (span == 0.0) return state;
    const auto steps = static_cast<long>(std::ceil(span / dT_ - 1e-9));
    const double h = span / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) {
        rk4_step(state.amplitudes, h);
        check_norm(state.amplitudes, state.T + (k + 1) * h);
    }
    state.T = T_target;
    return state;
}

std::vector<StateVector> Rk4Integrator::trajectory(const StateVector& initial, std::span<const double> times) const {
    std::vector<StateVector> out;
    out.reserve(times.size());
    StateVector current = initial;
    for (double t : times) {
        current = advance(std::move(current), t);
        out.push_back(current);
    }
    return out;
}

std::vector<double> Rk4Integrator::step_norms(const StateVector& initial, double T_final) const {
    if (T_final < initial.T) throw std::invalid_argument("T_final precedes the initial time");
    const double span = T_final - initial.T;
    const auto steps = static_cast<long>(std::ceil(span / dT_ - 1e-9));
    std::vector<double> norms{initial.norm()};
    if (steps == 0) return norms;
    const double h = span / static_cast<double>(steps);
    Eigen::VectorXcd psi = initial.amplitudes;
    for (long k = 0; k < steps; ++k) {
        rk4_step(psi, h);
        check_norm(psi, initial.T + (k + 1) * h);
        norms.push_back(psi.squaredNorm());
    }
    return norms;
}

StateVector integrate(const HamiltonianSector& sector, const StateVector& initial, double T_final, double dT) {
    return Rk4Integrator(sector, dT).advance(initial, T_final);
}

double step_halving_error(const HamiltonianSector& sector, const StateVector& initial, double T_final, double dT) {
    const StateVector coarse = integrate(sector, initial, T_final, dT);
    const StateVector fine = integrate(sector, initial, T_final, 0.5 * dT);
    return (coarse.amplitudes - fine.amplitudes).cwiseAbs().maxCoeff();
}

ReducedDensityMatrix ReducedDensityMatrix::normalized() const {
    const double tr = trace();
    if (!(tr > 0.0)) throw std::invalid_argument("cannot renormalize a density matrix with zero trace");
    return {entries / tr};
}

ReducedDensityMatrix partial_trace_fields(Family family, const Eigen::VectorXcd& amplitudes) {
    const auto& basis = sector_basis(family);
    if (static_cast<size_t>(amplitudes.size()) != basis.size())
        throw std::invalid_argument("amplitude vector does not match the sector dimension");
    ReducedDensityMatrix rho;
    for (size_t i = 0; i < basis.size(); ++i) {
        for (size_t j = 0; j < basis.size(); ++j) {
            if (basis[i].photons_a != basis[j].photons_a || basis[i].photons_b != basis[j].photons_b) continue;
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            rho.entries(basis[i].atom_index(), basis[j].atom_index()) += amplitudes(ii) * std::conj(amplitudes(jj));
        }
    }
    return rho;
}

ReducedDensityMatrix partial_trace_fields(const StateVector& state) {
    return partial_trace_fields(state.family, state.amplitudes);
}

ReducedDensityMatrix partial_trace_fields(const AmplitudeSet& amps) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.x.size()));
    for (size_t i = 0; i < amps.x.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps.x[i];
    return partial_trace_fields(amps.family, v);
}

std::array<double, 4> wootters_lambdas(const ReducedDensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.entries);
    const Eigen::Vector4d d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::Matrix4cd W = es.eigenvectors() * d.asDiagonal();
    const Eigen::Matrix4cd tau = W.transpose() * spin_flip().cast<cplx>() * W;
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(tau);
    const Eigen::Vector4d sv = svd.singularValues();
    return {sv(0), sv(1), sv(2), sv(3)};
}

std::array<double, 4> wootters_lambdas_eigen(const ReducedDensityMatrix& rho) {
    const Eigen::Matrix4cd flip = spin_flip().cast<cplx>();
    const Eigen::Matrix4cd tilde = flip * rho.entries.conjugate() * flip;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho.entries * tilde, false);
    std::array<double, 4> l{};
    for (int i = 0; i < 4; ++i) l[static_cast<size_t>(i)] = std::sqrt(std::max(es.eigenvalues()(i).real(), 0.0));
    std::sort(l.begin(), l.end(), std::greater<>());
    return l;
}

ConcurrenceSample wootters_concurrence(const ReducedDensityMatrix& rho, double T) {
    check_density(rho);
    const auto l = wootters_lambdas(rho);
    return ConcurrenceSample::from_raw(T, l[0] - l[1] - l[2] - l[3]);
}

bool is_x_state(const ReducedDensityMatrix& rho, double tol) {
    static constexpr std::array<std::pair<int, int>, 8> off = {
        {{0, 1}, {0, 2}, {1, 0}, {2, 0}, {1, 3}, {3, 1}, {2, 3}, {3, 2}}};
    return std::all_of(off.begin(), off.end(),
                       [&](auto ij) { return std::abs(rho.entries(ij.first, ij.second)) <= tol; });
}

ConcurrenceSample x_state_concurrence(const ReducedDensityMatrix& rho, double T) {
    if (!is_x_state(rho)) throw std::invalid_argument("density matrix is not an X state");
    const Eigen::Matrix4cd& m = rho.entries;
    const auto pop = [&](int i) { return std::max(m(i, i).real(), 0.0); };
    const double c23 = std::abs(m(1, 2));
    const double c14 = std::abs(m(0, 3));
    const double single = 2.0 * (c23 - std::sqrt(pop(0) * pop(3)));
    const double pair = 2.0 * (c14 - std::sqrt(pop(1) * pop(2)));
    constexpr double present = 1e-10;
    double raw;
    if (c23 > present && c14 <= present)
        raw = single;
    else if (c14 > present && c23 <= present)
        raw = pair;
    else
        raw = std::max(single, pair);
    return ConcurrenceSample::from_raw(T, raw);
}

std::vector<StateVector> oracle_states(const ModelParams& params, const InitialState& init,
                                       std::span<const double> times, const OracleOptions& opts) {
    const Rk4Integrator rk(build_sector(params, init.family, opts.frame), opts.dT);
    return rk.trajectory(initial_state(init), times);
}

ConcurrenceSample oracle_concurrence(const StateVector& state, ConcurrenceOptions opts) {
    ReducedDensityMatrix rho = partial_trace_fields(state);
    const double tr = rho.trace();
    ConcurrenceSample c = wootters_concurrence(rho, state.T);
    if (opts.renormalize && tr > 0.0) c = ConcurrenceSample::from_raw(state.T, c.raw / tr);
    return c;
}

std::vector<ConcurrenceSample> oracle_concurrence(const ModelParams& params, const InitialState& init,
                                                  std::span<const double> times, const OracleOptions& opts) {
    std::vector<ConcurrenceSample> out;
    out.reserve(times.size());
    for (const StateVector& s : oracle_states(params, init, times, opts))
        out.push_back(oracle_concurrence(s, opts.concurrence));
    return out;
}

}  // namespace jcent
