#include "jcent/closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace jcent {

namespace {

constexpr cplx I(0.0, 1.0);

void check_time(double T) {
    if (!std::isfinite(T) || T < 0.0)
        throw std::invalid_argument("dimensionless time T must be finite and non-negative");
}

// (e^z - 1) / z, continuous through z = 0.
cplx expm1_over(cplx z) {
    if (std::abs(z) < 1e-3)
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    return (std::exp(z) - 1.0) / z;
}

// The building blocks shared by both families, for one (xi, eta) pair:
//   zeta = e^{T eta/2} - 1
//   r    = zeta / eta          (-> T/2 as eta -> 0)
//   M    = 1 + e^{T eta/2} - zeta xi / eta = 2 + zeta - xi r
struct PairTerms {
    cplx zeta;
    cplx r;
    cplx M;
};

PairTerms pair_terms(cplx xi, cplx eta, double T) {
    PairTerms p;
    p.zeta = std::exp(0.5 * T * eta) - 1.0;
    p.r = 0.5 * T * expm1_over(0.5 * T * eta);
    p.M = 2.0 + p.zeta - xi * p.r;
    return p;
}

ConcurrenceSample finish(double T, double raw, double norm, ConcurrenceOptions opts) {
    if (opts.renormalize && norm > 0.0) raw /= norm;
    return ConcurrenceSample::from_raw(T, raw);
}

}  // namespace

double AmplitudeSet::norm() const {
    double n = 0.0;
    for (const auto& v : x) n += std::norm(v);
    return n;
}

// Psi family. In the cavity-rotating frame each atom-cavity pair is the 2x2
// block [[-delta - i kappa/2, 1], [1, 0]], whose propagator exponents are
// -(xi- +- eta-) T/4. Only xi-, eta- enter.
AmplitudeSet psi_amplitudes(const SpectralQuantities& s, double alpha, double T) {
    check_time(T);
    const cplx xi = s.xi_minus;
    const cplx eta = s.eta_minus;
    const PairTerms p = pair_terms(xi, eta, T);
    const cplx e = std::exp(-0.25 * T * (xi + eta));
    const double c = std::cos(alpha);
    const double sn = std::sin(alpha);

    AmplitudeSet a{Family::Psi, T, {}};
    a.x = {0.5 * p.M * c * e, 0.5 * p.M * sn * e, -2.0 * I * c * p.r * e, -2.0 * I * sn * p.r * e};
    return a;
}

AmplitudeSet psi_amplitudes(const ModelParams& params, double alpha, double T) {
    return psi_amplitudes(derive(params), alpha, T);
}

ConcurrenceSample psi_concurrence(const SpectralQuantities& s, double alpha, double T,
                                  ConcurrenceOptions opts) {
    return concurrence_from_amplitudes(psi_amplitudes(s, alpha, T), opts);
}

ConcurrenceSample psi_concurrence(const ModelParams& params, double alpha, double T,
                                  ConcurrenceOptions opts) {
    return psi_concurrence(derive(params), alpha, T, opts);
}

ConcurrenceSample psi_concurrence_product_form(const SpectralQuantities& s, double alpha, double T) {
    check_time(T);
    const PairTerms plus = pair_terms(s.xi_plus, s.eta_plus, T);
    const PairTerms minus = pair_terms(s.xi_minus, s.eta_minus, T);
    const cplx e = std::exp(-0.25 * T * (s.xi_plus + s.xi_minus + s.eta_plus + s.eta_minus));
    const cplx f = 0.25 * e * plus.M * minus.M * std::sin(2.0 * alpha);
    return ConcurrenceSample::from_raw(T, f.real());
}

ConcurrenceSample resonant_psi_concurrence(double kappa, double alpha, double T) {
    check_time(T);
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("kappa must be finite and non-negative");
    const cplx eta = std::sqrt(cplx(kappa * kappa - 16.0, 0.0));
    // {1 + kappa/eta + e^{T eta/2}(1 - kappa/eta)} = 2 + zeta - kappa zeta/eta
    const PairTerms p = pair_terms(cplx(kappa, 0.0), eta, T);
    const cplx f = std::exp(-0.5 * T * (kappa + eta)) * p.M * p.M * std::sin(2.0 * alpha);
    return ConcurrenceSample::from_raw(T, 0.25 * f.real());
}

// Phi family. The pairs evolve independently, so
//   x1 = cos(a) c_e^2, x2 = cos(a) c_g^2, x3 = x4 = cos(a) c_e c_g, x5 = sin(a)
// with c_e = M e^{-T(xi+eta)/4}/2 and c_g = -2i r e^{-T(xi+eta)/4}.
// x1 = M^2/4 (...) is the reconciled closed bracket
//   [-8(2+zeta)^2 - zeta(2+zeta) eta xi + (1 + (1+zeta)^2) xi^2] / (2 eta^2)
// rewritten without the 1/eta^2 so kappa = 4, delta = 0 stays finite.
AmplitudeSet phi_amplitudes(const SpectralQuantities& s, double alpha, double T) {
    check_time(T);
    const cplx xi = s.xi_minus;
    const cplx eta = s.eta_minus;
    const PairTerms p = pair_terms(xi, eta, T);
    const cplx e2 = std::exp(-0.5 * T * (xi + eta));
    const double c = std::cos(alpha);

    AmplitudeSet a{Family::Phi, T, {}};
    const cplx x3 = -I * p.r * p.M * c * e2;
    a.x = {0.25 * p.M * p.M * c * e2, -4.0 * p.r * p.r * c * e2, x3, x3, cplx(std::sin(alpha), 0.0)};
    return a;
}

AmplitudeSet phi_amplitudes(const ModelParams& params, double alpha, double T) {
    return phi_amplitudes(derive(params), alpha, T);
}

ConcurrenceSample phi_concurrence(const SpectralQuantities& s, double alpha, double T,
                                  ConcurrenceOptions opts) {
    return concurrence_from_amplitudes(phi_amplitudes(s, alpha, T), opts);
}

ConcurrenceSample phi_concurrence(const ModelParams& params, double alpha, double T,
                                  ConcurrenceOptions opts) {
    return phi_concurrence(derive(params), alpha, T, opts);
}

ConcurrenceSample phi_concurrence_quoted(const SpectralQuantities& s, double alpha, double T) {
    check_time(T);
    const double kappa = s.kappa();
    const cplx ep = s.eta_plus, em = s.eta_minus;
    const cplx xp = s.xi_plus, xm = s.xi_minus;
    const double c = std::cos(alpha), sn = std::sin(alpha);

    const cplx delta_p = -std::cosh(T * ep / 4.0) * ep + std::sinh(T * ep / 4.0) * xp;
    const cplx delta_m = std::cosh(T * em / 4.0) * em - std::sinh(T * em / 4.0) * xm;
    const cplx lambda_p = 8.0 + std::sinh(T * ep / 2.0) * ep * xp - std::cosh(T * ep / 2.0) * (-8.0 + xp * xp);
    const cplx lambda_m = 8.0 + std::sinh(T * em / 2.0) * em * xm - std::cosh(T * em / 2.0) * (-8.0 + xm * xm);
    const cplx ee = ep * em;

    const cplx F = 32.0 * std::exp(-kappa * T) * c * c * std::sinh(T * ep / 4.0) * std::sinh(T * em / 4.0) *
                   delta_p * delta_m / (ee * ee);
    const cplx G = 2.0 * std::sqrt(lambda_p * lambda_m * sn * sn * c * c / (ee * ee)) * std::exp(-0.5 * T * kappa);
    return ConcurrenceSample::from_raw(T, (F + G).real());
}

AmplitudeSet psi_amplitudes_quoted(const ModelParams& params, double alpha, double T) {
    check_time(T);
    const SpectralQuantities s = derive(params);
    const cplx xi = s.xi_minus;
    const cplx eta = s.eta_minus;
    const cplx zeta = std::exp(0.5 * T * eta) - 1.0;
    const cplx M = 1.0 + std::exp(0.5 * T * eta) - zeta * xi / eta;
    const cplx e = std::exp(-0.25 * T * (s.xi_plus + eta));
    const double c = std::cos(alpha), sn = std::sin(alpha);

    AmplitudeSet a{Family::Psi, T, {}};
    a.x = {0.5 * M * c * e, 0.5 * M * sn * e, -2.0 * I * c * zeta / eta * e, -2.0 * I * sn * zeta / eta * e};
    return a;
}

AmplitudeSet phi_amplitudes_quoted(const ModelParams& params, double alpha, double T) {
    check_time(T);
    const SpectralQuantities s = derive(params);
    const cplx xi = s.xi_minus;
    const cplx eta = s.eta_minus;
    const double g = params.g;
    const cplx zeta = std::exp(0.5 * T * eta) - 1.0;
    const cplx e = std::exp(-0.5 * T * (params.kappa() + 2.0 * I * params.nu / g + eta));
    const double c = std::cos(alpha);

    const cplx bracket1 = -8.0 * (2.0 + zeta) * (2.0 + zeta) - zeta * (2.0 + zeta) * eta * xi +
                          (1.0 + (1.0 + zeta) * (1.0 + zeta)) * zeta * zeta;
    const cplx x3 = -I / (eta * eta) * c * e * (-zeta * zeta * xi + (-1.0 + std::exp(T * eta)) * eta);

    AmplitudeSet a{Family::Phi, T, {}};
    a.x = {1.0 / (2.0 * eta * eta) * c * e * bracket1, -4.0 * e * (zeta / eta) * (zeta / eta) * c, x3, x3,
           std::exp(2.0 * I * T * params.omega / g) * std::sin(alpha)};
    return a;
}

AmplitudeSet amplitudes(const SpectralQuantities& s, const InitialState& init, double T) {
    switch (init.family) {
        case Family::Psi: return psi_amplitudes(s, init.alpha, T);
        case Family::Phi: return phi_amplitudes(s, init.alpha, T);
    }
    throw std::invalid_argument("unknown state family");
}

ConcurrenceSample concurrence(const SpectralQuantities& s, const InitialState& init, double T,
                              ConcurrenceOptions opts) {
    return concurrence_from_amplitudes(amplitudes(s, init, T), opts);
}

ConcurrenceSample concurrence(const ModelParams& params, const InitialState& init, double T,
                              ConcurrenceOptions opts) {
    return concurrence(derive(params), init, T, opts);
}

ConcurrenceSample concurrence_from_amplitudes(const AmplitudeSet& a, ConcurrenceOptions opts) {
    switch (a.family) {
        case Family::Psi:
            if (a.x.size() != 4) throw std::invalid_argument("Psi amplitude set must have 4 entries");
            return finish(a.T, 2.0 * std::abs(a.x[0]) * std::abs(a.x[1]), a.norm(), opts);
        case Family::Phi:
            if (a.x.size() != 5) throw std::invalid_argument("Phi amplitude set must have 5 entries");
            return finish(a.T, 2.0 * std::abs(a.x[0]) * std::abs(a.x[4]) - 2.0 * std::abs(a.x[2]) * std::abs(a.x[3]),
                          a.norm(), opts);
    }
    throw std::invalid_argument("unknown state family");
}

}  // namespace jcent
