#pragma once

#include <vector>

#include "jcent/model.hpp"

namespace jcent {

// Time-dependent amplitudes of the two-atom, two-cavity state.
//   Psi: x1..x4 over |eg00>, |ge00>, |gg10>, |gg01>
//   Phi: x1..x5 over |ee00>, |gg11>, |eg01>, |ge10>, |gg00>
// Phases are expressed in the cavity-rotating frame (nu subtracted per
// excitation); only moduli and concurrences are frame independent.
struct AmplitudeSet {
    Family family = Family::Psi;
    double T = 0.0;
    std::vector<cplx> x;

    // Sum of |x_i|^2, i.e. tr(rho_AB). Equal to 1 only without decay.
    double norm() const;
};

struct ConcurrenceSample {
    double T = 0.0;
    double value = 0.0;  // max(raw, 0)
    double raw = 0.0;    // unclamped; its sign is what sudden-death detection reads

    static ConcurrenceSample from_raw(double T, double raw) { return {T, raw > 0.0 ? raw : 0.0, raw}; }
};

struct ConcurrenceOptions {
    // Divide by tr(rho_AB), i.e. report the concurrence of the renormalized state.
    bool renormalize = false;
};

AmplitudeSet psi_amplitudes(const SpectralQuantities& s, double alpha, double T);
AmplitudeSet psi_amplitudes(const ModelParams& params, double alpha, double T);

// raw = 2|x1 x2*|, never negative.
ConcurrenceSample psi_concurrence(const SpectralQuantities& s, double alpha, double T,
                                  ConcurrenceOptions opts = {});
ConcurrenceSample psi_concurrence(const ModelParams& params, double alpha, double T,
                                  ConcurrenceOptions opts = {});

// 1/4 exp(-T(xi+ + xi- + eta+ + eta-)/4) M+ M- sin(2 alpha). Agrees with
// psi_concurrence for alpha in [0, pi/2]; carries the sign of sin(2 alpha) outside.
ConcurrenceSample psi_concurrence_product_form(const SpectralQuantities& s, double alpha, double T);

// Resonant (delta = 0) Psi-family concurrence f(T)/4 with eta = sqrt(kappa^2 - 16).
// The critical line kappa = 4 (eta = 0) is evaluated through its series limit.
ConcurrenceSample resonant_psi_concurrence(double kappa, double alpha, double T);

AmplitudeSet phi_amplitudes(const SpectralQuantities& s, double alpha, double T);
AmplitudeSet phi_amplitudes(const ModelParams& params, double alpha, double T);

// raw = 2|x1 x5*| - 2|x3 x4|: |ee><gg| coherence against the |eg>/|ge> populations.
ConcurrenceSample phi_concurrence(const SpectralQuantities& s, double alpha, double T,
                                  ConcurrenceOptions opts = {});
ConcurrenceSample phi_concurrence(const ModelParams& params, double alpha, double T,
                                  ConcurrenceOptions opts = {});

// F(T) + G(T) in the commonly quoted form, with
//   F = 32 e^{-kT} cos^2(a) sinh(T eta+/4) sinh(T eta-/4) Delta+ Delta- / (eta+ eta-)^2
//   G = 2 sqrt(Lambda+ Lambda- sin^2(a) cos^2(a) / (eta+ eta-)^2) e^{-kT/2}.
// No regularization: undefined where eta+ eta- = 0.
ConcurrenceSample phi_concurrence_quoted(const SpectralQuantities& s, double alpha, double T);

// Unreconciled amplitude formulas, kept callable for auditing.
//   Psi: exponent pairs xi+ with eta- (the consistent pairing is xi- with eta-).
//   Phi: x1 bracket ends in (1 + (1+zeta)^2) zeta^2 instead of ... xi^2; lab-frame
//        phases exp(-iT nu/g) per excitation and x5 = exp(2iT omega/g) sin(a).
AmplitudeSet psi_amplitudes_quoted(const ModelParams& params, double alpha, double T);
AmplitudeSet phi_amplitudes_quoted(const ModelParams& params, double alpha, double T);

// Family dispatch.
AmplitudeSet amplitudes(const SpectralQuantities& s, const InitialState& init, double T);
ConcurrenceSample concurrence(const SpectralQuantities& s, const InitialState& init, double T,
                              ConcurrenceOptions opts = {});
ConcurrenceSample concurrence(const ModelParams& params, const InitialState& init, double T,
                              ConcurrenceOptions opts = {});

// X-state concurrence read straight off an amplitude set (no density matrix).
ConcurrenceSample concurrence_from_amplitudes(const AmplitudeSet& amps, ConcurrenceOptions opts = {});

}  // namespace jcent
