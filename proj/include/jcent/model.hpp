#pragma once

#include <complex>
#include <string>
#include <string_view>

namespace jcent {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Physical constants of the two identical atom-cavity pairs. All frequencies
// share the units of g; every public API takes dimensionless time T = g t.
struct ModelParams {
    double g = 1.0;      // atom-field coupling
    double omega = 0.0;  // atomic transition frequency
    double nu = 0.0;     // cavity mode frequency
    double gamma = 0.0;  // decay of |e> to levels outside the qubit

    // g = 1, nu = omega + delta.
    static ModelParams dimensionless(double kappa, double delta_over_g, double omega = 0.0);

    double delta() const { return nu - omega; }
    double kappa() const { return gamma / g; }
    double delta_over_g() const { return delta() / g; }

    // Throws std::invalid_argument when g <= 0, gamma < 0 or anything is non-finite.
    void validate() const;
};

// xi_pm = kappa +- 2i delta/g, eta_pm = sqrt(xi_pm^2 - 16).
//
// eta uses the principal branch of std::sqrt (Re eta >= 0, and +i|.| on the
// negative real axis). Every quantity built from these is even in eta, so the
// branch never shows up in amplitudes or concurrences.
struct SpectralQuantities {
    cplx xi_plus;
    cplx xi_minus;
    cplx eta_plus;
    cplx eta_minus;

    double kappa() const { return 0.5 * (xi_plus + xi_minus).real(); }

    SpectralQuantities with_flipped_eta(bool flip_plus, bool flip_minus) const;
};

SpectralQuantities derive(const ModelParams& params);

// eta_pm = sqrt(xi_pm - 16), exactly as typeset in the original closed forms.
// Only for auditing the unreconciled expressions.
SpectralQuantities derive_quoted(const ModelParams& params);

enum class Family { Psi, Phi };

std::string_view to_string(Family family);
// Accepts "psi" / "phi" (case-insensitive); throws std::invalid_argument otherwise.
Family parse_family(std::string_view text);

// Atomic part of the initial state; both cavities start in vacuum.
//   Psi: cos(a)|eg> + sin(a)|ge>
//   Phi: cos(a)|ee> + sin(a)|gg>
// Any finite alpha is accepted; the physically distinct range is [0, pi/2].
struct InitialState {
    Family family = Family::Psi;
    double alpha = 0.0;

    static InitialState psi(double alpha) { return {Family::Psi, alpha}; }
    static InitialState phi(double alpha) { return {Family::Phi, alpha}; }
};

}  // namespace jcent
