#include "jcent/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace jcent {

ModelParams ModelParams::dimensionless(double kappa, double delta_over_g, double omega) {
    ModelParams p;
    p.g = 1.0;
    p.gamma = kappa;
    p.omega = omega;
    p.nu = omega + delta_over_g;
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (!std::isfinite(g) || !std::isfinite(omega) || !std::isfinite(nu) || !std::isfinite(gamma))
        throw std::invalid_argument("model parameters must be finite");
    if (g <= 0.0)
        throw std::invalid_argument("coupling g must be positive");
    if (gamma < 0.0)
        throw std::invalid_argument("decay rate gamma must be non-negative");
    if (!std::isfinite(delta()))
        throw std::invalid_argument("detuning nu - omega overflows");
}

SpectralQuantities SpectralQuantities::with_flipped_eta(bool flip_plus, bool flip_minus) const {
    SpectralQuantities s = *this;
    if (flip_plus) s.eta_plus = -s.eta_plus;
    if (flip_minus) s.eta_minus = -s.eta_minus;
    return s;
}

namespace {

// Principal root with -0 imaginary parts treated as +0, so that a negative
// real argument always maps to +i sqrt|z|.
cplx principal_sqrt(cplx z) {
    if (z.imag() == 0.0) z.imag(0.0);
    return std::sqrt(z);
}

}  // namespace

SpectralQuantities derive(const ModelParams& params) {
    params.validate();
    const double kappa = params.kappa();
    const double d = params.delta_over_g();
    SpectralQuantities s;
    s.xi_plus = cplx(kappa, 2.0 * d);
    s.xi_minus = cplx(kappa, -2.0 * d);
    s.eta_plus = principal_sqrt(s.xi_plus * s.xi_plus - 16.0);
    s.eta_minus = principal_sqrt(s.xi_minus * s.xi_minus - 16.0);
    return s;
}

SpectralQuantities derive_quoted(const ModelParams& params) {
    SpectralQuantities s = derive(params);
    s.eta_plus = principal_sqrt(s.xi_plus - 16.0);
    s.eta_minus = principal_sqrt(s.xi_minus - 16.0);
    return s;
}

std::string_view to_string(Family family) {
    switch (family) {
        case Family::Psi: return "psi";
        case Family::Phi: return "phi";
    }
    throw std::invalid_argument("unknown state family");
}

Family parse_family(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "psi") return Family::Psi;
    if (lower == "phi") return Family::Phi;
    throw std::invalid_argument("unknown state family '" + std::string(text) + "' (expected psi or phi)");
}

}  // namespace jcent
