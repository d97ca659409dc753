#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jcent/closed_form.hpp"
#include "jcent/model.hpp"

namespace jcent {

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kMaxStep = 1e-2;

// Occupations of one tensor-product basis state: atom A, atom B (1 = excited),
// photons in cavity a, photons in cavity b.
struct BasisState {
    int atom_a = 0;
    int atom_b = 0;
    int photons_a = 0;
    int photons_b = 0;

    std::string label() const;  // e.g. "eg01"
    int atom_index() const;     // position in {|ee>, |eg>, |ge>, |gg>}
    int excitations() const { return atom_a + atom_b + photons_a + photons_b; }
};

const std::vector<BasisState>& sector_basis(Family family);

// Energy reference for the sector matrix (units of g). The decay term
// -i gamma/2 per excited atom and the couplings are the same in every frame.
//   Lab:       omega per excited atom, nu per photon
//   Cavity:    nu removed per excitation -> -delta per excited atom
//   Symmetric: (omega + nu)/2 removed per excitation -> -delta/2 per atom, +delta/2 per photon
// Excitation number is conserved inside each closed subspace, so the frames
// differ only by phases e^{-i c N T}.
enum class Frame { Symmetric, Cavity, Lab };

struct HamiltonianSector {
    Family family = Family::Psi;
    Frame frame = Frame::Symmetric;
    Eigen::MatrixXcd matrix;  // H / g, generally non-Hermitian
    std::vector<std::string> basis_labels;

    Eigen::Index dim() const { return matrix.rows(); }
};

HamiltonianSector build_sector(const ModelParams& params, Family family, Frame frame = Frame::Symmetric);

struct StateVector {
    Family family = Family::Psi;
    Eigen::VectorXcd amplitudes;
    double T = 0.0;

    double norm() const { return amplitudes.squaredNorm(); }
};

StateVector initial_state(const InitialState& init);

// Classical fixed-step RK4 for i d psi/dT = (H/g) psi. Each interval between
// requested times is split into equal sub-steps no longer than dT, so the
// requested times are hit exactly.
class Rk4Integrator {
public:
    // Throws std::invalid_argument unless 0 < dT <= kMaxStep.
    Rk4Integrator(const HamiltonianSector& sector, double dT = kDefaultStep);

    // Throws std::runtime_error if the norm exceeds 1 + 1e-6.
    StateVector advance(StateVector state, double T_target) const;
    std::vector<StateVector> trajectory(const StateVector& initial, std::span<const double> times) const;

    // Norm after every single RK4 step from initial.T to T_final.
    std::vector<double> step_norms(const StateVector& initial, double T_final) const;

    double step() const { return dT_; }

private:
    void rk4_step(Eigen::VectorXcd& psi, double h) const;
    void check_norm(const Eigen::VectorXcd& psi, double T) const;

    Eigen::MatrixXcd generator_;  // -i H
    Family family_;
    double dT_;
};

StateVector integrate(const HamiltonianSector& sector, const StateVector& initial, double T_final,
                      double dT = kDefaultStep);

// max_i |psi_dT(T_final) - psi_{dT/2}(T_final)|_i
double step_halving_error(const HamiltonianSector& sector, const StateVector& initial, double T_final,
                          double dT = kDefaultStep);

// Over the ordered atomic basis {|ee>, |eg>, |ge>, |gg>}.
struct ReducedDensityMatrix {
    Eigen::Matrix4cd entries = Eigen::Matrix4cd::Zero();

    double trace() const { return entries.trace().real(); }
    ReducedDensityMatrix normalized() const;
};

ReducedDensityMatrix partial_trace_fields(Family family, const Eigen::VectorXcd& amplitudes);
ReducedDensityMatrix partial_trace_fields(const StateVector& state);
ReducedDensityMatrix partial_trace_fields(const AmplitudeSet& amps);

// Square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy), descending.
// Computed as the singular values of W^T (sy x sy) W with rho = W W^dagger.
std::array<double, 4> wootters_lambdas(const ReducedDensityMatrix& rho);
// Same quantity via a general complex eigensolver on the 4x4 product. Loses
// accuracy (~sqrt(eps)) whenever an eigenvalue of the product vanishes.
std::array<double, 4> wootters_lambdas_eigen(const ReducedDensityMatrix& rho);

// General two-qubit concurrence. Rejects input that is not Hermitian to 1e-12
// or has an eigenvalue below -1e-8 (std::invalid_argument).
ConcurrenceSample wootters_concurrence(const ReducedDensityMatrix& rho, double T = 0.0);

// X-state shortcut. With only the |eg><ge| coherence present:
//   raw = 2(|rho_23| - sqrt(rho_11 rho_44)),
// with only |ee><gg|: raw = 2(|rho_14| - sqrt(rho_22 rho_33)); with both or
// neither, the larger of the two. Rejects entries off the X pattern above 1e-10.
ConcurrenceSample x_state_concurrence(const ReducedDensityMatrix& rho, double T = 0.0);

bool is_x_state(const ReducedDensityMatrix& rho, double tol = 1e-10);

struct OracleOptions {
    double dT = kDefaultStep;
    Frame frame = Frame::Symmetric;
    ConcurrenceOptions concurrence;
};

// Full brute-force path: build sector, integrate, trace out the fields.
std::vector<StateVector> oracle_states(const ModelParams& params, const InitialState& init,
                                       std::span<const double> times, const OracleOptions& opts = {});

ConcurrenceSample oracle_concurrence(const StateVector& state, ConcurrenceOptions opts = {});

std::vector<ConcurrenceSample> oracle_concurrence(const ModelParams& params, const InitialState& init,
                                                  std::span<const double> times, const OracleOptions& opts = {});

}  // namespace jcent
