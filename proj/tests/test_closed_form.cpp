#include <doctest.h>

#include <cmath>
#include <random>

#include "jcent/closed_form.hpp"
#include "jcent/oracle.hpp"
#include "pair_oracle.hpp"

using namespace jcent;

namespace {

ModelParams P(double kappa, double delta) { return ModelParams::dimensionless(kappa, delta); }

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("psi amplitudes at T = 0 are the initial state") {
    for (double k : {0.0, 0.7, 4.0}) {
        const auto a = psi_amplitudes(P(k, 1.5), kPi / 4.0, 0.0);
        CHECK(std::abs(a.x[0] - std::sqrt(0.5)) < 1e-15);
        CHECK(std::abs(a.x[1] - std::sqrt(0.5)) < 1e-15);
        CHECK(std::abs(a.x[2]) == 0.0);
        CHECK(std::abs(a.x[3]) == 0.0);
    }
}

TEST_CASE("psi amplitudes: full transfer at T = pi/2 without decay") {
    const auto a = psi_amplitudes(P(0.0, 0.0), kPi / 4.0, kPi / 2.0);
    CHECK(std::abs(a.x[0]) < 1e-15);
    CHECK(std::abs(a.x[2]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("psi amplitudes match frozen matrix-exponential values (gamma = g, T = 2)") {
    // |x_i| from scipy.linalg.expm of the 2x2 pair Hamiltonian, alpha = pi/6.
    const double expected[] = {0.31449249883222447, 0.18157232885890282, 0.5066250461940509, 0.2925001067983418};
    const auto a = psi_amplitudes(P(1.0, 0.0), kPi / 6.0, 2.0);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(std::abs(a.x[static_cast<size_t>(i)]) - expected[i]) < 1e-12);
    CHECK(std::abs(psi_concurrence(P(1.0, 0.0), kPi / 6.0, 2.0).value - 0.11420627084324553) < 1e-12);
}

TEST_CASE("closed-form amplitudes equal the exact pair propagator, phases included") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> k(0.0, 3.0), d(-5.0, 5.0), a(0.0, kPi / 2.0), t(0.0, 15.0);
    for (int i = 0; i < 300; ++i) {
        const double kappa = k(rng), delta = d(rng), alpha = a(rng), T = t(rng);
        CHECK(max_abs_diff(psi_amplitudes(P(kappa, delta), alpha, T).x, pair_oracle::psi(kappa, delta, alpha, T)) <
              1e-10);
        CHECK(max_abs_diff(phi_amplitudes(P(kappa, delta), alpha, T).x, pair_oracle::phi(kappa, delta, alpha, T)) <
              1e-10);
    }
}

TEST_CASE("psi concurrence examples") {
    CHECK(psi_concurrence(P(0.3, 2.0), kPi / 4.0, 0.0).value == doctest::Approx(1.0).epsilon(1e-14));
    for (double T : {0.0, 1.0, 7.5}) CHECK(psi_concurrence(P(0.5, 1.0), 0.0, T).value == 0.0);
    CHECK(psi_concurrence(P(0.0, 0.0), kPi / 4.0, kPi / 3.0).value == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("psi concurrence equals the Eq.-style product form for alpha in [0, pi/2]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> k(0.0, 3.0), d(-5.0, 5.0), a(0.0, kPi / 2.0), t(0.0, 15.0);
    for (int i = 0; i < 500; ++i) {
        const auto s = derive(P(k(rng), d(rng)));
        const double alpha = a(rng), T = t(rng);
        CHECK(std::abs(psi_concurrence(s, alpha, T).raw - psi_concurrence_product_form(s, alpha, T).raw) < 1e-10);
    }
}

TEST_CASE("resonant formula examples and reduction") {
    CHECK(resonant_psi_concurrence(0.0, kPi / 4.0, kPi / 2.0).value < 1e-15);
    CHECK(resonant_psi_concurrence(0.0, kPi / 6.0, 0.0).value == doctest::Approx(std::sin(kPi / 3.0)).epsilon(1e-14));
    CHECK(std::abs(resonant_psi_concurrence(1.0, kPi / 4.0, 1.0).value - psi_concurrence(P(1.0, 0.0), kPi / 4.0, 1.0).value) <
          1e-10);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> k(0.0, 8.0), a(0.0, kPi / 2.0), t(0.0, 15.0);
    for (int i = 0; i < 500; ++i) {
        const double kappa = k(rng), alpha = a(rng), T = t(rng);
        CHECK(std::abs(resonant_psi_concurrence(kappa, alpha, T).value - psi_concurrence(P(kappa, 0.0), alpha, T).value) <
              1e-10);
    }
}

TEST_CASE("critical damping kappa = 4 is evaluated through the series limit") {
    // |c_e|^2 at kappa = 4, T = 1.3 from expm of the pair Hamiltonian.
    const double expected = 0.00668462203929006;
    CHECK(std::abs(resonant_psi_concurrence(4.0, kPi / 4.0, 1.3).value - expected) < 1e-12);
    CHECK(std::abs(psi_concurrence(P(4.0, 0.0), kPi / 4.0, 1.3).value - expected) < 1e-12);
    // continuous across the critical line
    const double below = psi_concurrence(P(4.0 - 1e-7, 0.0), kPi / 4.0, 1.3).value;
    const double above = psi_concurrence(P(4.0 + 1e-7, 0.0), kPi / 4.0, 1.3).value;
    CHECK(std::abs(below - expected) < 1e-8);
    CHECK(std::abs(above - expected) < 1e-8);
    const auto phi = phi_amplitudes(P(4.0, 0.0), kPi / 3.0, 2.0);
    for (const auto& x : phi.x) CHECK(std::isfinite(std::abs(x)));
    CHECK(max_abs_diff(phi.x, pair_oracle::phi(4.0, 0.0, kPi / 3.0, 2.0)) < 1e-12);
}

TEST_CASE("phi amplitudes: initial state and structural identities") {
    const auto a = phi_amplitudes(P(0.0, 0.0), kPi / 3.0, 0.0);
    const std::vector<cplx> expected = {0.5, 0.0, 0.0, 0.0, std::sqrt(3.0) / 2.0};
    CHECK(max_abs_diff(a.x, expected) < 1e-15);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> k(0.0, 2.0), d(-5.0, 5.0), al(-3.0, 3.0), t(0.0, 15.0);
    for (int i = 0; i < 300; ++i) {
        const double alpha = al(rng);
        const auto ph = phi_amplitudes(P(k(rng), d(rng)), alpha, t(rng));
        CHECK(ph.x[2] == ph.x[3]);
        CHECK(std::abs(std::abs(ph.x[4]) - std::abs(std::sin(alpha))) < 1e-15);
        const auto ps = psi_amplitudes(P(k(rng), d(rng)), alpha, t(rng));
        // x1 : x2 = cos : sin
        CHECK(std::abs(ps.x[0] * std::sin(alpha) - ps.x[1] * std::cos(alpha)) < 1e-14);
    }
}

TEST_CASE("phi amplitudes conserve norm without decay") {
    for (double T : {0.0, 0.4, 3.0, 11.0}) {
        CHECK(phi_amplitudes(P(0.0, 0.0), 0.0, T).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(phi_amplitudes(P(0.0, 3.0), 0.7, T).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(psi_amplitudes(P(0.0, -5.0), 0.7, T).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("phi amplitude moduli match frozen values (gamma = 0.5 g, delta = 2 g, T = 1.5)") {
    const auto a = phi_amplitudes(P(0.5, 2.0), kPi / 6.0, 1.5);
    CHECK(std::abs(std::abs(a.x[0]) - 0.306692271550547) < 1e-12);
    CHECK(std::abs(std::abs(a.x[1]) - 0.22252959282298446) < 1e-12);
    CHECK(std::abs(std::abs(a.x[2]) - 0.2612433851987441) < 1e-12);
    CHECK(std::abs(phi_concurrence(P(0.5, 2.0), kPi / 6.0, 1.5).raw - 0.17019605893034814) < 1e-12);
}

TEST_CASE("phi concurrence examples") {
    CHECK(phi_concurrence(P(0.8, -1.0), kPi / 4.0, 0.0).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(phi_concurrence(P(0.8, -1.0), 0.0, 0.0).value == 0.0);
    bool dark = false;
    for (int i = 0; i <= 2000 && !dark; ++i) dark = phi_concurrence(P(0.0, 0.0), kPi / 6.0, 2.0 * kPi * i / 2000).raw < 0;
    CHECK(dark);
}

TEST_CASE("quoted F + G agrees with the reconciled phi concurrence once eta is squared") {
    // Lambda = -(eta cosh(T eta/4) - xi sinh(T eta/4))^2 makes G = 2|x1 x5| and F = -2|x3 x4|.
    for (double T : {0.0, 0.3, 1.7, 6.0, 12.0})
        for (double k : {0.0, 0.5, 1.0})
            for (double d : {0.0, 1.0, -3.0}) {
                const auto s = derive(P(k, d));
                CHECK(std::abs(phi_concurrence_quoted(s, kPi / 6.0, T).raw - phi_concurrence(s, kPi / 6.0, T).raw) <
                      1e-10);
            }
    // T = 0 normalization holds at kappa = delta = 0
    CHECK(phi_concurrence_quoted(derive(P(0.0, 0.0)), kPi / 6.0, 0.0).value ==
          doctest::Approx(std::sin(kPi / 3.0)).epsilon(1e-14));
}

TEST_CASE("quoted eta = sqrt(xi - 16) breaks the T = 0 normalization away from kappa in {0, 1}") {
    const auto s = derive_quoted(P(0.5, 0.0));
    const double c0 = phi_concurrence_quoted(s, kPi / 4.0, 0.0).value;
    CHECK(c0 == doctest::Approx(15.75 / 15.5).epsilon(1e-12));
}

TEST_CASE("quoted psi exponent pairing (xi+ with eta-) only corrupts the phase off resonance") {
    CHECK(max_abs_diff(psi_amplitudes_quoted(P(0.5, 0.0), 0.4, 3.0).x, psi_amplitudes(P(0.5, 0.0), 0.4, 3.0).x) <
          1e-14);
    const double quoted = std::abs(psi_amplitudes_quoted(P(0.5, 2.0), 0.4, 3.0).x[0]);
    const double good = std::abs(pair_oracle::psi(0.5, 2.0, 0.4, 3.0)[0]);
    CHECK(std::abs(quoted - good) < 1e-12);  // xi+ - xi- = 4i delta: moduli survive
    const auto pa = psi_amplitudes_quoted(P(0.5, 2.0), 0.4, 3.0);
    const auto ga = psi_amplitudes(P(0.5, 2.0), 0.4, 3.0);
    CHECK(std::abs(pa.x[0] - ga.x[0]) > 1e-3);
}

TEST_CASE("quoted phi x1 bracket (zeta^2 for xi^2) fails x1(0) = cos(alpha) when kappa != 0") {
    const auto lossless = phi_amplitudes_quoted(P(0.0, 0.0), 0.3, 0.0);
    CHECK(std::abs(lossless.x[0] - std::cos(0.3)) < 1e-14);
    const auto lossy = phi_amplitudes_quoted(P(0.5, 0.0), 0.3, 0.0);
    const auto eta = derive(P(0.5, 0.0)).eta_minus;
    CHECK(std::abs(lossy.x[0] - (-16.0 / (eta * eta)) * std::cos(0.3)) < 1e-14);
    CHECK(std::abs(std::abs(lossy.x[0]) - std::cos(0.3)) > 1e-3);
    // the other quoted amplitudes only differ by frame phases
    const auto pr = phi_amplitudes_quoted(P(0.5, 2.0), 0.3, 2.2);
    const auto re = phi_amplitudes(P(0.5, 2.0), 0.3, 2.2);
    for (size_t i = 1; i < 5; ++i) CHECK(std::abs(std::abs(pr.x[i]) - std::abs(re.x[i])) < 1e-12);
}

TEST_CASE("branch invariance: flipping eta signs leaves every output unchanged") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> k(0.0, 1.0), d(-5.0, 5.0), a(0.0, kPi / 2.0), t(0.0, 5.0 * kPi);
    for (int i = 0; i < 500; ++i) {
        const auto s = derive(P(k(rng), d(rng)));
        const double alpha = a(rng), T = t(rng);
        for (auto [fp, fm] : {std::pair{true, false}, {false, true}, {true, true}}) {
            const auto f = s.with_flipped_eta(fp, fm);
            CHECK(max_abs_diff(psi_amplitudes(f, alpha, T).x, psi_amplitudes(s, alpha, T).x) < 1e-10);
            CHECK(max_abs_diff(phi_amplitudes(f, alpha, T).x, phi_amplitudes(s, alpha, T).x) < 1e-10);
            CHECK(std::abs(psi_concurrence_product_form(f, alpha, T).raw - psi_concurrence_product_form(s, alpha, T).raw) <
                  1e-10);
            CHECK(std::abs(phi_concurrence_quoted(f, alpha, T).raw - phi_concurrence_quoted(s, alpha, T).raw) < 1e-10);
        }
    }
}

TEST_CASE("detuning symmetry of the concurrence") {
    for (double k : {0.0, 0.5, 1.0})
        for (double d : {1.0, 3.0, 5.0})
            for (int i = 0; i <= 200; ++i) {
                const double T = 5.0 * kPi * i / 200.0;
                for (Family f : {Family::Psi, Family::Phi}) {
                    const InitialState init{f, kPi / 6.0};
                    CHECK(std::abs(concurrence(P(k, d), init, T).value - concurrence(P(k, -d), init, T).value) < 1e-10);
                }
            }
}

TEST_CASE("norm is non-increasing under decay and psi raw is never negative") {
    for (Family f : {Family::Psi, Family::Phi}) {
        for (double d : {0.0, 3.0}) {
            const auto s = derive(P(0.5, d));
            double prev = 1.0 + 1e-12;
            for (int i = 0; i <= 4000; ++i) {
                const double T = 5.0 * kPi * i / 4000.0;
                const auto a = amplitudes(s, {f, kPi / 5.0}, T);
                CHECK(a.norm() <= prev + 1e-9);
                prev = a.norm();
                if (f == Family::Psi) CHECK(concurrence_from_amplitudes(a).raw >= 0.0);
            }
        }
    }
}

TEST_CASE("renormalize divides by the trace") {
    const auto a = phi_amplitudes(P(1.0, 0.5), kPi / 5.0, 2.0);
    const auto plain = concurrence_from_amplitudes(a);
    const auto renorm = concurrence_from_amplitudes(a, {.renormalize = true});
    CHECK(renorm.raw == doctest::Approx(plain.raw / a.norm()).epsilon(1e-14));
    CHECK(a.norm() < 1.0);
}

TEST_CASE("negative or non-finite time is rejected") {
    CHECK_THROWS_AS(psi_amplitudes(P(0.0, 0.0), 0.1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(phi_concurrence(P(0.0, 0.0), 0.1, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(resonant_psi_concurrence(-1.0, 0.1, 1.0), std::invalid_argument);
    AmplitudeSet bad{Family::Phi, 0.0, {1.0, 0.0}};
    CHECK_THROWS_AS(concurrence_from_amplitudes(bad), std::invalid_argument);
}
