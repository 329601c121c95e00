#include <doctest.h>

#include <cmath>

#include "oamu/mathieu.hpp"
#include "oamu/numerics.hpp"
#include "oracles.hpp"

using namespace oamu;

TEST_CASE("build_even_matrix: free rotor and hand-checked q=1 entries") {
    const auto m0 = build_even_matrix(0.0, 8);
    for (int k = 0; k < 8; ++k) CHECK(m0.diag[k] == 4.0 * k * k);
    for (double e : m0.offdiag) CHECK(e == 0.0);

    // Substituting the three-term cosine series into the equation by hand:
    // diag (0, 4, 16), offdiag (sqrt(2), 1).
    const auto m1 = build_even_matrix(1.0, 8);
    CHECK(m1.diag[0] == 0.0);
    CHECK(m1.diag[1] == 4.0);
    CHECK(m1.diag[2] == 16.0);
    CHECK(m1.offdiag[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-16));
    CHECK(m1.offdiag[1] == 1.0);
}

TEST_CASE("build_even_matrix: truncation convergence of the low eigenvalues") {
    const auto m64 = build_even_matrix(2.0, 64);
    const auto m128 = build_even_matrix(2.0, 128);
    for (int idx = 0; idx < 5; ++idx) {
        const double e64 = eigen_lowest(m64, idx).value;
        const double e128 = eigen_lowest(m128, idx).value;
        CHECK(std::fabs(e64 - e128) < 1e-13);
    }
}

TEST_CASE("build_odd_matrix: free rotor diagonal and b_2(0) = 4") {
    const auto m = build_odd_matrix(0.0, 8);
    CHECK(m.diag[0] == 4.0);
    CHECK(m.diag[1] == 16.0);
    CHECK(m.diag[2] == 36.0);
    CHECK(solve(2, 0.0, Parity::odd).charvalue == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("build_odd_matrix: b_2(5) < a_2(5)") {
    CHECK(solve(2, 5.0, Parity::odd).charvalue < solve(2, 5.0, Parity::even).charvalue);
}

TEST_CASE("solve: free rotor states are exact") {
    const auto ce0 = solve(0, 0.0, Parity::even);
    CHECK(ce0.charvalue == doctest::Approx(0.0));
    CHECK(ce0.coeffs[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    for (int k = 1; k < ce0.truncation(); ++k) CHECK(std::fabs(ce0.coeffs[k]) < 1e-14);

    const auto ce2 = solve(2, 0.0, Parity::even);
    CHECK(ce2.charvalue == doctest::Approx(4.0));
    CHECK(ce2.coeffs[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(ce2.coeffs[0]) < 1e-14);

    // a_{2n}(0) = (2n)^2 with a single Fourier coefficient.
    for (int n : {3, 5}) {
        const auto st = solve(2 * n, 0.0, Parity::even);
        CHECK(st.charvalue == doctest::Approx(4.0 * n * n).epsilon(1e-13));
        CHECK(st.coeffs[n] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("solve: ground state at q=1") {
    const auto st = solve(0, 1.0, Parity::even);
    CHECK(st.charvalue == doctest::Approx(-0.4551386).epsilon(1e-7));
    // State invariants: normalization, tail, residual.
    double norm = 2.0 * st.coeffs[0] * st.coeffs[0];
    for (int k = 1; k < st.truncation(); ++k) norm += st.coeffs[k] * st.coeffs[k];
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(st.coeffs.back()) < 1e-14);
    CHECK(collocation_residual(st) < 1e-8);
    CHECK(st.coeffs[0] > 0.0);
}

TEST_CASE("solve: characteristic value against the shooting oracle") {
    // Independent route: bisection on y'(pi/2) of the RK4-integrated equation.
    const double a_oracle = oracles::shoot_char_value(1.0, -1.0, 1.0);
    const auto st = solve(0, 1.0, Parity::even);
    CHECK(st.charvalue == doctest::Approx(a_oracle).epsilon(1e-9));
}

TEST_CASE("solve: rejects invalid requests") {
    CHECK_THROWS_AS(solve(1, 1.0, Parity::even), std::invalid_argument);
    CHECK_THROWS_AS(solve(-2, 1.0, Parity::even), std::invalid_argument);
    CHECK_THROWS_AS(solve(0, -0.5, Parity::even), std::invalid_argument);
    CHECK_THROWS_AS(solve(0, 1.0, Parity::odd), std::invalid_argument);
}

TEST_CASE("solve: truncation robustness up to q=50") {
    for (double q : {1.0, 10.0, 50.0}) {
        const auto st = solve(0, q, Parity::even);
        // Doubling the matrix beyond the adaptive choice must not move the
        // characteristic value.
        const int K2 = 2 * std::max(st.truncation(), 32);
        const double a2 = eigen_lowest(build_even_matrix(q, K2), 0).value;
        CHECK(std::fabs(st.charvalue - a2) < 1e-13);
    }
}

TEST_CASE("solve: characteristic values continuous in q") {
    // |da/dq| = 2|Theta| <= 2, so a 1e-6 step moves a by at most ~2e-6.
    const double dq = 1e-6;
    for (double q : {0.5, 2.0, 10.0}) {
        for (int n : {0, 1}) {
            const double a1 = solve(2 * n, q, Parity::even).charvalue;
            const double a2 = solve(2 * n, q + dq, Parity::even).charvalue;
            CHECK(std::fabs(a2 - a1) <= 2.0 * dq + 1e-12);
        }
    }
}

TEST_CASE("evaluate: free rotor values and synthesis") {
    const auto ce0 = solve(0, 0.0, Parity::even);
    CHECK(evaluate(ce0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(evaluate(ce0, 1.3) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    const auto ce2 = solve(2, 0.0, Parity::even);
    CHECK(evaluate(ce2, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("evaluate: periodicity and parity") {
    const auto ce = solve(2, 3.0, Parity::even);
    const auto se = solve(2, 3.0, Parity::odd);
    for (double eta : {0.3, 1.1, 2.4}) {
        CHECK(evaluate(ce, eta + kPi) == doctest::Approx(evaluate(ce, eta)).epsilon(1e-12));
        CHECK(evaluate(ce, -eta) == doctest::Approx(evaluate(ce, eta)).epsilon(1e-12));
        CHECK(evaluate(se, eta + kPi) == doctest::Approx(evaluate(se, eta)).epsilon(1e-12));
        CHECK(evaluate(se, -eta) == doctest::Approx(-evaluate(se, eta)).epsilon(1e-12));
    }
}

TEST_CASE("evaluate: ce0 at q=1 matches the RK4 shooting profile") {
    const auto st = solve(0, 1.0, Parity::even);
    const auto shot = oracles::mathieu_shoot(st.charvalue, 1.0);
    // Normalize the shooting solution to the coefficient convention
    // (integral of ce^2 over a 2 pi period equals pi) using its samples on
    // [0, pi/2], a quarter period carrying 1/4 of the norm by symmetry.
    const int steps = static_cast<int>(shot.samples.size()) - 1;
    const double h = 0.5 * kPi / steps;
    double integral = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        integral += w * shot.samples[i] * shot.samples[i] * h;
    }
    const double scale = std::sqrt(kPi / (4.0 * integral));
    CHECK(evaluate(st, 0.0) == doctest::Approx(scale * shot.samples[0]).epsilon(1e-8));
    CHECK(evaluate(st, 0.25 * kPi) ==
          doctest::Approx(scale * shot.samples[steps / 2]).epsilon(1e-8));
}

TEST_CASE("to_mode_spectrum: free rotor and cos phi states") {
    const auto s0 = to_mode_spectrum(solve(0, 0.0, Parity::even));
    CHECK(std::abs(s0.at(0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(s0.at(1)) < 1e-14);

    const auto s1 = to_mode_spectrum(solve(2, 0.0, Parity::even));
    CHECK(s1.at(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
    CHECK(s1.at(-1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("to_mode_spectrum: unit circle norm by quadrature") {
    const auto spec = to_mode_spectrum(solve(0, 2.0, Parity::even));
    CHECK(spec.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    const auto mom = oracles::quadrature_moments(spec);
    CHECK(mom.norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("to_mode_spectrum: odd family is not supported") {
    CHECK_THROWS_AS(to_mode_spectrum(solve(2, 1.0, Parity::odd)), std::logic_error);
}

TEST_CASE("interlacing_check: strict chain for q > 0, degenerate at q = 0") {
    const auto chain1 = interlacing_check(1.0, 4);
    REQUIRE(chain1.size() == 5);
    CHECK(chain1[0].parity == Parity::even);
    CHECK(chain1[1].parity == Parity::odd);
    for (std::size_t i = 1; i < chain1.size(); ++i) CHECK(chain1[i - 1].value < chain1[i].value);

    const auto chain0 = interlacing_check(0.0, 4);
    CHECK(chain0[1].value == doctest::Approx(4.0));
    CHECK(chain0[2].value == doctest::Approx(4.0));

    const auto chain25 = interlacing_check(25.0, 4);
    REQUIRE(chain25.size() == 5);
    for (std::size_t i = 1; i < chain25.size(); ++i) CHECK(chain25[i - 1].value < chain25[i].value);
}

TEST_CASE("orthogonality of the even family under quadrature") {
    for (double q : {1.0, 5.0, 10.0}) {
        const auto s0 = solve(0, q, Parity::even);
        const auto s2 = solve(2, q, Parity::even);
        const auto s4 = solve(4, q, Parity::even);
        auto inner = [](const MathieuState& a, const MathieuState& b) {
            // Quadrature of ce_a * ce_b over [0, pi].
            const int n = 512;
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                const double eta = kPi * i / n;
                sum += evaluate(a, eta) * evaluate(b, eta);
            }
            return sum * kPi / n;
        };
        CHECK(std::fabs(inner(s0, s2)) < 1e-10);
        CHECK(std::fabs(inner(s0, s4)) < 1e-10);
        CHECK(std::fabs(inner(s2, s4)) < 1e-10);
    }
}

TEST_CASE("mathieu_functionals: free rotor endpoints") {
    const auto f0 = mathieu_functionals(solve(0, 0.0, Parity::even));
    CHECK(f0.var_l == doctest::Approx(0.0));
    CHECK(f0.dispersion_sq == doctest::Approx(1.0));
    const auto f1 = mathieu_functionals(solve(2, 0.0, Parity::even));
    CHECK(f1.var_l == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(f1.dispersion_sq == doctest::Approx(1.0).epsilon(1e-13));
}
