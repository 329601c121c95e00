#pragma once

#include <vector>

#include "oamu/numerics.hpp"
#include "oamu/states.hpp"

namespace oamu {

enum class Parity { even, odd };

/// Periodic angular Mathieu eigenstate of even order: the solution of
/// y'' + (a - 2 q cos 2eta) y = 0 with period pi. For the even family
/// (elliptic cosine) coeffs holds A_0, A_2, ..., normalized so that
/// 2 A_0^2 + sum_{k>=1} A_{2k}^2 = 1; for the odd family (elliptic sine)
/// coeffs holds B_2, B_4, ... with sum B_{2k}^2 = 1.
struct MathieuState {
    int order = 0;          // 2n
    double q = 0.0;
    Parity parity = Parity::even;
    double charvalue = 0.0;  // a_{2n}(q) or b_{2n}(q)
    std::vector<double> coeffs;

    int truncation() const { return static_cast<int>(coeffs.size()); }
};

/// Coefficient recurrence for the even family, written as a symmetric
/// tridiagonal matrix. Substituting ce = sum_k A_{2k} cos(2 k eta) into the
/// Mathieu equation and matching harmonics gives
///     a A_0        = q A_2
///     (a - 4) A_2  = q (2 A_0 + A_4)
///     (a - 4k^2) A_{2k} = q (A_{2k-2} + A_{2k+2}),   k >= 2,
/// where the doubled A_0 comes from cos(2 eta) cos(0) = cos(2 eta) carrying
/// the full weight while every other product splits in half. Rescaling the
/// k = 0 component by sqrt(2) symmetrizes the system: diagonal
/// (0, 4, 16, ..., 4 (K-1)^2), off-diagonal (sqrt(2) q, q, q, ...). The
/// Euclidean norm of the rescaled eigenvector then equals the coefficient
/// normalization 2 A_0^2 + sum A_{2k}^2.
SymTridiag build_even_matrix(double q, int K);

/// Odd-family analogue, se = sum_{k>=1} B_{2k} sin(2 k eta): the k = 1 row
/// loses its downward coupling because sin(0) = 0, so the matrix is already
/// symmetric with diagonal (4, 16, 36, ..., 4 K^2) and off-diagonal
/// (q, q, ...). Eigenvalues are the characteristic values b_2, b_4, ...
SymTridiag build_odd_matrix(double q, int K);

/// Solves for the periodic Mathieu eigenstate of the given even order.
/// The truncation K starts at 32 and doubles until the last coefficient is
/// below 1e-14 and the collocation residual of the differential equation is
/// below 1e-8 relative to max |psi|.
MathieuState solve(int order, double q, Parity parity, double tol = 1e-12);

/// Fourier synthesis at eta (pi-periodic; even in eta for ce, odd for se).
double evaluate(const MathieuState& state, double eta);

/// Maximum collocation residual of y'' + (a - 2q cos 2eta) y over a uniform
/// eta grid, divided by max |y|.
double collocation_residual(const MathieuState& state, int points = 256);

/// Even Mathieu state as a normalized angular-momentum mode spectrum via
/// psi(phi) proportional to ce_{2n}(phi/2, q): c_0 = sqrt(2) A_0 and
/// c_{+-k} = A_{2k}/sqrt(2). Unit norm on the circle.
ModeSpectrum to_mode_spectrum(const MathieuState& state);

struct CharValue {
    Parity parity = Parity::even;
    int order = 0;
    double value = 0.0;
};

/// Characteristic values interleaved as a_0 < b_2 < a_2 < b_4 < a_4 < ... up
/// to max_order. Strict ordering is asserted for q > 0 (at q = 0 adjacent
/// pairs b_{2n} = a_{2n} are degenerate and the check is waived).
std::vector<CharValue> interlacing_check(double q, int max_order);

struct MathieuFunctionals {
    double var_l = 0.0;
    double dispersion_sq = 0.0;
};

/// Closed-form functionals of an even state from its coefficients:
/// var_l = (a - 2 q Theta)/4 and dispersion_sq = 1 - Theta^2 with
/// Theta = <cos 2eta>. Equals the mode-space report to near machine
/// precision.
MathieuFunctionals mathieu_functionals(const MathieuState& state);

}  // namespace oamu
