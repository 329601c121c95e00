#pragma once

#include <span>
#include <vector>

#include "oamu/mathieu.hpp"
#include "oamu/numerics.hpp"
#include "oamu/states.hpp"

namespace oamu {

/// Comparison state whose angular density is the von Mises distribution
/// exp(kappa cos(phi - mu)) / (2 pi I_0(kappa)). The wavefunction carries
/// half the exponent, psi ~ exp((kappa/2) cos(phi - mu)), so |psi|^2 is
/// exactly that density. Default mu = pi puts the peak where the even
/// Mathieu ground state peaks for q > 0.
struct VonMisesState {
    double kappa = 0.0;
    double mu = kPi;
};

/// Mode spectrum c_m = I_m(kappa/2) e^{i m mu} / sqrt(I_0(kappa)), truncated
/// at |m| <= m_cut and renormalized. Throws if the dropped tail mass is not
/// below 1e-12 (the mass identity sum_m I_m(x)^2 = I_0(2x) gives the total).
ModeSpectrum vm_spectrum(const VonMisesState& state, int m_cut);

struct VmMoments {
    double dispersion_sq = 0.0;
    double var_l = 0.0;
};

/// Closed forms via Bessel ratios:
///   D^2  = 1 - (I_1(kappa)/I_0(kappa))^2
///   var  = (kappa^2/8) (1 - I_2(kappa)/I_0(kappa)).
VmMoments vm_moments(const VonMisesState& state);

struct VmCurveRow {
    double kappa = 0.0;
    double d = 0.0;
    double dl = 0.0;
    double product = 0.0;  // d * dl
};

/// One row per concentration, sorted by dispersion descending.
std::vector<VmCurveRow> vm_product_curve(std::span<const double> kappas);

/// Concentration whose von Mises dispersion D^2 equals the target
/// (monotone in kappa; bracketed bisection).
double vm_kappa_for_dispersion(double dispersion_sq_target);

struct KappaFit {
    double kappa = 0.0;
    double fidelity = 0.0;
};

/// Concentration maximizing the overlap |<psi_vm(kappa)|psi_mathieu>|^2 with
/// the even Mathieu ground state (order 0). Coarse scan to bracket the peak,
/// then golden-section refinement.
KappaFit best_fit_kappa(const MathieuState& ground);

}  // namespace oamu
