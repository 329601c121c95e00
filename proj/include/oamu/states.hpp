#pragma once

#include <complex>
#include <span>
#include <vector>

namespace oamu {

/// Normalized state over integer angular-momentum modes with finite support
/// [m_min, m_min + amplitudes.size() - 1].
struct ModeSpectrum {
    int m_min = 0;
    std::vector<std::complex<double>> amplitudes;

    int m_max() const { return m_min + static_cast<int>(amplitudes.size()) - 1; }
    int size() const { return static_cast<int>(amplitudes.size()); }

    /// Amplitude c_m; zero outside the support.
    std::complex<double> at(int m) const;

    double norm_sq() const;
    ModeSpectrum normalized() const;

    static ModeSpectrum single_mode(int m);
};

/// Re-indexes c_m -> c_{m+1} at position m: every mode is lowered by one
/// (the unitary shift that removes one unit of angular momentum).
ModeSpectrum apply_shift(const ModeSpectrum& state);

/// <e^{i phi}> = sum_m conj(c_{m-1}) c_m.
std::complex<double> mean_expiphi(const ModeSpectrum& state);

/// <e^{2 i phi}> = sum_m conj(c_{m-2}) c_m.
std::complex<double> mean_exp2iphi(const ModeSpectrum& state);

/// Dispersion D^2 = 1 - |<e^{i phi}>|^2, clamped to [0, 1].
double dispersion_sq(const ModeSpectrum& state);

struct LMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Angular momentum is diagonal in mode space: mean = sum |c_m|^2 m,
/// variance = sum |c_m|^2 m^2 - mean^2 (clamped to >= 0).
LMoments var_l(const ModeSpectrum& state);

struct UncertaintyReport {
    double dispersion_sq = 0.0;  // D^2
    double var_l = 0.0;          // (dL)^2
    double mean_l = 0.0;
    double product = 0.0;        // D^2 (dL)^2
    double bound = 0.0;          // (1 - D^2)/4
    double gap = 0.0;            // product - bound
};

/// Full uncertainty bookkeeping for a normalized state. The product can
/// never fall below the bound; a gap below -1e-10 is an internal error.
UncertaintyReport report(const ModeSpectrum& state);

/// Theta = A0 A2 + sum_{k>=0} A_{2k} A_{2k+2}: the mode-space <cos phi> of an
/// even Mathieu state under the internal normalization 2 A0^2 + sum A^2 = 1.
/// The k = 0 term enters twice by construction.
double theta_from_coeffs(std::span<const double> coeffs);

struct SmallQExpansion {
    double var_l = 0.0;
    double dispersion_sq = 0.0;
    double product = 0.0;
};

/// Quadratic small-q reference model for the even branch of order 2n:
///   var_l    = (2n)^2/4 + (4n^4 - 3n^2 + 1) q^2 / (8 (4n^2-1)^2)
///   disp^2   = 1 - q^2 / (4 (4n^2-1)^2)
///   product  = n^2 + (4n^4 - 5n^2 + 1)(1 - disp^2)/4
/// Reference values only; the exact functionals supersede them.
SmallQExpansion smallq_expansion(int n, double q);

struct CosSinReport {
    double var_c = 0.0;
    double var_s = 0.0;
    double mean_c = 0.0;
    double mean_s = 0.0;
};

/// Cosine/sine operator statistics. C = (E + E^dag)/2 and S = (E - E^dag)/2i
/// satisfy C^2 + S^2 = 1, so var_c + var_s = D^2 identically.
CosSinReport cosine_sine_reports(const ModeSpectrum& state);

}  // namespace oamu
