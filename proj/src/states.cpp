#include "oamu/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oamu {

namespace {

void check_nonempty(const ModeSpectrum& s, const char* who) {
    if (s.amplitudes.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty mode spectrum");
    }
}

void check_normalized(const ModeSpectrum& s, const char* who) {
    check_nonempty(s, who);
    const double n2 = s.norm_sq();
    if (std::fabs(n2 - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << who << ": state not normalized, |c|^2 = " << n2;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

std::complex<double> ModeSpectrum::at(int m) const {
    if (m < m_min || m > m_max()) return 0.0;
    return amplitudes[m - m_min];
}

double ModeSpectrum::norm_sq() const {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return s;
}

ModeSpectrum ModeSpectrum::normalized() const {
    const double n = std::sqrt(norm_sq());
    if (!(n > 0.0)) throw std::invalid_argument("ModeSpectrum: zero norm");
    ModeSpectrum out = *this;
    for (auto& c : out.amplitudes) c /= n;
    return out;
}

ModeSpectrum ModeSpectrum::single_mode(int m) {
    return ModeSpectrum{m, {1.0}};
}

ModeSpectrum apply_shift(const ModeSpectrum& state) {
    check_nonempty(state, "apply_shift");
    ModeSpectrum out = state;
    out.m_min = state.m_min - 1;
    return out;
}

std::complex<double> mean_expiphi(const ModeSpectrum& state) {
    check_nonempty(state, "mean_expiphi");
    std::complex<double> s = 0.0;
    for (int i = 1; i < state.size(); ++i) {
        s += std::conj(state.amplitudes[i - 1]) * state.amplitudes[i];
    }
    return s;
}

std::complex<double> mean_exp2iphi(const ModeSpectrum& state) {
    check_nonempty(state, "mean_exp2iphi");
    std::complex<double> s = 0.0;
    for (int i = 2; i < state.size(); ++i) {
        s += std::conj(state.amplitudes[i - 2]) * state.amplitudes[i];
    }
    return s;
}

double dispersion_sq(const ModeSpectrum& state) {
    const double d2 = 1.0 - std::norm(mean_expiphi(state));
    if (d2 < -1e-12 || d2 > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "dispersion_sq: value " << d2 << " outside [0,1] beyond tolerance";
        throw std::logic_error(msg.str());
    }
    return std::clamp(d2, 0.0, 1.0);
}

LMoments var_l(const ModeSpectrum& state) {
    check_nonempty(state, "var_l");
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < state.size(); ++i) {
        const double w = std::norm(state.amplitudes[i]);
        const double m = state.m_min + i;
        m1 += w * m;
        m2 += w * m * m;
    }
    double var = m2 - m1 * m1;
    if (var < -1e-12) {
        throw std::logic_error("var_l: negative variance beyond tolerance");
    }
    return LMoments{m1, std::max(var, 0.0)};
}

UncertaintyReport report(const ModeSpectrum& state) {
    check_normalized(state, "report");
    UncertaintyReport r;
    r.dispersion_sq = dispersion_sq(state);
    const LMoments lm = var_l(state);
    r.mean_l = lm.mean;
    r.var_l = lm.variance;
    r.product = r.dispersion_sq * r.var_l;
    r.bound = 0.25 * (1.0 - r.dispersion_sq);
    r.gap = r.product - r.bound;
    if (r.gap < -1e-10) {
        std::ostringstream msg;
        msg << "report: uncertainty product " << r.product << " below bound " << r.bound
            << "; this indicates an implementation bug";
        throw std::logic_error(msg.str());
    }
    return r;
}

double theta_from_coeffs(std::span<const double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("theta_from_coeffs: empty coefficients");
    if (coeffs.size() == 1) return 0.0;
    double theta = coeffs[0] * coeffs[1];
    for (std::size_t k = 0; k + 1 < coeffs.size(); ++k) {
        theta += coeffs[k] * coeffs[k + 1];
    }
    return theta;
}

SmallQExpansion smallq_expansion(int n, double q) {
    if (n < 0) throw std::invalid_argument("smallq_expansion: n must be >= 0");
    if (!(q >= 0.0)) throw std::invalid_argument("smallq_expansion: q must be >= 0");
    const double n2 = static_cast<double>(n) * n;
    const double n4 = n2 * n2;
    const double denom = 4.0 * n2 - 1.0;
    SmallQExpansion out;
    out.var_l = n2 + (4.0 * n4 - 3.0 * n2 + 1.0) * q * q / (8.0 * denom * denom);
    out.dispersion_sq = 1.0 - q * q / (4.0 * denom * denom);
    out.product = n2 + 0.25 * (4.0 * n4 - 5.0 * n2 + 1.0) * (1.0 - out.dispersion_sq);
    return out;
}

CosSinReport cosine_sine_reports(const ModeSpectrum& state) {
    check_normalized(state, "cosine_sine_reports");
    const std::complex<double> e1 = mean_expiphi(state);
    const std::complex<double> e2 = mean_exp2iphi(state);
    CosSinReport r;
    r.mean_c = e1.real();
    r.mean_s = e1.imag();
    // <C^2> = (1 + Re<e^{2i phi}>)/2, <S^2> = (1 - Re<e^{2i phi}>)/2.
    r.var_c = 0.5 * (1.0 + e2.real()) - r.mean_c * r.mean_c;
    r.var_s = 0.5 * (1.0 - e2.real()) - r.mean_s * r.mean_s;
    return r;
}

}  // namespace oamu
