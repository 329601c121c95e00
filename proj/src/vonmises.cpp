#include "oamu/vonmises.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace oamu {

namespace {

void check_kappa(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("vonmises: kappa must be finite and >= 0");
    }
}

double wrap_angle(double mu) {
    double m = std::fmod(mu, kTwoPi);
    if (m < 0) m += kTwoPi;
    return m;
}

}  // namespace

ModeSpectrum vm_spectrum(const VonMisesState& state, int m_cut) {
    check_kappa(state.kappa);
    if (m_cut < 1) throw std::invalid_argument("vm_spectrum: m_cut must be >= 1");
    const double x = 0.5 * state.kappa;
    const double mu = wrap_angle(state.mu);

    if (state.kappa == 0.0) {
        return ModeSpectrum::single_mode(0);
    }

    const std::vector<double> r = bessel_i_ratios(x, m_cut);
    double kept = r[0] * r[0];
    for (int m = 1; m <= m_cut; ++m) kept += 2.0 * r[m] * r[m];
    // Total mass in ratio units: sum_m I_m(x)^2 / I_0(x)^2 = I_0(2x)/I_0(x)^2.
    const double total = bessel_i_scaled(0, 2.0 * x) /
                         (bessel_i_scaled(0, x) * bessel_i_scaled(0, x));
    const double tail = 1.0 - kept / total;
    if (!(tail < 1e-12)) {
        std::ostringstream msg;
        msg << "vm_spectrum: m_cut = " << m_cut << " leaves tail mass " << tail
            << " (>= 1e-12) at kappa = " << state.kappa;
        throw std::invalid_argument(msg.str());
    }

    ModeSpectrum spec;
    spec.m_min = -m_cut;
    spec.amplitudes.assign(2 * m_cut + 1, 0.0);
    const double norm = std::sqrt(kept);
    for (int m = -m_cut; m <= m_cut; ++m) {
        const double mag = r[std::abs(m)] / norm;
        if (mu == kPi) {
            // Exact alternating signs; avoids trig noise in the common case.
            spec.amplitudes[m + m_cut] = (m % 2 == 0) ? mag : -mag;
        } else {
            spec.amplitudes[m + m_cut] = std::polar(mag, m * mu);
        }
    }
    return spec;
}

VmMoments vm_moments(const VonMisesState& state) {
    check_kappa(state.kappa);
    VmMoments out;
    if (state.kappa == 0.0) {
        out.dispersion_sq = 1.0;
        out.var_l = 0.0;
        return out;
    }
    const std::vector<double> r = bessel_i_ratios(state.kappa, 2);
    out.dispersion_sq = 1.0 - r[1] * r[1];
    out.var_l = 0.125 * state.kappa * state.kappa * (1.0 - r[2]);
    return out;
}

std::vector<VmCurveRow> vm_product_curve(std::span<const double> kappas) {
    std::vector<double> ks(kappas.begin(), kappas.end());
    std::sort(ks.begin(), ks.end());
    std::vector<VmCurveRow> rows;
    rows.reserve(ks.size());
    double prev_d = 2.0;
    for (double k : ks) {
        const VmMoments m = vm_moments(VonMisesState{k, kPi});
        VmCurveRow row;
        row.kappa = k;
        row.d = std::sqrt(m.dispersion_sq);
        row.dl = std::sqrt(m.var_l);
        row.product = row.d * row.dl;
        if (row.d > prev_d + 1e-14) {
            throw std::logic_error("vm_product_curve: dispersion not monotone in kappa");
        }
        prev_d = row.d;
        rows.push_back(row);
    }
    return rows;
}

double vm_kappa_for_dispersion(double dispersion_sq_target) {
    if (!(dispersion_sq_target > 0.0) || !(dispersion_sq_target <= 1.0)) {
        throw std::invalid_argument("vm_kappa_for_dispersion: target must be in (0, 1]");
    }
    if (dispersion_sq_target == 1.0) return 0.0;
    auto d2 = [](double k) { return vm_moments(VonMisesState{k, kPi}).dispersion_sq; };
    double lo = 0.0, hi = 1.0;
    while (d2(hi) > dispersion_sq_target) {
        lo = hi;
        hi *= 4.0;
        if (hi > 1e12) {
            throw std::runtime_error("vm_kappa_for_dispersion: bracket expansion failed");
        }
    }
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (d2(mid) > dispersion_sq_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

// Overlap of a von Mises spectrum with a fixed real even-state spectrum.
double vm_fidelity(double kappa, const ModeSpectrum& target, int m_cut) {
    const ModeSpectrum vm = vm_spectrum(VonMisesState{kappa, kPi}, m_cut);
    std::complex<double> overlap = 0.0;
    for (int m = vm.m_min; m <= vm.m_max(); ++m) {
        overlap += std::conj(vm.at(m)) * target.at(m);
    }
    return std::norm(overlap);
}

}  // namespace

KappaFit best_fit_kappa(const MathieuState& ground) {
    if (ground.parity != Parity::even || ground.order != 0) {
        throw std::invalid_argument("best_fit_kappa: needs the even ground state (order 0)");
    }
    const ModeSpectrum target = to_mode_spectrum(ground);
    const double q = ground.q;
    const double hi = std::max(4.0 * q, 4.0 * std::sqrt(q)) + 10.0;

    // m_cut covering the widest kappa in the bracket plus the target support.
    int m_cut = std::max(40, target.m_max() + 8);
    while (true) {
        try {
            (void)vm_spectrum(VonMisesState{hi, kPi}, m_cut);
            break;
        } catch (const std::invalid_argument&) {
            m_cut *= 2;
            if (m_cut > (1 << 22)) throw;
        }
    }

    auto f = [&](double k) { return vm_fidelity(k, target, m_cut); };

    // Coarse scan to bracket the maximum.
    const int scan = 64;
    double best_k = 0.0, best_f = -1.0;
    int best_i = 0;
    std::vector<double> ks(scan + 1), fs(scan + 1);
    for (int i = 0; i <= scan; ++i) {
        ks[i] = hi * i / scan;
        fs[i] = f(ks[i]);
        if (fs[i] > best_f) {
            best_f = fs[i];
            best_k = ks[i];
            best_i = i;
        }
    }
    double a = ks[std::max(0, best_i - 1)];
    double b = ks[std::min(scan, best_i + 1)];

    // Golden-section refinement.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-11 * std::max(1.0, b); ++iter) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    const double k_star = 0.5 * (a + b);
    KappaFit fit;
    fit.kappa = k_star;
    fit.fidelity = f(k_star);
    if (fit.fidelity < best_f - 1e-12) {
        // The refined bracket lost against a raw scan sample: the scan was
        // not unimodal around its best point.
        std::ostringstream msg;
        msg << "best_fit_kappa: non-unimodal bracket, probes (" << a << ", " << best_k << ", "
            << b << ") with fidelities (" << f(a) << ", " << best_f << ", " << f(b) << ")";
        throw std::runtime_error(msg.str());
    }
    return fit;
}

}  // namespace oamu
