#include "oamu/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "oamu/numerics.hpp"

namespace oamu {

namespace {

MathieuFunctionals ground_functionals(double q) {
    return mathieu_functionals(solve(0, q, Parity::even));
}

// Bracketed bisection on q >= 0 for a monotone scalar functional. increasing
// states the expected direction; samples collected while expanding the
// bracket are checked against it.
double solve_monotone_q(double target, bool increasing,
                        const std::function<double(double)>& functional, const char* label) {
    const double f0 = functional(0.0);
    if (target == f0) return 0.0;
    const bool above = target > f0;
    if (above != increasing) {
        std::ostringstream msg;
        msg << label << ": target " << target << " is outside the attainable range (value at q=0 is "
            << f0 << ")";
        throw InfeasibleTargetError(msg.str());
    }
    double lo = 0.0, f_lo = f0;
    double hi = 1.0;
    double f_hi = functional(hi);
    for (int i = 0; i < 80; ++i) {
        const bool mono_ok = increasing ? (f_hi > f_lo - 1e-13) : (f_hi < f_lo + 1e-13);
        if (!mono_ok) {
            std::ostringstream msg;
            msg << label << ": functional not monotone between q = " << lo << " and " << hi;
            throw std::logic_error(msg.str());
        }
        if (increasing ? (f_hi >= target) : (f_hi <= target)) break;
        lo = hi;
        f_lo = f_hi;
        hi *= 4.0;
        if (hi > 1e9) {
            std::ostringstream msg;
            msg << label << ": target " << target << " not bracketed on q in [0, 1e9], last value "
                << f_hi;
            throw InfeasibleTargetError(msg.str());
        }
        f_hi = functional(hi);
    }
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = functional(mid);
        if ((increasing ? fm < target : fm > target)) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double q_for_dispersion(double dispersion_sq_target) {
    if (!(dispersion_sq_target > 0.0) || !(dispersion_sq_target <= 1.0)) {
        std::ostringstream msg;
        msg << "q_for_dispersion: target " << dispersion_sq_target
            << " outside the attainable range (0, 1]";
        throw InfeasibleTargetError(msg.str());
    }
    return solve_monotone_q(
        dispersion_sq_target, false, [](double q) { return ground_functionals(q).dispersion_sq; },
        "q_for_dispersion");
}

double q_for_var_l(double var_l_target) {
    if (!(var_l_target >= 0.0)) {
        std::ostringstream msg;
        msg << "q_for_var_l: target " << var_l_target << " outside the attainable range [0, inf)";
        throw InfeasibleTargetError(msg.str());
    }
    return solve_monotone_q(
        var_l_target, true, [](double q) { return ground_functionals(q).var_l; }, "q_for_var_l");
}

ModeSpectrum shift_mean(const ModeSpectrum& state, int mbar) {
    ModeSpectrum out = state;
    out.m_min = state.m_min + mbar;
    return out;
}

MinStateResult min_state(const ConstraintTarget& target, int mean_m) {
    double q = 0.0;
    switch (target.kind) {
        case ConstraintTarget::Kind::fixed_dispersion:
            q = q_for_dispersion(target.value);
            break;
        case ConstraintTarget::Kind::fixed_var_l:
            q = q_for_var_l(target.value);
            break;
    }
    MinStateResult out;
    out.q = q;
    out.state = shift_mean(to_mode_spectrum(solve(0, q, Parity::even)), mean_m);
    out.report = report(out.state);
    return out;
}

std::optional<ModeSpectrum> project_to_theta(const ModeSpectrum& state, double theta_target,
                                             double t_lo) {
    const auto mixed = [&](double t) -> std::optional<ModeSpectrum> {
        ModeSpectrum m = state;
        for (auto& c : m.amplitudes) c *= (1.0 - t);
        const int i0 = -m.m_min;
        if (i0 < 0 || i0 >= m.size()) return std::nullopt;  // support must contain m = 0
        m.amplitudes[i0] += t;
        const double n2 = m.norm_sq();
        if (n2 < 1e-12) return std::nullopt;
        for (auto& c : m.amplitudes) c /= std::sqrt(n2);
        return m;
    };
    const auto g = [&](double t) -> std::optional<double> {
        const auto m = mixed(t);
        if (!m) return std::nullopt;
        return mean_expiphi(*m).real() - theta_target;
    };

    const auto g_lo = g(t_lo);
    const auto g_hi = g(1.0);
    if (!g_lo || !g_hi) return std::nullopt;
    double lo = t_lo, hi = 1.0;
    double f_lo = *g_lo;
    if (f_lo == 0.0) return mixed(lo);
    if (*g_hi == 0.0) return mixed(hi);
    if ((f_lo > 0.0) == (*g_hi > 0.0)) return std::nullopt;
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-16; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const auto fm = g(mid);
        if (!fm) return std::nullopt;
        if ((*fm > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = *fm;
        } else {
            hi = mid;
        }
    }
    return mixed(0.5 * (lo + hi));
}

AuditResult variational_audit(double q, int trials, std::uint64_t seed) {
    if (!(q > 0.0)) throw std::invalid_argument("variational_audit: q must be > 0");
    if (trials < 0) throw std::invalid_argument("variational_audit: trials must be >= 0");

    const MathieuState ground = solve(0, q, Parity::even);
    const ModeSpectrum gspec = to_mode_spectrum(ground);
    const double theta_target = mean_expiphi(gspec).real();

    AuditResult out;
    out.mathieu_product = report(gspec).product;
    out.min_trial_product = std::numeric_limits<double>::infinity();

    constexpr int kSupport = 20;
    for (int t = 0; t < trials; ++t) {
        Rng rng(seed ^ static_cast<std::uint64_t>(t));
        // Symmetrized complex trial: c_{-m} = c_m, so <L> = 0 and
        // <e^{i phi}> is real. Half the trials ride on a concentrated
        // alternating-sign envelope so that large-|<cos phi>| constraints
        // stay reachable; the other half are white Gaussian amplitudes.
        ModeSpectrum trial;
        trial.m_min = -kSupport;
        trial.amplitudes.assign(2 * kSupport + 1, 0.0);
        const bool coherent = rng.uniform() < 0.5;
        const double alpha = 0.05 + 1.45 * rng.uniform();
        const double noise = 0.05 + 0.95 * rng.uniform();
        for (int m = 0; m <= kSupport; ++m) {
            std::complex<double> c(rng.normal(), rng.normal());
            if (coherent) {
                const double envelope = (m % 2 == 0 ? 1.0 : -1.0) * std::exp(-alpha * m);
                c = envelope * (1.0 + noise * c);
            }
            trial.amplitudes[kSupport + m] = c;
            trial.amplitudes[kSupport - m] = c;
        }
        trial = trial.normalized();
        if (mean_expiphi(trial).real() > 0.0) {
            // Relabel phi -> phi + pi to flip the sign of <cos phi>.
            for (int m = -kSupport; m <= kSupport; ++m) {
                if (m % 2 != 0) trial.amplitudes[kSupport + m] = -trial.amplitudes[kSupport + m];
            }
        }
        const auto projected = project_to_theta(trial, theta_target);
        if (!projected) {
            ++out.discarded;
            continue;
        }
        ++out.evaluated;
        out.min_trial_product = std::min(out.min_trial_product, report(*projected).product);
    }
    return out;
}

}  // namespace oamu
