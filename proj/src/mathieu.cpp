#include "oamu/mathieu.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oamu {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kTailThreshold = 1e-14;
constexpr double kResidualThreshold = 1e-8;
constexpr int kMaxTruncation = 1 << 16;

void check_q(double q) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("mathieu: q must be finite and >= 0");
    }
}

void check_K(int K) {
    if (K < 8) throw std::invalid_argument("mathieu: truncation K must be >= 8");
}

}  // namespace

SymTridiag build_even_matrix(double q, int K) {
    check_q(q);
    check_K(K);
    SymTridiag m;
    m.diag.resize(K);
    m.offdiag.resize(K - 1);
    for (int k = 0; k < K; ++k) m.diag[k] = 4.0 * k * k;
    m.offdiag[0] = kSqrt2 * q;
    for (int k = 1; k < K - 1; ++k) m.offdiag[k] = q;
    return m;
}

SymTridiag build_odd_matrix(double q, int K) {
    check_q(q);
    check_K(K);
    SymTridiag m;
    m.diag.resize(K);
    m.offdiag.resize(K - 1);
    for (int k = 0; k < K; ++k) {
        const double kk = k + 1.0;
        m.diag[k] = 4.0 * kk * kk;
    }
    for (int k = 0; k < K - 1; ++k) m.offdiag[k] = q;
    return m;
}

MathieuState solve(int order, double q, Parity parity, double tol) {
    check_q(q);
    if (order < 0 || order % 2 != 0) {
        throw std::invalid_argument("mathieu::solve: order must be even and >= 0");
    }
    if (parity == Parity::odd && order == 0) {
        throw std::invalid_argument("mathieu::solve: the odd family starts at order 2");
    }
    const int index = (parity == Parity::even) ? order / 2 : order / 2 - 1;

    double achieved_tail = 0.0;
    double achieved_residual = 0.0;
    for (int K = 32; K <= kMaxTruncation; K *= 2) {
        if (index + 8 > K) continue;
        const SymTridiag m =
            (parity == Parity::even) ? build_even_matrix(q, K) : build_odd_matrix(q, K);
        EigenPair pair = eigen_lowest(m, index, tol);

        MathieuState state;
        state.order = order;
        state.q = q;
        state.parity = parity;
        state.charvalue = pair.value;
        state.coeffs = std::move(pair.vector);
        if (parity == Parity::even) {
            state.coeffs[0] /= kSqrt2;  // undo the symmetrizing rescale
        }
        // Sign convention is inherited from the eigenvector (first
        // non-negligible coefficient positive); for q > 0 this makes A_0 > 0
        // for ce and B_2 > 0 for se.

        achieved_tail = std::fabs(state.coeffs.back());
        if (achieved_tail >= kTailThreshold) continue;

        // Drop the trailing noise floor of the inverse iteration: those
        // entries are below any genuine coefficient and their 4k^2 weight in
        // psi'' would otherwise dominate the residual at large K.
        int keep = state.truncation();
        while (keep > std::max(index + 2, 4) && std::fabs(state.coeffs[keep - 1]) < 1e-15) {
            --keep;
        }
        if (keep < state.truncation() && std::fabs(state.coeffs[keep - 1]) >= kTailThreshold) {
            ++keep;  // keep one sub-threshold entry so the stored tail obeys the bound
        }
        state.coeffs.resize(keep);
        achieved_residual = collocation_residual(state);
        if (achieved_residual >= kResidualThreshold) continue;
        return state;
    }
    std::ostringstream msg;
    msg << "mathieu::solve: no convergence up to K = " << kMaxTruncation << " (tail "
        << achieved_tail << ", residual " << achieved_residual << ")";
    throw std::runtime_error(msg.str());
}

double evaluate(const MathieuState& state, double eta) {
    double y = 0.0;
    const int K = state.truncation();
    if (state.parity == Parity::even) {
        for (int k = 0; k < K; ++k) y += state.coeffs[k] * std::cos(2.0 * k * eta);
    } else {
        for (int k = 0; k < K; ++k) y += state.coeffs[k] * std::sin(2.0 * (k + 1) * eta);
    }
    return y;
}

double collocation_residual(const MathieuState& state, int points) {
    if (points < 2 || points % 2 != 0) {
        throw std::invalid_argument("collocation_residual: points must be even and >= 2");
    }
    const int K = state.truncation();
    // eta_i = pi i / points, so every harmonic cos(2 k eta_i) = cos(pi j / points)
    // with j = 2 k i mod 2*points; sines shift the index by a quarter period.
    const long long period = 2LL * points;
    std::vector<double> cos_table(period);
    for (long long j = 0; j < period; ++j) cos_table[j] = std::cos(kPi * j / points);
    const long long quarter = points / 2;
    // Extended-precision accumulation: the charvalue and 4k^2 terms reach 1e8
    // at the largest usable q, and the residual survives their cancellation.
    long double max_res = 0.0L;
    long double max_psi = 0.0L;
    for (long long i = 0; i < points; ++i) {
        long double y = 0.0L, ypp = 0.0L;
        if (state.parity == Parity::even) {
            for (int k = 0; k < K; ++k) {
                const long double c = cos_table[(2 * k * i) % period];
                y += state.coeffs[k] * c;
                ypp -= 4.0L * k * k * state.coeffs[k] * c;
            }
        } else {
            for (int k = 0; k < K; ++k) {
                const long long kk = k + 1;
                const long double s = cos_table[(2 * kk * i + period - quarter) % period];
                y += state.coeffs[k] * s;
                ypp -= 4.0L * kk * kk * state.coeffs[k] * s;
            }
        }
        const long double res =
            ypp + (static_cast<long double>(state.charvalue) -
                   2.0L * state.q * cos_table[(2 * i) % period]) *
                      y;
        max_res = std::max(max_res, std::fabs(res));
        max_psi = std::max(max_psi, std::fabs(y));
    }
    return static_cast<double>(max_res / std::max(max_psi, 1e-300L));
}

ModeSpectrum to_mode_spectrum(const MathieuState& state) {
    if (state.parity != Parity::even) {
        throw std::logic_error("to_mode_spectrum: odd family not implemented");
    }
    const int K = state.truncation();
    ModeSpectrum spec;
    spec.m_min = -(K - 1);
    spec.amplitudes.assign(2 * K - 1, 0.0);
    spec.amplitudes[K - 1] = kSqrt2 * state.coeffs[0];
    for (int k = 1; k < K; ++k) {
        const double c = state.coeffs[k] / kSqrt2;
        spec.amplitudes[K - 1 + k] = c;
        spec.amplitudes[K - 1 - k] = c;
    }
    // The coefficient normalization makes this exactly unit norm; renormalize
    // to absorb rounding.
    return spec.normalized();
}

std::vector<CharValue> interlacing_check(double q, int max_order) {
    check_q(q);
    if (max_order < 0) throw std::invalid_argument("interlacing_check: max_order must be >= 0");
    std::vector<CharValue> chain;
    for (int order = 0; order <= max_order; order += 2) {
        if (order >= 2) {
            chain.push_back({Parity::odd, order, solve(order, q, Parity::odd).charvalue});
        }
        chain.push_back({Parity::even, order, solve(order, q, Parity::even).charvalue});
    }
    if (q > 0.0) {
        for (std::size_t i = 1; i < chain.size(); ++i) {
            if (!(chain[i - 1].value < chain[i].value)) {
                std::ostringstream msg;
                msg << "interlacing_check: ordering violated at position " << i << " ("
                    << chain[i - 1].value << " !< " << chain[i].value << ")";
                throw std::logic_error(msg.str());
            }
        }
    }
    return chain;
}

MathieuFunctionals mathieu_functionals(const MathieuState& state) {
    if (state.parity != Parity::even) {
        throw std::invalid_argument("mathieu_functionals: even family only");
    }
    const double theta = theta_from_coeffs(state.coeffs);
    MathieuFunctionals f;
    f.var_l = 0.25 * (state.charvalue - 2.0 * state.q * theta);
    f.dispersion_sq = 1.0 - theta * theta;
    return f;
}

}  // namespace oamu
