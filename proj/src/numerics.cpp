#include "oamu/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oamu {

namespace {

void check_grid_count(int count) {
    if (count < 8 || count % 2 != 0) {
        std::ostringstream msg;
        msg << "PeriodicGrid: count must be even and >= 8, got " << count;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

PeriodicGrid::PeriodicGrid(int count_, std::vector<std::complex<double>> values_)
    : count(count_), values(std::move(values_)) {
    check_grid_count(count);
    if (static_cast<int>(values.size()) != count) {
        throw std::invalid_argument("PeriodicGrid: values size does not match count");
    }
}

PeriodicGrid PeriodicGrid::sample(int count,
                                  const std::function<std::complex<double>(double)>& f) {
    check_grid_count(count);
    std::vector<std::complex<double>> v(count);
    const double h = kTwoPi / count;
    for (int i = 0; i < count; ++i) v[i] = f(h * i);
    return PeriodicGrid(count, std::move(v));
}

std::complex<double> trapezoid_integral(const PeriodicGrid& grid) {
    check_grid_count(grid.count);
    std::complex<double> sum = 0.0;
    for (const auto& v : grid.values) sum += v;
    return sum * grid.spacing();
}

std::complex<double> adaptive_trapezoid(const std::function<std::complex<double>(double)>& f,
                                        int initial_count) {
    check_grid_count(initial_count);
    std::complex<double> prev = trapezoid_integral(PeriodicGrid::sample(initial_count, f));
    for (int count = 2 * initial_count; count <= (1 << 24); count *= 2) {
        const std::complex<double> next = trapezoid_integral(PeriodicGrid::sample(count, f));
        if (std::abs(next - prev) <= 1e-12 * (1.0 + std::abs(next))) return next;
        prev = next;
    }
    throw std::runtime_error("adaptive_trapezoid: no convergence to 1e-12");
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal eigensolver
// ---------------------------------------------------------------------------

int sturm_count(const SymTridiag& m, double x) {
    const int n = m.size();
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
        const double e2 = (i > 0) ? m.offdiag[i - 1] * m.offdiag[i - 1] : 0.0;
        d = (m.diag[i] - x) - e2 / d;
        if (d == 0.0) d = -std::numeric_limits<double>::min();
        if (d < 0.0) ++count;
    }
    return count;
}

namespace {

double matrix_inf_norm(const SymTridiag& m) {
    const int n = m.size();
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = std::fabs(m.diag[i]);
        if (i > 0) row += std::fabs(m.offdiag[i - 1]);
        if (i + 1 < n) row += std::fabs(m.offdiag[i]);
        norm = std::max(norm, row);
    }
    return norm;
}

// Solve (T - sigma I) x = b in place with partial pivoting; du2 is the
// second superdiagonal fill-in. Extended precision keeps the eigenvector's
// small tail components relative-accurate, which the collocation residual
// needs once the matrix norm is large.
void shifted_tridiag_solve(const SymTridiag& m, long double sigma, long double pivot_floor,
                           std::vector<long double>& x) {
    const int n = m.size();
    std::vector<long double> dl(n, 0.0L), d(n, 0.0L), du(n, 0.0L), du2(n, 0.0L);
    for (int i = 0; i < n; ++i) {
        d[i] = m.diag[i] - sigma;
        if (i + 1 < n) {
            dl[i] = m.offdiag[i];
            du[i] = m.offdiag[i];
        }
    }
    for (int i = 0; i < n - 1; ++i) {
        if (std::fabs(d[i]) >= std::fabs(dl[i])) {
            long double piv = d[i];
            if (std::fabs(piv) < pivot_floor) piv = (piv >= 0 ? pivot_floor : -pivot_floor);
            const long double f = dl[i] / piv;
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
            dl[i] = 0.0L;
            d[i] = piv;
        } else {
            // Swap rows i and i+1.
            long double piv = dl[i];
            if (std::fabs(piv) < pivot_floor) piv = (piv >= 0 ? pivot_floor : -pivot_floor);
            const long double f = d[i] / piv;
            d[i] = piv;
            const long double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du2[i] = (i + 2 < n) ? du[i + 1] : 0.0L;
            du[i] = tmp;
            if (i + 2 < n) du[i + 1] = -f * du2[i];
            std::swap(x[i], x[i + 1]);
            x[i + 1] -= f * x[i];
        }
    }
    if (std::fabs(d[n - 1]) < pivot_floor) {
        d[n - 1] = (d[n - 1] >= 0 ? pivot_floor : -pivot_floor);
    }
    x[n - 1] /= d[n - 1];
    if (n >= 2) {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for (int i = n - 3; i >= 0; --i) {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
}

void apply_tridiag(const SymTridiag& m, const std::vector<long double>& v,
                   std::vector<long double>& out) {
    const int n = m.size();
    for (int i = 0; i < n; ++i) {
        long double s = m.diag[i] * v[i];
        if (i > 0) s += m.offdiag[i - 1] * v[i - 1];
        if (i + 1 < n) s += m.offdiag[i] * v[i + 1];
        out[i] = s;
    }
}

std::uint64_t splitmix64_step(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

EigenPair eigen_lowest(const SymTridiag& m, int index, double tol) {
    const int n = m.size();
    if (n < 1 || static_cast<int>(m.offdiag.size()) != n - 1) {
        throw std::invalid_argument("eigen_lowest: inconsistent matrix sizes");
    }
    if (index < 0 || index >= n) {
        throw std::invalid_argument("eigen_lowest: index out of range");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("eigen_lowest: tol must be positive");
    }
    for (double v : m.diag)
        if (!std::isfinite(v)) throw std::invalid_argument("eigen_lowest: non-finite entry");
    for (double v : m.offdiag)
        if (!std::isfinite(v)) throw std::invalid_argument("eigen_lowest: non-finite entry");

    // Gershgorin bracket.
    double lo = m.diag[0], hi = m.diag[0];
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::fabs(m.offdiag[i - 1]);
        if (i + 1 < n) r += std::fabs(m.offdiag[i]);
        lo = std::min(lo, m.diag[i] - r);
        hi = std::max(hi, m.diag[i] + r);
    }
    const double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
    lo -= 1e-12 * scale;
    hi += 1e-12 * scale;

    // Bisection on the Sturm count: count(x) >= index+1  <=>  x > lambda_index.
    for (int iter = 0; iter < 210 && (hi - lo) > 2.0 * std::numeric_limits<double>::epsilon() * scale;
         ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(m, mid) >= index + 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double lambda = 0.5 * (lo + hi);

    if (n == 1) {
        return EigenPair{m.diag[0], {1.0}};
    }

    // Inverse iteration in extended precision with a deterministic
    // pseudo-random start vector.
    const double mnorm = std::max(matrix_inf_norm(m), std::numeric_limits<double>::min());
    const long double pivot_floor = 1e3L * std::numeric_limits<double>::epsilon() * mnorm;
    std::uint64_t s = 0x6f79616d75756f61ull;
    std::vector<long double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = (splitmix64_step(s) >> 11) * 0x1.0p-53 - 0.5;
    }
    std::vector<long double> mv(n);
    double refined = lambda;
    double resid = std::numeric_limits<double>::infinity();
    // Slight shift off the eigenvalue keeps the solve well conditioned.
    const long double sigma =
        static_cast<long double>(lambda) + 8.0L * std::numeric_limits<double>::epsilon() * scale;
    for (int iter = 0; iter < 10; ++iter) {
        shifted_tridiag_solve(m, sigma, pivot_floor, v);
        long double nrm = 0.0L;
        for (long double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0L) || !std::isfinite(static_cast<double>(nrm))) {
            // Restart from a fresh vector.
            for (int i = 0; i < n; ++i) v[i] = (splitmix64_step(s) >> 11) * 0x1.0p-53 - 0.5;
            continue;
        }
        for (long double& x : v) x /= nrm;
        // Rayleigh quotient: the bisection value only carries eps * ||M||
        // absolute accuracy, too coarse once the matrix norm is large.
        apply_tridiag(m, v, mv);
        long double num = 0.0L;
        for (int i = 0; i < n; ++i) num += mv[i] * v[i];
        refined = static_cast<double>(num);
        long double r2 = 0.0L;
        for (int i = 0; i < n; ++i) {
            const long double r = mv[i] - num * v[i];
            r2 += r * r;
        }
        resid = static_cast<double>(std::sqrt(r2));
        // At least three passes: the first still carries contamination from
        // the far end of the spectrum at the 1e-15 level, well inside the
        // residual tolerance but fatal for the small coefficient tail.
        if (iter >= 2 && resid <= tol * mnorm) break;
    }
    if (!(resid <= tol * mnorm)) {
        std::ostringstream msg;
        msg << "eigen_lowest: inverse iteration did not converge, residual " << resid
            << " vs tolerance " << tol * mnorm;
        throw std::runtime_error(msg.str());
    }

    // Sign convention: first non-negligible entry positive.
    long double vmax = 0.0L;
    for (long double x : v) vmax = std::max(vmax, std::fabs(x));
    std::vector<double> out(n);
    bool flip = false;
    for (long double x : v) {
        if (std::fabs(x) > 1e-11L * vmax) {
            flip = x < 0.0L;
            break;
        }
    }
    for (int i = 0; i < n; ++i) out[i] = static_cast<double>(flip ? -v[i] : v[i]);
    return EigenPair{refined, std::move(out)};
}

// ---------------------------------------------------------------------------
// Modified Bessel functions
// ---------------------------------------------------------------------------

namespace {

constexpr double kBesselSeriesCut = 15.0;
constexpr int kBesselMaxOrder = 128;

// Power series I_n(x) = sum_j (x/2)^{n+2j} / (j! (n+j)!).
double bessel_series(int n, double x) {
    const double half = 0.5 * x;
    double log_t0 = n * std::log(half) - std::lgamma(n + 1.0);
    if (n == 0) log_t0 = 0.0;  // avoid log(0)*0 at x = 0
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (log_t0 < -745.0) return 0.0;  // underflows doubles entirely
    double term = std::exp(log_t0);
    double sum = term;
    const double q = half * half;
    for (int j = 1; j <= 200; ++j) {
        term *= q / (static_cast<double>(j) * (n + j));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// Miller downward recurrence: fills f[k] proportional to I_k(x) for
// k = 0..m_max and returns sum_norm = f0 + 2*sum_{k>=1} f_k (= e^x times the
// common scale).
void bessel_miller(double x, int m_max, std::vector<double>& f, double& sum_norm) {
    const int start = static_cast<int>(std::ceil(std::max<double>(m_max, x))) +
                      static_cast<int>(std::ceil(10.0 * std::sqrt(std::max(x, 4.0)))) + 20;
    f.assign(m_max + 1, 0.0);
    double fp1 = 0.0;       // f_{k+1}
    double fk = 1e-130;     // f_k at k = start
    double sum = 0.0;       // accumulates 2*f_k for k >= 1
    for (int k = start; k >= 1; --k) {
        const double fm1 = fp1 + (2.0 * k / x) * fk;
        if (k - 1 <= m_max) f[k - 1] = fm1;
        if (k <= m_max) f[k] = fk;
        sum += 2.0 * fk;
        fp1 = fk;
        fk = fm1;
        if (std::fabs(fk) > 1e250) {
            const double r = 1e-250;
            fk *= r;
            fp1 *= r;
            sum *= r;
            for (double& y : f) y *= r;
        }
    }
    sum_norm = sum + fk;  // fk now holds f_0
    // f[0] was written in the loop when k-1 == 0; keep the final value.
    f[0] = fk;
}

}  // namespace

double bessel_i_scaled(int order, double x) {
    if (order < 0 || order > kBesselMaxOrder) {
        throw std::domain_error("bessel_i: order must be in [0, 128]");
    }
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::domain_error("bessel_i: x must be finite and >= 0");
    }
    if (x <= kBesselSeriesCut) {
        return bessel_series(order, x) * std::exp(-x);
    }
    std::vector<double> f;
    double norm = 0.0;
    bessel_miller(x, order, f, norm);
    return f[order] / norm;
}

double bessel_i(int order, double x) {
    if (order < 0 || order > kBesselMaxOrder) {
        throw std::domain_error("bessel_i: order must be in [0, 128]");
    }
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::domain_error("bessel_i: x must be finite and >= 0");
    }
    if (x <= kBesselSeriesCut) {
        return bessel_series(order, x);
    }
    if (x > 709.0) {
        throw std::domain_error("bessel_i: overflow range (x > 709), use bessel_i_scaled");
    }
    return bessel_i_scaled(order, x) * std::exp(x);
}

std::vector<double> bessel_i_ratios(double x, int m_max) {
    if (m_max < 0) throw std::invalid_argument("bessel_i_ratios: m_max must be >= 0");
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::domain_error("bessel_i_ratios: x must be finite and >= 0");
    }
    std::vector<double> r(m_max + 1, 0.0);
    if (x == 0.0) {
        r[0] = 1.0;
        return r;
    }
    if (x <= kBesselSeriesCut && m_max <= kBesselMaxOrder) {
        const double i0 = bessel_series(0, x);
        for (int k = 0; k <= m_max; ++k) r[k] = bessel_series(k, x) / i0;
        return r;
    }
    std::vector<double> f;
    double norm = 0.0;
    bessel_miller(x, m_max, f, norm);
    for (int k = 0; k <= m_max; ++k) r[k] = f[k] / f[0];
    return r;
}

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

namespace {
inline std::uint64_t rotl64(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64_step(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return (next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

long long Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        // Inversion by multiplication.
        const double limit = std::exp(-mean);
        long long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }
    // PTRD (Hormann's transformed rejection with decomposition).
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * std::log(mean) - mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<long long>(kf);
    }
}

}  // namespace oamu
