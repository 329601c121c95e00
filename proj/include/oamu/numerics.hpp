#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oamu {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform samples of a function on [0, 2*pi). The spacing is exactly
/// 2*pi/count; count must be even and at least 8.
struct PeriodicGrid {
    int count = 0;
    std::vector<std::complex<double>> values;

    PeriodicGrid(int count, std::vector<std::complex<double>> values);
    static PeriodicGrid sample(int count,
                               const std::function<std::complex<double>(double)>& f);
    double spacing() const { return kTwoPi / count; }
};

/// spacing * sum of the samples. For smooth periodic integrands the uniform
/// trapezoid rule converges spectrally, so this is the workhorse quadrature
/// for all angular expectation values.
std::complex<double> trapezoid_integral(const PeriodicGrid& grid);

/// Trapezoid integral of f over [0, 2*pi), starting from 512 samples and
/// doubling until two successive results agree within 1e-12 (absolute, plus
/// 1e-12 relative for large values).
std::complex<double> adaptive_trapezoid(const std::function<std::complex<double>(double)>& f,
                                        int initial_count = 512);

/// Symmetric tridiagonal matrix: diag has size K, offdiag size K-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag;
    int size() const { return static_cast<int>(diag.size()); }
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

/// Number of eigenvalues of m strictly below x (Sturm count via the
/// LDL^T pivot recurrence).
int sturm_count(const SymTridiag& m, double x);

/// index-th smallest eigenvalue (0-based) and its unit-norm eigenvector.
/// Bisection on the Sturm count locates the value; inverse iteration with a
/// partially pivoted tridiagonal solve produces the vector. The first entry
/// of the vector whose magnitude is not negligible is made positive, and the
/// residual ||M v - lambda v||_2 <= tol * ||M||_inf is enforced.
EigenPair eigen_lowest(const SymTridiag& m, int index, double tol = 1e-12);

/// Modified Bessel function of the first kind I_n(x) for integer n >= 0,
/// x >= 0. Power series for small arguments, Miller downward recurrence with
/// sum normalization otherwise. Throws std::domain_error where e^x overflows.
double bessel_i(int order, double x);

/// exp(-x) * I_n(x); finite for every x >= 0.
double bessel_i_scaled(int order, double x);

/// Ratios I_m(x)/I_0(x) for m = 0..m_max. Overflow-free for any x >= 0.
std::vector<double> bessel_i_ratios(double x, int m_max);

/// Deterministic pseudo-random stream. Generator: xoshiro256++ with the
/// 256-bit state filled from the seed by splitmix64, so equal seeds give
/// identical streams on any platform with IEEE doubles. normal() is the
/// Marsaglia polar transform; poisson() uses inversion by multiplication for
/// small means and Hormann's PTRD transformed-rejection sampler for large
/// ones.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform double in [0, 1).
    double uniform();
    /// Standard normal deviate.
    double normal();
    /// Poisson deviate with the given nonnegative mean.
    long long poisson(double mean);

  private:
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace oamu
