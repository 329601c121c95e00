#include "oamu/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oamu/numerics.hpp"
#include "oamu/optimizer.hpp"
#include "oamu/vonmises.hpp"

namespace oamu {

namespace {

void check_config(const MeasurementConfig& c) {
    if (c.n_max < 1) throw std::invalid_argument("measure: n_max must be >= 1");
    if (!(c.shots > 0.0)) throw std::invalid_argument("measure: shots must be > 0");
    if (c.repeats < 1) throw std::invalid_argument("measure: repeats must be >= 1");
}

// True weights truncated to |m| <= n_max and renormalized.
std::vector<double> truncated_weights(const ModeSpectrum& state, int n_max) {
    std::vector<double> w(2 * n_max + 1, 0.0);
    double total = 0.0;
    for (int m = -n_max; m <= n_max; ++m) {
        w[m + n_max] = std::norm(state.at(m));
        total += w[m + n_max];
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("measure: state has no weight inside the helicity window");
    }
    for (double& x : w) x /= total;
    return w;
}

struct WeightMoments {
    double mean = 0.0;
    double var = 0.0;
    double d2_reconstructed = 0.0;
};

WeightMoments weight_moments(const std::vector<double>& w, int n_max) {
    WeightMoments out;
    double m1 = 0.0, m2 = 0.0;
    for (int m = -n_max; m <= n_max; ++m) {
        const double wm = w[m + n_max];
        m1 += wm * m;
        m2 += wm * static_cast<double>(m) * m;
    }
    out.mean = m1;
    out.var = std::max(m2 - m1 * m1, 0.0);
    double e1 = 0.0;  // <e^{i phi}> for sqrt(w) amplitudes, real by construction
    for (int m = -n_max + 1; m <= n_max; ++m) {
        e1 += std::sqrt(w[m - 1 + n_max] * w[m + n_max]);
    }
    out.d2_reconstructed = std::clamp(1.0 - e1 * e1, 0.0, 1.0);
    return out;
}

ValueWithError mean_and_stderr(const std::vector<double>& xs) {
    ValueWithError out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.value = sum / n;
    if (n >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.value) * (x - out.value);
        out.std_error = std::sqrt(ss / (n - 1) / n);
    }
    return out;
}

}  // namespace

MeasurementRecord measure(const ModeSpectrum& state, const MeasurementConfig& config) {
    check_config(config);
    const int n_max = config.n_max;
    const std::vector<double> w_true = truncated_weights(state, n_max);
    const double d2_nominal = dispersion_sq(state);

    MeasurementRecord rec;
    std::vector<double> d2s, vars, prods, prods_dl;
    for (int r = 0; r < config.repeats; ++r) {
        Rng rng(config.seed ^ static_cast<std::uint64_t>(r));
        std::vector<double> counts(w_true.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < w_true.size(); ++i) {
            if (w_true[i] > 0.0) {
                counts[i] = static_cast<double>(rng.poisson(config.shots * w_true[i]));
                total += counts[i];
            }
        }
        if (total <= 0.0) {
            ++rec.discarded_repeats;
            continue;
        }
        for (double& c : counts) c /= total;
        const WeightMoments wm = weight_moments(counts, n_max);
        const double d2 = (config.d_estimator == MeasurementConfig::DEstimator::nominal)
                              ? d2_nominal
                              : wm.d2_reconstructed;
        rec.repeat_weights.push_back(counts);
        d2s.push_back(d2);
        vars.push_back(wm.var);
        prods.push_back(d2 * wm.var);
        prods_dl.push_back(std::sqrt(std::max(d2 * wm.var, 0.0)));
    }
    if (rec.repeat_weights.empty()) {
        throw std::runtime_error("measure: every repeat had zero total count");
    }

    rec.mean_weights.assign(w_true.size(), 0.0);
    for (const auto& rw : rec.repeat_weights) {
        for (std::size_t i = 0; i < rw.size(); ++i) rec.mean_weights[i] += rw[i];
    }
    double msum = 0.0;
    for (double& x : rec.mean_weights) {
        x /= rec.repeat_weights.size();
        msum += x;
    }
    for (double& x : rec.mean_weights) x /= msum;

    rec.var_l_est = mean_and_stderr(vars);
    rec.dispersion_sq_est = mean_and_stderr(d2s);
    rec.product_est = mean_and_stderr(prods);
    rec.product_dl_est = mean_and_stderr(prods_dl);
    return rec;
}

IdealMeasurement measure_ideal(const ModeSpectrum& state, int n_max,
                               MeasurementConfig::DEstimator d_estimator) {
    if (n_max < 1) throw std::invalid_argument("measure_ideal: n_max must be >= 1");
    const std::vector<double> w = truncated_weights(state, n_max);
    const WeightMoments wm = weight_moments(w, n_max);
    IdealMeasurement out;
    out.dispersion_sq = (d_estimator == MeasurementConfig::DEstimator::nominal)
                            ? dispersion_sq(state)
                            : wm.d2_reconstructed;
    out.var_l = wm.var;
    out.product = out.dispersion_sq * out.var_l;
    out.product_dl = std::sqrt(std::max(out.product, 0.0));
    return out;
}

namespace {

TheoryRow mathieu_theory_row(double d) {
    const double d2 = d * d;
    const double q = q_for_dispersion(d2);
    const MathieuFunctionals f = mathieu_functionals(solve(0, q, Parity::even));
    TheoryRow row;
    row.d = d;
    row.parameter = q;
    row.dispersion_sq = f.dispersion_sq;
    row.var_l = f.var_l;
    row.dl = std::sqrt(f.var_l);
    row.product_sq = f.dispersion_sq * f.var_l;
    row.product_dl = std::sqrt(row.product_sq);
    row.bound_sq = 0.25 * (1.0 - f.dispersion_sq);
    row.bound_dl = std::sqrt(row.bound_sq);
    return row;
}

TheoryRow vonmises_theory_row(double d) {
    const double d2 = d * d;
    const double kappa = vm_kappa_for_dispersion(d2);
    const VmMoments m = vm_moments(VonMisesState{kappa, kPi});
    TheoryRow row;
    row.d = d;
    row.parameter = kappa;
    row.dispersion_sq = m.dispersion_sq;
    row.var_l = m.var_l;
    row.dl = std::sqrt(m.var_l);
    row.product_sq = m.dispersion_sq * m.var_l;
    row.product_dl = std::sqrt(row.product_sq);
    row.bound_sq = 0.25 * (1.0 - m.dispersion_sq);
    row.bound_dl = std::sqrt(row.bound_sq);
    return row;
}

int spectrum_cut_for_kappa(double kappa) {
    int m_cut = 40;
    while (true) {
        try {
            (void)vm_spectrum(VonMisesState{kappa, kPi}, m_cut);
            return m_cut;
        } catch (const std::invalid_argument&) {
            m_cut *= 2;
            if (m_cut > (1 << 22)) throw;
        }
    }
}

}  // namespace

Figure1Dataset figure1_dataset(std::span<const double> kappas, const MeasurementConfig& config,
                               double d_min, double d_max, int grid_points) {
    if (!(d_min > 0.0) || !(d_max <= 1.0) || !(d_min < d_max)) {
        throw std::invalid_argument("figure1_dataset: need 0 < d_min < d_max <= 1");
    }
    if (grid_points < 2) throw std::invalid_argument("figure1_dataset: grid_points must be >= 2");
    check_config(config);

    Figure1Dataset out;
    out.d_min = d_min;
    out.d_max = d_max;
    for (int i = 0; i < grid_points; ++i) {
        const double d = d_min + (d_max - d_min) * i / (grid_points - 1);
        out.mathieu.push_back(mathieu_theory_row(d));
        out.vonmises.push_back(vonmises_theory_row(d));
        const double diff = out.vonmises.back().product_dl - out.mathieu.back().product_dl;
        out.vm_minus_mathieu_dl.push_back(diff);
        out.max_abs_difference_dl = std::max(out.max_abs_difference_dl, std::fabs(diff));
    }

    for (double kappa : kappas) {
        const VonMisesState vm{kappa, kPi};
        const ModeSpectrum prepared =
            (kappa == 0.0) ? ModeSpectrum::single_mode(0)
                           : vm_spectrum(vm, spectrum_cut_for_kappa(kappa));
        const MeasurementRecord rec = measure(prepared, config);
        SimulatedPoint p;
        p.kappa = kappa;
        p.d = std::sqrt(std::max(rec.dispersion_sq_est.value, 0.0));
        p.product = rec.product_dl_est.value;
        p.err = rec.product_dl_est.std_error;
        p.product_sq = rec.product_est.value;
        p.err_sq = rec.product_est.std_error;
        out.points.push_back(p);
    }
    return out;
}

}  // namespace oamu
