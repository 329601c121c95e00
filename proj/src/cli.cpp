#include "oamu/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "oamu/experiment.hpp"
#include "oamu/mathieu.hpp"
#include "oamu/numerics.hpp"
#include "oamu/optimizer.hpp"
#include "oamu/states.hpp"
#include "oamu/vonmises.hpp"

namespace oamu::cli {

using nlohmann::json;

std::string fmt_sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json manifest_base(const std::string& command, json parameters, json seed) {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["command"] = command;
    m["parameters"] = std::move(parameters);
    m["seed"] = std::move(seed);
    m["timestamp"] = timestamp_utc();
    return m;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

// Emits the primary text to --out (with manifest sidecar) or stdout.
void emit(const std::string& text, const std::string& out_path, const json& manifest) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    write_file(out_path, text);
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

MeasurementConfig::DEstimator parse_estimator(const std::string& s) {
    if (s == "nominal") return MeasurementConfig::DEstimator::nominal;
    if (s == "reconstructed") return MeasurementConfig::DEstimator::reconstructed;
    throw std::invalid_argument("d-estimator must be 'nominal' or 'reconstructed'");
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const InfeasibleTargetError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

std::vector<double> default_kappa_grid() {
    // 25 log-spaced concentrations; the dispersion runs from above 0.99 down
    // past 0.1.
    std::vector<double> ks;
    const double lo = 0.25, hi = 102.0;
    const int n = 25;
    for (int i = 0; i < n; ++i) {
        ks.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return ks;
}

// ---------------------------------------------------------------------------
// charvals
// ---------------------------------------------------------------------------

std::string run_charvals(const CharvalsOptions& opts) {
    if (!(opts.q >= 0.0)) throw std::invalid_argument("charvals: q must be >= 0");
    if (opts.max_order < 0) throw std::invalid_argument("charvals: max-order must be >= 0");
    std::ostringstream csv;
    csv << "parity,order,charvalue\n";
    auto emit_row = [&](Parity p, int order, double value) {
        csv << (p == Parity::even ? "ce" : "se") << ',' << order << ',' << fmt_sci(value) << '\n';
    };
    if (opts.parity == "both") {
        for (const CharValue& cv : interlacing_check(opts.q, opts.max_order)) {
            emit_row(cv.parity, cv.order, cv.value);
        }
    } else if (opts.parity == "even" || opts.parity == "odd") {
        const Parity p = (opts.parity == "even") ? Parity::even : Parity::odd;
        for (int order = (p == Parity::even ? 0 : 2); order <= opts.max_order; order += 2) {
            emit_row(p, order, solve(order, opts.q, p).charvalue);
        }
    } else {
        throw std::invalid_argument("charvals: parity must be even, odd or both");
    }
    return csv.str();
}

int execute_charvals(const CharvalsOptions& opts) {
    return run_guarded([&] {
        json params{{"q", opts.q},
                    {"max_order", opts.max_order},
                    {"parity", opts.parity},
                    {"out", opts.out}};
        emit(run_charvals(opts), opts.out, manifest_base("charvals", params, nullptr));
    });
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

std::string run_sweep(const SweepOptions& opts) {
    if (!(opts.q_min >= 0.0)) throw std::invalid_argument("sweep: q-min must be >= 0");
    if (!(opts.q_min < opts.q_max)) throw std::invalid_argument("sweep: need q-min < q-max");
    if (opts.steps < 1) throw std::invalid_argument("sweep: steps must be >= 1");
    if (opts.log_spacing && !(opts.q_min > 0.0)) {
        throw std::invalid_argument("sweep: log spacing needs q-min > 0");
    }
    std::ostringstream csv;
    csv << "q,D2,varL,D,dL,product,bound,vm_product_at_same_D,vm_minus_mathieu\n";
    for (int i = 0; i < opts.steps; ++i) {
        double q = opts.q_min;
        if (opts.steps > 1) {
            const double f = static_cast<double>(i) / (opts.steps - 1);
            q = opts.log_spacing ? opts.q_min * std::pow(opts.q_max / opts.q_min, f)
                                 : opts.q_min + (opts.q_max - opts.q_min) * f;
        }
        const MathieuFunctionals fn = mathieu_functionals(solve(0, q, Parity::even));
        const double d = std::sqrt(fn.dispersion_sq);
        const double dl = std::sqrt(fn.var_l);
        const double product = d * dl;
        const double bound = 0.5 * std::sqrt(1.0 - fn.dispersion_sq);
        double vm_product = 0.0;
        if (fn.dispersion_sq < 1.0) {
            const double kappa = vm_kappa_for_dispersion(fn.dispersion_sq);
            const VmMoments vm = vm_moments(VonMisesState{kappa, kPi});
            vm_product = std::sqrt(vm.dispersion_sq) * std::sqrt(vm.var_l);
        }
        csv << fmt_sci(q) << ',' << fmt_sci(fn.dispersion_sq) << ',' << fmt_sci(fn.var_l) << ','
            << fmt_sci(d) << ',' << fmt_sci(dl) << ',' << fmt_sci(product) << ',' << fmt_sci(bound)
            << ',' << fmt_sci(vm_product) << ',' << fmt_sci(vm_product - product) << '\n';
    }
    return csv.str();
}

int execute_sweep(const SweepOptions& opts) {
    return run_guarded([&] {
        json params{{"q_min", opts.q_min},
                    {"q_max", opts.q_max},
                    {"steps", opts.steps},
                    {"log_spacing", opts.log_spacing},
                    {"out", opts.out}};
        emit(run_sweep(opts), opts.out, manifest_base("sweep", params, nullptr));
    });
}

// ---------------------------------------------------------------------------
// minstate
// ---------------------------------------------------------------------------

std::string run_minstate(const MinstateOptions& opts) {
    if (opts.dispersion.has_value() == opts.varl.has_value()) {
        throw std::invalid_argument("minstate: give exactly one of --dispersion or --varl");
    }
    ConstraintTarget target;
    if (opts.dispersion) {
        target.kind = ConstraintTarget::Kind::fixed_dispersion;
        target.value = *opts.dispersion;
    } else {
        target.kind = ConstraintTarget::Kind::fixed_var_l;
        target.value = *opts.varl;
    }
    const MinStateResult res = min_state(target, opts.mean_m);

    json out;
    out["schema_version"] = kSchemaVersion;
    out["qstar"] = res.q;
    json amps_re = json::array(), amps_im = json::array();
    for (const auto& c : res.state.amplitudes) {
        amps_re.push_back(c.real());
        amps_im.push_back(c.imag());
    }
    out["state"] = {{"m_min", res.state.m_min},
                    {"amplitudes_re", amps_re},
                    {"amplitudes_im", amps_im}};
    out["report"] = {{"dispersion_sq", res.report.dispersion_sq},
                     {"var_l", res.report.var_l},
                     {"mean_l", res.report.mean_l},
                     {"product", res.report.product},
                     {"bound", res.report.bound},
                     {"gap", res.report.gap}};
    const double achieved = opts.dispersion ? res.report.dispersion_sq : res.report.var_l;
    out["roundtrip"] = {{"kind", opts.dispersion ? "dispersion" : "varl"},
                        {"target", target.value},
                        {"achieved", achieved},
                        {"abs_error", std::fabs(achieved - target.value)}};
    return out.dump(2) + "\n";
}

int execute_minstate(const MinstateOptions& opts) {
    return run_guarded([&] {
        json params{{"mean_m", opts.mean_m}, {"out", opts.out}};
        if (opts.dispersion) params["dispersion"] = *opts.dispersion;
        if (opts.varl) params["varl"] = *opts.varl;
        emit(run_minstate(opts), opts.out, manifest_base("minstate", params, nullptr));
    });
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

std::string run_simulate(const SimulateOptions& opts) {
    const std::vector<double> kappas = opts.kappas.empty() ? default_kappa_grid() : opts.kappas;
    MeasurementConfig config;
    config.n_max = opts.n_max;
    config.shots = opts.shots;
    config.repeats = opts.repeats;
    config.seed = opts.seed;
    config.d_estimator = parse_estimator(opts.d_estimator);

    std::ostringstream csv;
    csv << "kappa,D,product,product_err\n";
    for (double kappa : kappas) {
        if (!(kappa >= 0.0)) throw std::invalid_argument("simulate: kappa must be >= 0");
        const ModeSpectrum prepared =
            (kappa == 0.0)
                ? ModeSpectrum::single_mode(0)
                : vm_spectrum(VonMisesState{kappa, kPi},
                              std::max(40, static_cast<int>(std::ceil(kappa)) + 40));
        const MeasurementRecord rec = measure(prepared, config);
        const double d = std::sqrt(std::max(rec.dispersion_sq_est.value, 0.0));
        csv << fmt_sci(kappa) << ',' << fmt_sci(d) << ',' << fmt_sci(rec.product_dl_est.value)
            << ',' << fmt_sci(rec.product_dl_est.std_error) << '\n';
    }
    return csv.str();
}

int execute_simulate(const SimulateOptions& opts) {
    return run_guarded([&] {
        json params{{"kappa", opts.kappas.empty() ? default_kappa_grid() : opts.kappas},
                    {"nmax", opts.n_max},
                    {"shots", opts.shots},
                    {"repeats", opts.repeats},
                    {"d_estimator", opts.d_estimator},
                    {"out", opts.out}};
        emit(run_simulate(opts), opts.out, manifest_base("simulate", params, opts.seed));
    });
}

// ---------------------------------------------------------------------------
// figure1
// ---------------------------------------------------------------------------

void run_figure1(const Figure1Options& opts) {
    if (opts.out_prefix.empty()) throw std::invalid_argument("figure1: --out prefix required");
    const std::vector<double> kappas = opts.kappas.empty() ? default_kappa_grid() : opts.kappas;
    MeasurementConfig config;
    config.n_max = opts.n_max;
    config.shots = opts.shots;
    config.repeats = opts.repeats;
    config.seed = opts.seed;
    config.d_estimator = parse_estimator(opts.d_estimator);

    const Figure1Dataset data =
        figure1_dataset(kappas, config, opts.d_min, opts.d_max, opts.grid_points);

    auto theory_csv = [](const std::vector<TheoryRow>& rows, const char* param_name,
                         const std::vector<double>* diff) {
        std::ostringstream csv;
        csv << "D," << param_name << ",D2,varL,dL,product,product_sq,bound,bound_sq";
        if (diff) csv << ",vm_minus_mathieu";
        csv << '\n';
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const TheoryRow& r = rows[i];
            csv << fmt_sci(r.d) << ',' << fmt_sci(r.parameter) << ',' << fmt_sci(r.dispersion_sq)
                << ',' << fmt_sci(r.var_l) << ',' << fmt_sci(r.dl) << ',' << fmt_sci(r.product_dl)
                << ',' << fmt_sci(r.product_sq) << ',' << fmt_sci(r.bound_dl) << ','
                << fmt_sci(r.bound_sq);
            if (diff) csv << ',' << fmt_sci((*diff)[i]);
            csv << '\n';
        }
        return csv.str();
    };

    std::ostringstream points;
    points << "kappa,D,product,product_err,product_sq,product_sq_err\n";
    for (const SimulatedPoint& p : data.points) {
        points << fmt_sci(p.kappa) << ',' << fmt_sci(p.d) << ',' << fmt_sci(p.product) << ','
               << fmt_sci(p.err) << ',' << fmt_sci(p.product_sq) << ',' << fmt_sci(p.err_sq)
               << '\n';
    }

    json params{{"out_prefix", opts.out_prefix},
                {"kappa", kappas},
                {"nmax", opts.n_max},
                {"shots", opts.shots},
                {"repeats", opts.repeats},
                {"d_estimator", opts.d_estimator},
                {"d_min", opts.d_min},
                {"d_max", opts.d_max},
                {"grid_points", opts.grid_points}};
    json manifest = manifest_base("figure1", params, opts.seed);
    manifest["axis"] = {{"x", "dispersion D"},
                        {"y", "uncertainty product D*dL"},
                        {"d_range", {data.d_min, data.d_max}}};
    manifest["max_abs_vm_minus_mathieu_dl"] = data.max_abs_difference_dl;
    manifest["outputs"] = {opts.out_prefix + "theory_mathieu.csv",
                           opts.out_prefix + "theory_vonmises.csv",
                           opts.out_prefix + "simulated_points.csv"};

    write_file(opts.out_prefix + "theory_mathieu.csv", theory_csv(data.mathieu, "q", nullptr));
    write_file(opts.out_prefix + "theory_vonmises.csv",
               theory_csv(data.vonmises, "kappa", &data.vm_minus_mathieu_dl));
    write_file(opts.out_prefix + "simulated_points.csv", points.str());
    write_file(opts.out_prefix + "manifest.json", manifest.dump(2) + "\n");
}

int execute_figure1(const Figure1Options& opts) {
    return run_guarded([&] { run_figure1(opts); });
}

// ---------------------------------------------------------------------------
// rerun
// ---------------------------------------------------------------------------

int execute_rerun(const std::string& manifest_path) {
    json m;
    try {
        std::ifstream in(manifest_path);
        if (!in) throw IoError("cannot open manifest: " + manifest_path);
        in >> m;
    } catch (const IoError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": bad manifest: " << e.what() << "\n";
        return 2;
    }
    try {
        const std::string command = m.at("command");
        const json& p = m.at("parameters");
        if (command == "charvals") {
            CharvalsOptions o;
            o.q = p.at("q");
            o.max_order = p.at("max_order");
            o.parity = p.at("parity");
            o.out = p.at("out");
            return execute_charvals(o);
        }
        if (command == "sweep") {
            SweepOptions o;
            o.q_min = p.at("q_min");
            o.q_max = p.at("q_max");
            o.steps = p.at("steps");
            o.log_spacing = p.at("log_spacing");
            o.out = p.at("out");
            return execute_sweep(o);
        }
        if (command == "minstate") {
            MinstateOptions o;
            if (p.contains("dispersion")) o.dispersion = p.at("dispersion").get<double>();
            if (p.contains("varl")) o.varl = p.at("varl").get<double>();
            o.mean_m = p.at("mean_m");
            o.out = p.at("out");
            return execute_minstate(o);
        }
        if (command == "simulate") {
            SimulateOptions o;
            o.kappas = p.at("kappa").get<std::vector<double>>();
            o.n_max = p.at("nmax");
            o.shots = p.at("shots");
            o.repeats = p.at("repeats");
            o.d_estimator = p.at("d_estimator");
            o.seed = m.at("seed").get<std::uint64_t>();
            o.out = p.at("out");
            return execute_simulate(o);
        }
        if (command == "figure1") {
            Figure1Options o;
            o.out_prefix = p.at("out_prefix");
            o.kappas = p.at("kappa").get<std::vector<double>>();
            o.n_max = p.at("nmax");
            o.shots = p.at("shots");
            o.repeats = p.at("repeats");
            o.d_estimator = p.at("d_estimator");
            o.d_min = p.at("d_min");
            o.d_max = p.at("d_max");
            o.grid_points = p.at("grid_points");
            o.seed = m.at("seed").get<std::uint64_t>();
            return execute_figure1(o);
        }
        std::cerr << kToolName << ": unknown command in manifest: " << command << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << kToolName << ": bad manifest: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace oamu::cli
