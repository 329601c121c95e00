#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oamu::cli {

inline constexpr const char* kToolName = "oamu";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

/// Thrown on unwritable output paths; mapped to exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CharvalsOptions {
    double q = 0.0;
    int max_order = 4;
    std::string parity = "even";  // even | odd | both
    std::string out;              // empty -> stdout
};

struct SweepOptions {
    double q_min = 0.0;
    double q_max = 10.0;
    int steps = 50;
    bool log_spacing = false;
    std::string out;
};

struct MinstateOptions {
    std::optional<double> dispersion;
    std::optional<double> varl;
    int mean_m = 0;
    std::string out;
};

struct SimulateOptions {
    std::vector<double> kappas;  // empty -> default grid
    int n_max = 20;
    double shots = 1e4;
    int repeats = 50;
    std::uint64_t seed = 1;
    std::string d_estimator = "nominal";  // nominal | reconstructed
    std::string out;
};

struct Figure1Options {
    std::string out_prefix;
    std::vector<double> kappas;  // empty -> default grid
    int n_max = 20;
    double shots = 1e4;
    int repeats = 50;
    std::uint64_t seed = 1;
    std::string d_estimator = "nominal";
    double d_min = 0.02;
    double d_max = 0.999;
    int grid_points = 120;
};

/// Default prepared-beam concentration grid: 25 log-spaced values covering
/// dispersions from about 0.99 down to 0.1.
std::vector<double> default_kappa_grid();

// Each command builds its primary output as text; when options.out is set the
// text goes to that file with a JSON manifest sidecar at <out>.manifest.json.
std::string run_charvals(const CharvalsOptions& opts);
std::string run_sweep(const SweepOptions& opts);
std::string run_minstate(const MinstateOptions& opts);
std::string run_simulate(const SimulateOptions& opts);

/// Writes <prefix>theory_mathieu.csv, <prefix>theory_vonmises.csv,
/// <prefix>simulated_points.csv and <prefix>manifest.json.
void run_figure1(const Figure1Options& opts);

/// Executes a command and handles file/stdout emission plus the manifest.
/// Returns the process exit code (0/2/3/4).
int execute_charvals(const CharvalsOptions& opts);
int execute_sweep(const SweepOptions& opts);
int execute_minstate(const MinstateOptions& opts);
int execute_simulate(const SimulateOptions& opts);
int execute_figure1(const Figure1Options& opts);

/// Re-runs the command recorded in a manifest file; outputs land where the
/// manifest says they did.
int execute_rerun(const std::string& manifest_path);

/// Scientific-notation formatting used in every CSV cell (%.12e).
std::string fmt_sci(double x);

}  // namespace oamu::cli
