#include <clocale>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oamu/cli.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    using namespace oamu::cli;

    CLI::App app{"Minimum-uncertainty angle / angular-momentum toolkit"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    CharvalsOptions charvals;
    auto* c1 = app.add_subcommand("charvals", "Mathieu characteristic values");
    c1->add_option("--q", charvals.q, "Mathieu parameter q >= 0");
    c1->add_option("--max-order", charvals.max_order, "highest even order");
    c1->add_option("--parity", charvals.parity, "even | odd | both");
    c1->add_option("--out", charvals.out, "output file (default stdout)");

    SweepOptions sweep;
    auto* c2 = app.add_subcommand("sweep", "uncertainty functionals along a q grid");
    c2->add_option("--q-min", sweep.q_min, "grid start")->required();
    c2->add_option("--q-max", sweep.q_max, "grid end")->required();
    c2->add_option("--steps", sweep.steps, "number of grid points");
    c2->add_flag("--log", sweep.log_spacing, "log-spaced grid");
    c2->add_option("--out", sweep.out, "output file (default stdout)");

    MinstateOptions minstate;
    auto* c3 = app.add_subcommand("minstate", "constrained minimum-product state");
    double disp_val = 0.0, varl_val = 0.0;
    auto* dopt = c3->add_option("--dispersion", disp_val, "target dispersion D^2 in (0, 1]");
    auto* vopt = c3->add_option("--varl", varl_val, "target (dL)^2 >= 0");
    dopt->excludes(vopt);
    c3->add_option("--mean-m", minstate.mean_m, "mean angular momentum of the output");
    c3->add_option("--out", minstate.out, "output file (default stdout)");

    SimulateOptions simulate;
    auto* c4 = app.add_subcommand("simulate", "helicity-scan measurement simulation");
    c4->add_option("--kappa", simulate.kappas, "prepared concentrations (default grid)")
        ->delimiter(',');
    c4->add_option("--nmax", simulate.n_max, "helicity cutoff");
    c4->add_option("--shots", simulate.shots, "expected counts per helicity");
    c4->add_option("--repeats", simulate.repeats, "independent runs for error bars");
    c4->add_option("--seed", simulate.seed, "RNG seed");
    c4->add_option("--d-estimator", simulate.d_estimator, "nominal | reconstructed");
    c4->add_option("--out", simulate.out, "output file (default stdout)");

    Figure1Options figure1;
    auto* c5 = app.add_subcommand("figure1", "full uncertainty-product dataset");
    c5->add_option("--out", figure1.out_prefix, "output file prefix")->required();
    c5->add_option("--kappa", figure1.kappas, "prepared concentrations (default grid)")
        ->delimiter(',');
    c5->add_option("--nmax", figure1.n_max, "helicity cutoff");
    c5->add_option("--shots", figure1.shots, "expected counts per helicity");
    c5->add_option("--repeats", figure1.repeats, "independent runs for error bars");
    c5->add_option("--seed", figure1.seed, "RNG seed");
    c5->add_option("--d-estimator", figure1.d_estimator, "nominal | reconstructed");
    c5->add_option("--d-min", figure1.d_min, "theory grid start");
    c5->add_option("--d-max", figure1.d_max, "theory grid end");
    c5->add_option("--grid-points", figure1.grid_points, "theory grid size");

    std::string manifest_path;
    auto* c6 = app.add_subcommand("rerun", "re-run a command from its manifest");
    c6->add_option("manifest", manifest_path, "manifest JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (c1->parsed()) return execute_charvals(charvals);
    if (c2->parsed()) return execute_sweep(sweep);
    if (c3->parsed()) {
        if (dopt->count() > 0) minstate.dispersion = disp_val;
        if (vopt->count() > 0) minstate.varl = varl_val;
        return execute_minstate(minstate);
    }
    if (c4->parsed()) return execute_simulate(simulate);
    if (c5->parsed()) return execute_figure1(figure1);
    if (c6->parsed()) return execute_rerun(manifest_path);
    return 2;
}
