// mist-sim — scenario-driven CLI for the MIST simulation library.
//
// Subcommands: spectrum, reduce, rates, steady-scan, evolve, figure.
// Exit codes: 0 success, 2 scenario error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "mist/figures.hpp"

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir;
    std::string figure = "fig2a";
    std::string model = "reduced";
    bool paper_scale = false;
    bool entanglement = false;
    bool plots = false;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_figure = false,
                bool with_model = false) {
    cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides scenario)");
    cmd->add_option("--seed", args.seed, "RNG seed (overrides scenario)");
    cmd->add_flag("--paper-scale", args.paper_scale,
                  "full published truncations and trajectory counts");
    cmd->add_flag("--entanglement", args.entanglement, "append negativity columns");
    cmd->add_flag("--plots", args.plots, "render SVG plots next to each CSV");
    if (with_figure)
        cmd->add_option("--figure", args.figure,
                        "one of fig1b, fig2a, fig2b, fig2c, fig3, fig4");
    if (with_model)
        cmd->add_option("--model", args.model, "reduced | full | semiclassical");
}

mist::ModelContext load_context(const CommonArgs& args) {
    mist::Scenario scn = mist::parse_scenario(args.scenario_path);
    if (!args.out_dir.empty()) scn.out_dir = args.out_dir;
    if (args.seed >= 0) scn.seed = static_cast<std::uint64_t>(args.seed);
    if (args.entanglement) scn.entanglement = true;
    if (args.plots) scn.plots = true;
    return mist::build_context(scn);
}

mist::RunFlags flags_of(const CommonArgs& args) {
    mist::RunFlags f;
    f.paper_scale = args.paper_scale;
    f.entanglement = args.entanglement;
    f.plots = args.plots;
    return f;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mist-sim: reduced-model simulation of measurement-induced state "
                 "transitions in dispersively read-out superconducting qubits"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* spectrum = app.add_subcommand("spectrum", "diagonalize the qubit and export "
                                            "spectrum.csv / charge_matrix.csv");
    add_common(spectrum, args);
    CLI::App* reduce = app.add_subcommand("reduce", "export reduced_params.json with the "
                                          "effective-model constants and validity report");
    add_common(reduce, args);
    CLI::App* rates = app.add_subcommand("rates", "analytic transition rates over the "
                                         "drive grid (rates.csv)");
    add_common(rates, args);
    CLI::App* scan = app.add_subcommand("steady-scan", "steady-state populations and "
                                        "regimes over the drive grid (scan.csv)");
    add_common(scan, args);
    CLI::App* evolve = app.add_subcommand("evolve", "time evolution of one model");
    add_common(evolve, args, false, true);
    CLI::App* figure = app.add_subcommand("figure", "reproduce one figure's data files");
    add_common(figure, args, true, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const mist::ModelContext ctx = load_context(args);
        const mist::RunFlags flags = flags_of(args);
        if (spectrum->parsed()) mist::run_spectrum(ctx, flags);
        if (reduce->parsed()) mist::run_reduce(ctx, flags);
        if (rates->parsed()) mist::run_rates(ctx, flags);
        if (scan->parsed()) mist::run_steady_scan(ctx, flags);
        if (evolve->parsed()) {
            if (args.model == "reduced") mist::run_evolve_reduced(ctx, flags);
            else if (args.model == "full") mist::run_evolve_full(ctx, flags);
            else if (args.model == "semiclassical") mist::run_evolve_semiclassical(ctx, flags);
            else throw mist::ScenarioError("unknown model '" + args.model + "'");
        }
        if (figure->parsed()) mist::run_figure(ctx, args.figure, flags);
    } catch (const mist::ScenarioError& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
