#include <string>

#include <CLI11.hpp>

#include "otlab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"otlab: optimal-transport contraction laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "config file (key = value with [sections])")
        ->required();

    std::string csv_path, xcol, ycol, out_path;
    bool log_axes = false;
    CLI::App* plot = app.add_subcommand("plot", "render a CSV column pair as an SVG");
    plot->add_option("csv", csv_path, "input CSV")->required();
    plot->add_option("--x", xcol, "x column name")->required();
    plot->add_option("--y", ycol, "y column name")->required();
    plot->add_option("--out", out_path, "output SVG path (default: <csv>.svg)");
    plot->add_flag("--log", log_axes, "log-log axes with a fitted slope");

    CLI::App* self = app.add_subcommand("selftest", "run the invariant suites");
    (void)self;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) return otlab::run_experiment(config_path);
    if (plot->parsed()) {
        if (out_path.empty()) out_path = csv_path + ".svg";
        return otlab::plot_csv(csv_path, xcol, ycol, out_path, log_axes);
    }
    return otlab::selftest();
}
