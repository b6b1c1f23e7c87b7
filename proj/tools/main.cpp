#include "commands.hpp"

#include <iostream>

#include <CLI11.hpp>

int main(int argc, char **argv)
{
    using namespace nlskam::cli;
    CLI::App app{"nlskam: counter-term KAM toolkit for truncated NLS models"};
    app.require_subcommand(1);
    Streams io{std::cout, std::cerr};
    int code = 0;

    std::string config;
    std::optional<std::string> out;

    auto *validate = app.add_subcommand("validate", "parse and check a run configuration");
    validate->add_option("config", config, "YAML configuration")->required();
    validate->callback([&] { code = cmd_validate(config, io); });

    auto *kam = app.add_subcommand("kam", "KAM iteration");
    kam->require_subcommand(1);
    auto *kam_run = kam->add_subcommand("run", "run the counter-term iteration and dump the result");
    kam_run->add_option("--config", config, "YAML configuration")->required();
    kam_run->add_option("--out", out, "output directory");
    kam_run->callback([&] { code = cmd_kam_run(config, out, io); });

    auto *measure = app.add_subcommand("measure", "Monte-Carlo estimate of the resonant set");
    measure->add_option("--config", config, "YAML configuration")->required();
    measure->add_option("--out", out, "output directory");
    measure->callback([&] { code = cmd_measure(config, out, io); });

    SynthArgs sa;
    auto *synth = app.add_subcommand("synthesize", "evaluate the synthesized solution from a kam run dump");
    synth->add_option("--run", sa.run_dir, "directory written by 'kam run'")->required();
    synth->add_option("--t0", sa.t0, "start time");
    synth->add_option("--t1", sa.t1, "end time");
    synth->add_option("--nt", sa.nt, "time nodes");
    synth->add_option("--nx", sa.nx, "space nodes");
    synth->add_option("--out", sa.out_dir, "output directory (default: the run directory)");
    synth->callback([&] { code = cmd_synthesize(sa, io); });

    std::vector<std::string> inputs;
    auto *report = app.add_subcommand("report", "aggregate CSV outputs into summary and plot-data files");
    report->add_option("inputs", inputs, "directories with trace.csv, measure.csv or residual.csv")->required();
    report->add_option("--out", out, "output directory");
    report->callback([&] { code = cmd_report(inputs, out, io); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : config_error;
    }
    return code;
}
