#include <iostream>

#include "CLI11.hpp"
#include "twm/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"three-wave mixing in resonant three-level media"};
    app.require_subcommand(1);
    twm::cli::Options o;
    std::string solver, format;
    double seed = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"solve", "run the selected solvers and write CSV/SVG output"},
        {"sweep", "scan one scenario key and tabulate J_max, z_opt, epsilon and W"},
        {"compare", "cross-check analytic, canonical and Maxwell-Bloch solutions (exit 4 on a breach)"},
        {"validate", "check the scenario and print warnings and its hash"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", o.scenario, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--solver", solver, "analytic | canonical-ode | maxwell-bloch | all");
        sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed-eps", seed, "canonical start J at the vacuum point");
        sub->add_option("--format", format, "csv | svg | both");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : twm::cli::Validation;
    }
    for (auto* sub : app.get_subcommands()) {
        o.command = sub->get_name();
        if (sub->count("--solver")) o.solver = solver;
        if (sub->count("--format")) o.format = format;
        if (sub->count("--seed-eps")) o.seed_eps = seed;
    }
    return twm::cli::run(o, std::cout, std::cerr);
}
