// mgrelay: fault studies, sweeps, DCB runs and trajectories from a scenario file.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mgrelay/errors.hpp"
#include "mgrelay/report.hpp"
#include "mgrelay/scenario.hpp"

namespace {

int write(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "mgrelay: cannot write " << path << "\n";
        return 1;
    }
    out << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance relaying studies for a two-bus inverter microgrid"};
    app.set_version_flag("--version", std::string(mgrelay::report::version()));
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::optional<int> case_number;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scenario", scenario_path, "Scenario file (INI)")->required();
        sub->add_option("--out,-o", out_path, "Output file (default: stdout)");
    };

    auto* c_case = app.add_subcommand("case", "Analytical case with oracle comparison");
    add_common(c_case);
    c_case->add_option("--case", case_number, "Case number 1..6")->check(CLI::Range(1, 6));

    auto* c_sweep = app.add_subcommand("sweep", "Fault resistance sweep");
    add_common(c_sweep);
    c_sweep->add_option("--case", case_number, "Case number 1..6")->check(CLI::Range(1, 6));

    auto* c_dcb = app.add_subcommand("dcb", "Directional comparison blocking simulation");
    add_common(c_dcb);
    c_dcb->add_option("--seed", seed, "Override the channel seed");

    auto* c_traj = app.add_subcommand("trajectory", "Quasi-static impedance trajectory");
    add_common(c_traj);

    auto* c_valid = app.add_subcommand("validate", "Check a scenario and print its canonical form");
    add_common(c_valid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    using namespace mgrelay;
    try {
        const scenario::Scenario s = scenario::load_scenario(scenario_path);
        std::string text;
        if (c_case->parsed()) {
            text = report::format_case(s, report::run_case(s, case_number));
        } else if (c_sweep->parsed()) {
            text = report::format_sweep(s, report::run_sweep(s, case_number));
        } else if (c_dcb->parsed()) {
            text = report::format_dcb(s, report::run_dcb(s, seed));
        } else if (c_traj->parsed()) {
            const auto t = report::run_trajectory(s);
            text = report::format_trajectory_report(s, t);
            if (!t.converged) {
                write(text, out_path);
                std::cerr << "mgrelay: limiter fixed point did not converge\n";
                return 2;
            }
        } else {
            text = report::format_validation(s);
        }
        return write(text, out_path);
    } catch (const ValidationError& e) {
        std::cerr << "mgrelay: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "mgrelay: numerical failure: " << e.what() << "\n";
        return 2;
    }
}
