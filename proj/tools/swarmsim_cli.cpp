#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swarmsim/swarmsim.hpp"

namespace fs = std::filesystem;
using namespace swarmsim;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kInvalid = 2 };

/// Loads and validates; prints diagnostics and returns nullopt on any problem.
std::optional<Scenario> load_checked(const std::string& path) {
    Scenario s;
    try {
        s = load_scenario(path);
    } catch (const ScenarioParseError& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
        return std::nullopt;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return std::nullopt;
    }
    const auto violations = validate_scenario(s);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invalid: " << v.field << " " << v.constraint << '\n';
        return std::nullopt;
    }
    return s;
}

int cmd_validate(const std::string& path) {
    if (!load_checked(path)) return kInvalid;
    std::cout << "ok\n";
    return kOk;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const fs::path& out) {
    auto s = load_checked(path);
    if (!s) return kInvalid;
    if (seed) s->seed = *seed;
    try {
        const RunResult r = run(*s, {TraceLevel::Off, {}});
        write_run_outputs(*s, r, out);
        std::cout << "wrote " << out.string() << " (" << r.metrics.total_tasks << " tasks, "
                  << r.metrics.scheduling_latency.size() << " latency samples)\n";
    } catch (const RunAborted& e) {
        std::cerr << "run aborted: " << e.what() << '\n';
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

int cmd_preset(const std::string& name, std::uint64_t seed, std::size_t repeats, const fs::path& out) {
    try {
        if (name == "calibrate") {
            const auto report = run_calibration(default_targets(), out, seed, repeats);
            fs::create_directories(out);
            std::ofstream file(out / "calibration.csv");
            write_calibration_report(file, report);
            write_calibration_report(std::cout, report);
            return report.all_pass() ? kOk : kFailure;
        }
        const auto outcome = run_preset(name, seed, repeats, out);
        write_cell_summary(std::cout, outcome.cells);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drone swarm coordination simulator"};
    app.require_subcommand(1);

    std::string file;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    auto* run_cmd = app.add_subcommand("run", "Run one scenario file");
    run_cmd->add_option("file", file, "Scenario JSON")->required();
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--out", out, "Output directory");

    std::string preset;
    std::uint64_t base_seed = 1;
    std::size_t repeats = 3;
    std::string preset_out;
    auto* preset_cmd = app.add_subcommand("preset", "Run an experiment preset");
    preset_cmd->add_option("name", preset, "fig2, fig3, fig4, fig5 or calibrate")->required();
    preset_cmd->add_option("--seed", base_seed, "First seed; repeats use consecutive seeds");
    preset_cmd->add_option("--repeats", repeats, "Runs per cell")->check(CLI::PositiveNumber);
    preset_cmd->add_option("--out", preset_out, "Output directory (default out/<name>)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file without running it");
    validate_cmd->add_option("file", file, "Scenario JSON")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) return cmd_run(file, seed, out);
    if (*preset_cmd) return cmd_preset(preset, base_seed, repeats, preset_out.empty() ? fs::path("out") / preset : fs::path(preset_out));
    return cmd_validate(file);
}
