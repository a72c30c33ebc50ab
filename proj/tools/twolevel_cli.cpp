// twolevel: run, validate or compare scenario files.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical error.

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "twolevel/config.hpp"
#include "twolevel/core.hpp"
#include "twolevel/scenario.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Flags {
    std::string config;
    std::string out_dir = ".";
    unsigned threads = 0;
    std::optional<double> step_override;
};

int run(const Flags& f, bool compare) {
    using namespace twolevel;
    LoadOptions opt;
    opt.step_override = f.step_override;
    if (compare) opt.force_model = Model::Both;

    ScenarioPlan plan;
    try {
        plan = load_plan_file(f.config, opt);
    } catch (const config::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const unsigned threads = f.threads ? f.threads : std::max(1u, std::thread::hardware_concurrency());
    PlanResult result;
    try {
        result = run_plan(plan, threads);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    }

    write_outputs(plan, result, f.out_dir);

    if (compare) {
        for (std::size_t i = 0; i < result.points.size(); ++i) {
            if (plan.sweep)
                std::cout << plan.sweep->parameter << " = " << format_double(plan.sweep->values[i]) << "\n";
            if (result.points[i].comparison) std::cout << *result.points[i].comparison;
        }
    } else {
        std::cout << "wrote " << result.points.size() << " scenario point(s) to " << f.out_dir << "\n";
    }
    return 0;
}

int validate(const Flags& f) {
    try {
        const auto plan = twolevel::load_plan_file(f.config, {f.step_override, std::nullopt});
        std::cout << f.config << ": ok (" << plan.points.size() << " scenario point(s))\n";
        return 0;
    } catch (const twolevel::config::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level atom coupled to a bosonic field: exact zero-temperature dynamics"};
    app.require_subcommand(1);

    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", flags.config, "scenario file")->required();
        sub->add_option("--step-override", flags.step_override, "replace the grid step h")
            ->check(CLI::PositiveNumber);
    };
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--out-dir", flags.out_dir, "directory for CSV and summary.json");
        sub->add_option("--threads", flags.threads, "worker threads for sweeps (default: all cores)");
    };

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write CSV + summary.json");
    add_common(run_cmd);
    add_run_flags(run_cmd);
    auto* validate_cmd = app.add_subcommand("validate", "check a scenario file without running solvers");
    add_common(validate_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "run with model = both and print the sigma_pm / sigma_z table");
    add_common(compare_cmd);
    add_run_flags(compare_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run_cmd) return run(flags, false);
        if (*compare_cmd) return run(flags, true);
        return validate(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
