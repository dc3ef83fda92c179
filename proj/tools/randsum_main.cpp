#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "randsum/experiments.hpp"
#include "randsum/version.hpp"

// Exit codes: 0 when every verdict is pass, inconclusive, or bound_only;
// 1 when any verification failed; 2 for configuration problems (including
// grid points that abort a sweep).

namespace {

struct RunSpec {
    std::string config;
    std::vector<std::string> overrides;
};

CLI::App* add_run_command(CLI::App& app, RunSpec& spec, const char* name,
                          const char* description) {
    CLI::App* cmd = app.add_subcommand(name, description);
    cmd->add_option("config", spec.config, "config file path")->required();
    cmd->add_option("overrides", spec.overrides,
                    "key=value pairs applied after the file");
    return cmd;
}

randsum::ExperimentConfig load_config(const RunSpec& spec,
                                      const char* forced_method) {
    auto cfg = randsum::ExperimentConfig::parse_file(spec.config);
    for (const auto& assignment : spec.overrides)
        cfg.apply_override(assignment);
    // The environment seed wins over file and command line, so a wrapper can
    // re-run any configuration under a fresh seed without editing it.
    if (const char* seed = std::getenv("RANDSUM_SEED"))
        cfg.apply_override(std::string("method.master_seed=") + seed);
    if (forced_method != nullptr)
        cfg.apply_override(std::string("method.kind=") + forced_method);
    return cfg;
}

int emit_and_grade(const randsum::ExperimentConfig& cfg,
                   const randsum::ReportDocument& doc) {
    randsum::emit_report(doc, cfg.get_or("output.format", "csv"),
                         cfg.get_or("output.path", "-"));
    for (const auto& row : doc.rows)
        if (row.verdict == randsum::Verdict::fail) return 1;
    if (doc.abort_reason) {
        std::cerr << "sweep aborted at " << *doc.abort_reason << '\n';
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounds and numerical verification for normalized random "
                 "sums"};
    app.require_subcommand(1);

    RunSpec bound_spec, verify_spec, sweep_spec, exact_spec;
    CLI::App* bound_cmd = add_run_command(
        app, bound_spec, "bound", "evaluate the theorem bound, no estimate");
    CLI::App* verify_cmd = add_run_command(
        app, verify_spec, "verify",
        "compare the bound against a distance estimate");
    CLI::App* sweep_cmd = add_run_command(
        app, sweep_spec, "sweep",
        "verify across a parameter grid and fit log-log rates");
    CLI::App* exact_cmd = add_run_command(
        app, exact_spec, "exact",
        "verify with the exact finite-lattice distance forced");
    CLI::App* version_cmd =
        app.add_subcommand("version", "print library name and version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (version_cmd->parsed()) {
            std::cout << randsum::library_name << ' '
                      << randsum::library_version << '\n';
            return 0;
        }
        if (bound_cmd->parsed()) {
            const auto cfg = load_config(bound_spec, nullptr);
            std::vector<randsum::VerificationReport> rows{
                randsum::run_bound(cfg)};
            return emit_and_grade(cfg,
                                  randsum::make_document(cfg, std::move(rows)));
        }
        if (verify_cmd->parsed() || exact_cmd->parsed()) {
            const bool forced = exact_cmd->parsed();
            const auto cfg = load_config(forced ? exact_spec : verify_spec,
                                         forced ? "exact" : nullptr);
            std::vector<randsum::VerificationReport> rows{
                randsum::run_verify(cfg)};
            return emit_and_grade(cfg,
                                  randsum::make_document(cfg, std::move(rows)));
        }
        const auto cfg = load_config(sweep_spec, nullptr);
        auto sweep = randsum::run_sweep(cfg);
        return emit_and_grade(cfg,
                              randsum::make_document(cfg, std::move(sweep)));
    } catch (const randsum::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
