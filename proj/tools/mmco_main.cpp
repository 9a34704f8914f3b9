#include <iostream>

#include "CLI11.hpp"
#include "mmco/cli.hpp"

int main(int argc, char** argv) {
    using namespace mmco::cli;

    CLI::App app{"Memory-management policy predictor and co-scheduling simulator for integrated GPUs"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "csv";
    std::string pairing = "full-response";
    std::string mode;

    auto add_common = [&](CLI::App* sub, bool needs_workload) {
        if (needs_workload) {
            sub->add_option("--platform", cfg.platform_path, "Platform profile (JSON)")
                ->required()
                ->check(CLI::ExistingFile);
            sub->add_option("--workload", cfg.workload_path, "Workload document (JSON)")
                ->required()
                ->check(CLI::ExistingFile);
        }
        sub->add_option("--out", cfg.out_path, "Write output to this path instead of stdout");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "structured"}));
    };

    auto* predict = app.add_subcommand("predict", "Per-task overheads and best policy");
    add_common(predict, true);
    auto* assign = app.add_subcommand("assign", "Guideline-based policy assignment");
    add_common(assign, true);
    auto* simulate = app.add_subcommand("simulate", "Simulate co-execution and report");
    add_common(simulate, true);
    simulate->add_option("--mode", mode, "default | mo | co")->check(CLI::IsMember({"default", "mo", "co"}));
    simulate->add_option("--pairing", pairing, "Pairing fit rule")
        ->check(CLI::IsMember({"exec-only", "full-response"}));
    simulate->add_flag("--compare", cfg.compare, "Run all three modes side by side");
    auto* fit = app.add_subcommand("fit", "Fit transfer startup and per-byte rate");
    add_common(fit, false);
    fit->add_option("--fit-input", cfg.fit_input_path, "CSV with header bytes,ms")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: usage: " << e.what() << '\n';
        return kUsage;
    }

    if (predict->parsed()) cfg.command = Command::Predict;
    if (assign->parsed()) cfg.command = Command::Assign;
    if (simulate->parsed()) cfg.command = Command::Simulate;
    if (fit->parsed()) cfg.command = Command::Fit;
    cfg.format = format == "structured" ? mmco::Format::Structured : mmco::Format::Csv;
    cfg.pairing = pairing == "exec-only" ? mmco::PairingRule::ExecOnly : mmco::PairingRule::FullResponse;
    if (!mode.empty()) cfg.mode = parse_mode(mode);

    return run(cfg, std::cout, std::cerr);
}
