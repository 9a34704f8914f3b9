#pragma once

// Command dispatch behind the `mmco` tool. Data goes to `out`, diagnostics
// to `err`; every failure emits one `error: <kind>: <message>` line.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mmco/export.hpp"

namespace mmco::cli {

enum class Command { Predict, Assign, Simulate, Fit };

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParseError = 2,
    kInvariantViolation = 3,
    kOomDetected = 4,
    kIoFailure = 5,
};

struct RunConfig {
    Command command = Command::Predict;
    std::string platform_path;
    std::string workload_path;
    std::string fit_input_path;
    std::optional<Mode> mode;
    Format format = Format::Csv;
    PairingRule pairing = PairingRule::FullResponse;
    std::string out_path; // empty = stdout
    bool compare = false;
};

inline std::optional<Mode> parse_mode(std::string_view s) {
    if (s == "default") return Mode::Default;
    if (s == "mo") return Mode::MemoryOptimized;
    if (s == "co") return Mode::CoOptimized;
    return std::nullopt;
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, path, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, path, "cannot write '" + path + "'");
    out << body;
    if (!out) throw Error(ErrorKind::Io, path, "write failed for '" + path + "'");
}

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return kParseError;
    case ErrorKind::Io: return kIoFailure;
    case ErrorKind::Invariant:
    case ErrorKind::Reference:
    case ErrorKind::Degenerate:
    case ErrorKind::Limit: return kInvariantViolation;
    }
    return kUsage;
}

inline std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

/// Timeline file next to the report: `<out>.timeline.csv|json`.
inline std::string timeline_path(const std::string& out, Format f) {
    return out + (f == Format::Csv ? ".timeline.csv" : ".timeline.json");
}

} // namespace detail

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        auto emit = [&](const std::string& body) {
            if (cfg.out_path.empty())
                out << body;
            else
                detail::write_file(cfg.out_path, body);
        };

        if (cfg.command == Command::Fit) {
            if (cfg.fit_input_path.empty()) {
                err << "error: usage: fit requires --fit-input\n";
                return kUsage;
            }
            const auto samples = load_transfer_samples(detail::read_file(cfg.fit_input_path));
            const auto fit = fit_transfer_params(samples);
            if (fit.clamped) err << "warning: negative fit parameter clamped to 0\n";
            std::string body;
            if (cfg.format == Format::Csv) {
                body = "tr_ini,rate\n" + format_number(fit.tr_ini) + "," + format_number(fit.rate) + "\n";
            } else {
                nlohmann::ordered_json j{{"tr_ini", fit.tr_ini}, {"rate", fit.rate}, {"clamped", fit.clamped}};
                body = j.dump(2) + "\n";
            }
            emit(body);
            return kOk;
        }

        if (cfg.platform_path.empty() || cfg.workload_path.empty()) {
            err << "error: usage: --platform and --workload are required\n";
            return kUsage;
        }
        const auto platform = load_platform_profile(detail::read_file(cfg.platform_path));
        const auto workload = load_workload(detail::read_file(cfg.workload_path));

        switch (cfg.command) {
        case Command::Predict:
            emit(render_predictions(workload.tasks, platform, cfg.format));
            return kOk;
        case Command::Assign:
            emit(render_assignment(assign_policies(workload.tasks, platform), cfg.format));
            return kOk;
        case Command::Simulate: {
            const SimOptions opts{cfg.pairing};
            if (cfg.compare) {
                auto run_mode = [&](Mode m) { return simulate(workload, platform, m, opts).report; };
                auto d = std::async(std::launch::async, run_mode, Mode::Default);
                auto mo = std::async(std::launch::async, run_mode, Mode::MemoryOptimized);
                auto co = std::async(std::launch::async, run_mode, Mode::CoOptimized);
                const auto rd = d.get(), rmo = mo.get(), rco = co.get();
                emit(render_comparison(rd, rmo, rco, cfg.format));
                return (rd.oom || rmo.oom || rco.oom) ? kOomDetected : kOk;
            }
            if (!cfg.mode) {
                err << "error: usage: simulate requires --mode <default|mo|co> or --compare\n";
                return kUsage;
            }
            const auto result = simulate(workload, platform, *cfg.mode, opts);
            if (cfg.out_path.empty()) {
                out << render_report(result.report, cfg.format);
                out << render_timeline(result.timeline, cfg.format);
            } else {
                detail::write_file(cfg.out_path, render_report(result.report, cfg.format));
                detail::write_file(detail::timeline_path(cfg.out_path, cfg.format),
                                   render_timeline(result.timeline, cfg.format));
            }
            if (result.report.oom) {
                err << "error: oom: resident footprint exceeds total_memory at t="
                    << format_number(*result.report.oom_at) << " ms\n";
                return kOomDetected;
            }
            return kOk;
        }
        case Command::Fit: break;
        }
        return kOk;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << detail::one_line(e.what()) << '\n';
        return detail::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: internal: " << detail::one_line(e.what()) << '\n';
        return kUsage;
    }
}

} // namespace mmco::cli
