#pragma once

// Text renderings of reports and timelines. Numbers use the shortest
// round-trip decimal form so output is byte-stable for identical inputs.

#include <charconv>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mmco/simulator.hpp"

namespace mmco {

enum class Format { Csv, Structured };

inline std::string format_number(double v) {
    if (v == 0) return "0"; // folds -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

// ---------------------------------------------------------------------------
// Timeline

inline std::string timeline_csv(const Timeline& t) {
    std::ostringstream os;
    os << "task,kind,start_ms,end_ms,overlappable\n";
    for (const auto& s : t.segments)
        os << s.task << ',' << to_string(s.kind) << ',' << format_number(s.start) << ','
           << format_number(s.end) << ',' << (s.overlappable ? "true" : "false") << '\n';
    return os.str();
}

inline nlohmann::ordered_json timeline_json(const Timeline& t) {
    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (const auto& s : t.segments)
        segs.push_back({{"task", s.task},
                        {"kind", to_string(s.kind)},
                        {"start_ms", s.start},
                        {"end_ms", s.end},
                        {"overlappable", s.overlappable}});
    nlohmann::ordered_json jobs = nlohmann::ordered_json::array();
    for (const auto& j : t.jobs)
        jobs.push_back({{"name", j.name},
                        {"policy", to_string(j.policy)},
                        {"arrival_ms", j.arrival},
                        {"release_ms", j.release},
                        {"completion_ms", j.completion},
                        {"resident_bytes", j.resident_bytes},
                        {"paired", j.paired}});
    return {{"mode", to_string(t.mode)}, {"segments", std::move(segs)}, {"jobs", std::move(jobs)}};
}

inline std::string render_timeline(const Timeline& t, Format f) {
    return f == Format::Csv ? timeline_csv(t) : timeline_json(t).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SimReport as flat key/value

inline std::vector<std::pair<std::string, std::string>> report_fields(const SimReport& r) {
    std::vector<std::pair<std::string, std::string>> kv{
        {"mode", std::string(to_string(r.mode))},
        {"makespan_ms", format_number(r.makespan)},
        {"peak_memory_bytes", format_number(r.peak_memory)},
        {"total_memory_bytes", format_number(r.total_memory)},
        {"gpu_utilization", format_number(r.gpu_utilization)},
        {"oom", r.oom ? "true" : "false"},
        {"oom_at_ms", r.oom_at ? format_number(*r.oom_at) : ""},
        {"pairs", std::to_string(r.pairs)},
    };
    for (const auto& [name, ms] : r.responses) kv.emplace_back("response_ms." + name, format_number(ms));
    return kv;
}

inline std::string render_report(const SimReport& r, Format f) {
    if (f == Format::Csv) {
        std::ostringstream os;
        os << "key,value\n";
        for (const auto& [k, v] : report_fields(r)) os << k << ',' << v << '\n';
        return os.str();
    }
    nlohmann::ordered_json j;
    j["mode"] = to_string(r.mode);
    j["makespan_ms"] = r.makespan;
    j["peak_memory_bytes"] = r.peak_memory;
    j["total_memory_bytes"] = r.total_memory;
    j["gpu_utilization"] = r.gpu_utilization;
    j["oom"] = r.oom;
    j["oom_at_ms"] = r.oom_at ? nlohmann::ordered_json(*r.oom_at) : nlohmann::ordered_json(nullptr);
    j["pairs"] = r.pairs;
    for (const auto& [name, ms] : r.responses) j["response_ms." + name] = ms;
    return j.dump(2) + "\n";
}

inline std::string render_comparison(const SimReport& d, const SimReport& mo, const SimReport& co, Format f) {
    const auto a = report_fields(d), b = report_fields(mo), c = report_fields(co);
    if (f == Format::Csv) {
        std::ostringstream os;
        os << "metric,default,mo,co\n";
        for (std::size_t i = 1; i < a.size(); ++i)
            os << a[i].first << ',' << a[i].second << ',' << b[i].second << ',' << c[i].second << '\n';
        return os.str();
    }
    nlohmann::ordered_json j;
    j["default"] = nlohmann::ordered_json::parse(render_report(d, f));
    j["mo"] = nlohmann::ordered_json::parse(render_report(mo, f));
    j["co"] = nlohmann::ordered_json::parse(render_report(co, f));
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Model tables

inline std::string render_predictions(const std::vector<TaskProfile>& tasks, const PlatformProfile& p, Format f) {
    if (f == Format::Csv) {
        std::ostringstream os;
        os << "task,O_D,O_M,O_H,I,best\n";
        for (const auto& t : tasks) {
            const auto c = best_policy(t, p);
            os << t.name << ',' << format_number(c.overheads.o_d) << ',' << format_number(c.overheads.o_m) << ','
               << format_number(c.overheads.o_h) << ',' << format_number(c.overheads.idle) << ','
               << to_string(c.policy) << '\n';
        }
        return os.str();
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& t : tasks) {
        const auto c = best_policy(t, p);
        rows.push_back({{"task", t.name},
                        {"O_D", c.overheads.o_d},
                        {"O_M", c.overheads.o_m},
                        {"O_H", c.overheads.o_h},
                        {"I", c.overheads.idle},
                        {"best", to_string(c.policy)}});
    }
    return rows.dump(2) + "\n";
}

inline std::string render_assignment(const PolicyAssignment& a, Format f) {
    if (f == Format::Csv) {
        std::ostringstream os;
        os << "task,policy,O_D,O_M,O_H,I,recoverable,converted\n";
        for (const auto& e : a.entries)
            os << e.task << ',' << to_string(e.policy) << ',' << format_number(e.overheads.o_d) << ','
               << format_number(e.overheads.o_m) << ',' << format_number(e.overheads.o_h) << ','
               << format_number(e.overheads.idle) << ',' << format_number(e.recoverable()) << ','
               << (e.converted ? "true" : "false") << '\n';
        return os.str();
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& e : a.entries)
        rows.push_back({{"task", e.task},
                        {"policy", to_string(e.policy)},
                        {"O_D", e.overheads.o_d},
                        {"O_M", e.overheads.o_m},
                        {"O_H", e.overheads.o_h},
                        {"I", e.overheads.idle},
                        {"recoverable", e.recoverable()},
                        {"converted", e.converted}});
    return rows.dump(2) + "\n";
}

} // namespace mmco
