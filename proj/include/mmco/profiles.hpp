#pragma once

// Platform and workload descriptions: schema, validation, JSON I/O, and the
// affine transfer-time fit used to calibrate tr_ini / l_hd / l_dh.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmco/error.hpp"

namespace mmco {

using Millis = double;
using Bytes = double;

/// Hardware constants obtained by microbenchmarking. Rates are per byte,
/// latencies per access, flush times are whole-cache upper bounds.
struct PlatformProfile {
    Millis tr_ini = 0;          // transfer startup (latency + send overhead)
    Millis l_hd = 0;            // per byte, host -> device copy
    Millis l_dh = 0;            // per byte, device -> host copy
    Millis l_ini = 0;           // per byte, first-touch of host destination
    Millis l_mapping = 0;       // per byte, GPU page create + map
    Millis l_mem_access = 0;    // per access, GPU main memory
    Millis l_gcache_access = 0; // per access, GPU L2
    Millis l_writeback = 0;     // per byte, dirty-line writeback
    Millis ca_cpu = 0;          // full CPU cache flush
    Millis ca_gpu = 0;          // full GPU cache flush
    Bytes total_memory = 0;     // shared pool capacity

    bool operator==(const PlatformProfile&) const = default;
};

struct KernelProfile {
    Bytes data_size = 0;
    Bytes bytes_written = 0;
    Millis exec_time = 0;
    bool dirty_cache_launch = false;
    double ipl = 0;
    double tpl = 0;
    double max_parallelism = 0;

    bool operator==(const KernelProfile&) const = default;
};

struct TaskProfile {
    std::string name;
    std::vector<KernelProfile> kernels;
    std::uint64_t n_memcpy = 0;
    Bytes bytes_hd = 0;
    Bytes bytes_dh = 0;
    std::uint64_t n_l2 = 0;
    double l2_hit_rate = 0;
    Bytes data_footprint = 0;
    bool first_touch = false;

    bool operator==(const TaskProfile&) const = default;
};

struct Arrival {
    std::string task;
    Millis t_ms = 0;

    bool operator==(const Arrival&) const = default;
};

struct WorkloadTrace {
    std::vector<Arrival> arrivals;

    bool operator==(const WorkloadTrace&) const = default;
};

struct Workload {
    std::vector<TaskProfile> tasks;
    WorkloadTrace trace;

    bool operator==(const Workload&) const = default;

    const TaskProfile* find(std::string_view name) const {
        for (const auto& t : tasks)
            if (t.name == name) return &t;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void require_non_negative(double value, const std::string& field) {
    if (!std::isfinite(value))
        throw Error(ErrorKind::Invariant, field, field + " must be finite");
    if (value < 0)
        throw Error(ErrorKind::Invariant, field, field + " must be >= 0");
}

} // namespace detail

inline void validate(const PlatformProfile& p) {
    using detail::require_non_negative;
    require_non_negative(p.tr_ini, "tr_ini");
    require_non_negative(p.l_hd, "l_hd");
    require_non_negative(p.l_dh, "l_dh");
    require_non_negative(p.l_ini, "l_ini");
    require_non_negative(p.l_mapping, "l_mapping");
    require_non_negative(p.l_mem_access, "l_mem_access");
    require_non_negative(p.l_gcache_access, "l_gcache_access");
    require_non_negative(p.l_writeback, "l_writeback");
    require_non_negative(p.ca_cpu, "ca_cpu");
    require_non_negative(p.ca_gpu, "ca_gpu");
    require_non_negative(p.total_memory, "total_memory");
    if (p.total_memory <= 0)
        throw Error(ErrorKind::Invariant, "total_memory", "total_memory must be > 0");
    if (p.l_mem_access < p.l_gcache_access)
        throw Error(ErrorKind::Invariant, "l_gcache_access",
                    "l_gcache_access must not exceed l_mem_access");
}

inline void validate(const KernelProfile& k, const std::string& prefix = "") {
    using detail::require_non_negative;
    require_non_negative(k.data_size, prefix + "data_size");
    require_non_negative(k.bytes_written, prefix + "bytes_written");
    require_non_negative(k.exec_time, prefix + "exec_time");
    require_non_negative(k.ipl, prefix + "ipl");
    require_non_negative(k.tpl, prefix + "tpl");
    require_non_negative(k.max_parallelism, prefix + "max_parallelism");
    if (k.bytes_written > k.data_size)
        throw Error(ErrorKind::Invariant, prefix + "bytes_written",
                    prefix + "bytes_written must not exceed data_size");
}

inline void validate(const TaskProfile& t, const std::string& prefix = "") {
    using detail::require_non_negative;
    if (t.name.empty())
        throw Error(ErrorKind::Invariant, prefix + "name", prefix + "name must be non-empty");
    if (t.kernels.empty())
        throw Error(ErrorKind::Invariant, prefix + "kernels",
                    "task '" + t.name + "' must have at least one kernel");
    for (std::size_t i = 0; i < t.kernels.size(); ++i)
        validate(t.kernels[i], prefix + "kernels[" + std::to_string(i) + "].");
    require_non_negative(t.bytes_hd, prefix + "bytes_hd");
    require_non_negative(t.bytes_dh, prefix + "bytes_dh");
    require_non_negative(t.l2_hit_rate, prefix + "l2_hit_rate");
    require_non_negative(t.data_footprint, prefix + "data_footprint");
    if (t.l2_hit_rate > 1)
        throw Error(ErrorKind::Invariant, prefix + "l2_hit_rate", prefix + "l2_hit_rate must be <= 1");
    if (t.data_footprint < std::max(t.bytes_hd, t.bytes_dh))
        throw Error(ErrorKind::Invariant, prefix + "data_footprint",
                    prefix + "data_footprint must be >= max(bytes_hd, bytes_dh)");
}

inline void validate(const Workload& w) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < w.tasks.size(); ++i) {
        const std::string prefix = "tasks[" + std::to_string(i) + "].";
        validate(w.tasks[i], prefix);
        if (!names.insert(w.tasks[i].name).second)
            throw Error(ErrorKind::Reference, prefix + "name",
                        "duplicate task name '" + w.tasks[i].name + "'");
    }
    for (std::size_t i = 0; i < w.trace.arrivals.size(); ++i) {
        const auto& a = w.trace.arrivals[i];
        const std::string prefix = "arrivals[" + std::to_string(i) + "].";
        detail::require_non_negative(a.t_ms, prefix + "t_ms");
        if (!names.contains(a.task))
            throw Error(ErrorKind::Reference, prefix + "task",
                        "arrival references unknown task '" + a.task + "'");
    }
}

// ---------------------------------------------------------------------------
// JSON documents

namespace detail {

using nlohmann::json;

class ObjectReader {
public:
    ObjectReader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
        if (!j_.is_object())
            throw Error(ErrorKind::Parse, prefix_, "expected an object at '" + where() + "'");
    }

    double number(const char* key) const {
        const json& v = at(key);
        if (!v.is_number())
            throw Error(ErrorKind::Parse, path(key), "field '" + path(key) + "' must be numeric");
        return v.get<double>();
    }

    std::uint64_t count(const char* key) const {
        const double v = number(key);
        if (v < 0 || v != std::floor(v) || v > 9.0e15)
            throw Error(ErrorKind::Invariant, path(key),
                        "field '" + path(key) + "' must be a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }

    bool boolean(const char* key) const {
        const json& v = at(key);
        if (!v.is_boolean())
            throw Error(ErrorKind::Parse, path(key), "field '" + path(key) + "' must be a boolean");
        return v.get<bool>();
    }

    std::string string(const char* key) const {
        const json& v = at(key);
        if (!v.is_string())
            throw Error(ErrorKind::Parse, path(key), "field '" + path(key) + "' must be a string");
        return v.get<std::string>();
    }

    const json& array(const char* key) const {
        const json& v = at(key);
        if (!v.is_array())
            throw Error(ErrorKind::Parse, path(key), "field '" + path(key) + "' must be an array");
        return v;
    }

    void reject_unknown(std::initializer_list<std::string_view> known) const {
        for (const auto& [key, _] : j_.items()) {
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw Error(ErrorKind::Parse, prefix_ + key, "unknown field '" + prefix_ + key + "'");
        }
    }

    std::string path(const char* key) const { return prefix_ + key; }

private:
    std::string where() const { return prefix_.empty() ? "<root>" : prefix_; }

    const json& at(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end())
            throw Error(ErrorKind::Parse, path(key), "missing field '" + path(key) + "'");
        return *it;
    }

    const json& j_;
    std::string prefix_;
};

inline json parse_document(std::string_view text) {
    json j = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw Error(ErrorKind::Parse, "", "document is not well-formed JSON");
    return j;
}

inline KernelProfile read_kernel(const json& j, const std::string& prefix) {
    ObjectReader r(j, prefix);
    r.reject_unknown({"data_size", "bytes_written", "exec_time", "dirty_cache_launch", "ipl", "tpl",
                      "max_parallelism"});
    KernelProfile k;
    k.data_size = r.number("data_size");
    k.bytes_written = r.number("bytes_written");
    k.exec_time = r.number("exec_time");
    k.dirty_cache_launch = r.boolean("dirty_cache_launch");
    k.ipl = r.number("ipl");
    k.tpl = r.number("tpl");
    k.max_parallelism = r.number("max_parallelism");
    return k;
}

inline TaskProfile read_task(const json& j, const std::string& prefix) {
    ObjectReader r(j, prefix);
    r.reject_unknown({"name", "kernels", "n_memcpy", "bytes_hd", "bytes_dh", "n_l2", "l2_hit_rate",
                      "data_footprint", "first_touch"});
    TaskProfile t;
    t.name = r.string("name");
    const json& kernels = r.array("kernels");
    for (std::size_t i = 0; i < kernels.size(); ++i)
        t.kernels.push_back(read_kernel(kernels[i], prefix + "kernels[" + std::to_string(i) + "]."));
    t.n_memcpy = r.count("n_memcpy");
    t.bytes_hd = r.number("bytes_hd");
    t.bytes_dh = r.number("bytes_dh");
    t.n_l2 = r.count("n_l2");
    t.l2_hit_rate = r.number("l2_hit_rate");
    t.data_footprint = r.number("data_footprint");
    t.first_touch = r.boolean("first_touch");
    return t;
}

} // namespace detail

/// Parses and validates a platform document. Throws mmco::Error naming the
/// offending field; never returns a partially filled profile.
inline PlatformProfile load_platform_profile(std::string_view text) {
    const auto j = detail::parse_document(text);
    detail::ObjectReader r(j, "");
    r.reject_unknown({"tr_ini", "l_hd", "l_dh", "l_ini", "l_mapping", "l_mem_access", "l_gcache_access",
                      "l_writeback", "ca_cpu", "ca_gpu", "total_memory"});
    PlatformProfile p;
    p.tr_ini = r.number("tr_ini");
    p.l_hd = r.number("l_hd");
    p.l_dh = r.number("l_dh");
    p.l_ini = r.number("l_ini");
    p.l_mapping = r.number("l_mapping");
    p.l_mem_access = r.number("l_mem_access");
    p.l_gcache_access = r.number("l_gcache_access");
    p.l_writeback = r.number("l_writeback");
    p.ca_cpu = r.number("ca_cpu");
    p.ca_gpu = r.number("ca_gpu");
    p.total_memory = r.number("total_memory");
    validate(p);
    return p;
}

inline Workload load_workload(std::string_view text) {
    const auto j = detail::parse_document(text);
    detail::ObjectReader r(j, "");
    r.reject_unknown({"tasks", "arrivals"});
    Workload w;
    const auto& tasks = r.array("tasks");
    for (std::size_t i = 0; i < tasks.size(); ++i)
        w.tasks.push_back(detail::read_task(tasks[i], "tasks[" + std::to_string(i) + "]."));
    const auto& arrivals = r.array("arrivals");
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        detail::ObjectReader a(arrivals[i], "arrivals[" + std::to_string(i) + "].");
        a.reject_unknown({"task", "t_ms"});
        w.trace.arrivals.push_back({a.string("task"), a.number("t_ms")});
    }
    validate(w);
    return w;
}

inline nlohmann::json to_json(const PlatformProfile& p) {
    return {
        {"tr_ini", p.tr_ini},
        {"l_hd", p.l_hd},
        {"l_dh", p.l_dh},
        {"l_ini", p.l_ini},
        {"l_mapping", p.l_mapping},
        {"l_mem_access", p.l_mem_access},
        {"l_gcache_access", p.l_gcache_access},
        {"l_writeback", p.l_writeback},
        {"ca_cpu", p.ca_cpu},
        {"ca_gpu", p.ca_gpu},
        {"total_memory", p.total_memory},
    };
}

inline nlohmann::json to_json(const KernelProfile& k) {
    return {
        {"data_size", k.data_size},
        {"bytes_written", k.bytes_written},
        {"exec_time", k.exec_time},
        {"dirty_cache_launch", k.dirty_cache_launch},
        {"ipl", k.ipl},
        {"tpl", k.tpl},
        {"max_parallelism", k.max_parallelism},
    };
}

inline nlohmann::json to_json(const TaskProfile& t) {
    nlohmann::json kernels = nlohmann::json::array();
    for (const auto& k : t.kernels) kernels.push_back(to_json(k));
    return {
        {"name", t.name},
        {"kernels", std::move(kernels)},
        {"n_memcpy", t.n_memcpy},
        {"bytes_hd", t.bytes_hd},
        {"bytes_dh", t.bytes_dh},
        {"n_l2", t.n_l2},
        {"l2_hit_rate", t.l2_hit_rate},
        {"data_footprint", t.data_footprint},
        {"first_touch", t.first_touch},
    };
}

inline nlohmann::json to_json(const Workload& w) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : w.tasks) tasks.push_back(to_json(t));
    nlohmann::json arrivals = nlohmann::json::array();
    for (const auto& a : w.trace.arrivals) arrivals.push_back({{"task", a.task}, {"t_ms", a.t_ms}});
    return {{"tasks", std::move(tasks)}, {"arrivals", std::move(arrivals)}};
}

inline std::string serialize(const PlatformProfile& p) { return to_json(p).dump(2) + "\n"; }
inline std::string serialize(const Workload& w) { return to_json(w).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Transfer-time calibration

struct TransferSample {
    Bytes bytes = 0;
    Millis ms = 0;
};

struct TransferFit {
    Millis tr_ini = 0;
    Millis rate = 0; // ms per byte
    bool clamped = false;
};

/// Reads a two-column `bytes,ms` CSV with a header row. Blank lines are skipped.
inline std::vector<TransferSample> load_transfer_samples(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    auto parse_number = [](std::string_view s, std::size_t line) {
        double v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
            throw Error(ErrorKind::Parse, "line " + std::to_string(line),
                        "line " + std::to_string(line) + ": '" + std::string(s) + "' is not a number");
        return v;
    };

    std::vector<TransferSample> samples;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = trim(rest.substr(0, nl));
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no),
                        "line " + std::to_string(line_no) + ": expected two columns");
        const auto first = trim(line.substr(0, comma));
        const auto second = trim(line.substr(comma + 1));
        if (!header_seen) {
            if (first != "bytes" || second != "ms")
                throw Error(ErrorKind::Parse, "header", "expected header row 'bytes,ms'");
            header_seen = true;
            continue;
        }
        const double bytes = parse_number(first, line_no);
        const double ms = parse_number(second, line_no);
        if (bytes < 0 || ms < 0)
            throw Error(ErrorKind::Invariant, "line " + std::to_string(line_no),
                        "line " + std::to_string(line_no) + ": values must be >= 0");
        samples.push_back({bytes, ms});
    }
    if (!header_seen) throw Error(ErrorKind::Parse, "header", "expected header row 'bytes,ms'");
    return samples;
}

/// Ordinary least-squares fit of `ms = tr_ini + rate * bytes`. A negative
/// intercept or slope is clamped to zero and reported through `clamped`.
inline TransferFit fit_transfer_params(std::span<const TransferSample> samples) {
    std::set<double> sizes;
    for (const auto& s : samples) sizes.insert(s.bytes);
    if (samples.size() < 2 || sizes.size() < 2)
        throw Error(ErrorKind::Degenerate, "bytes", "fit needs at least two distinct sample sizes");

    const double n = static_cast<double>(samples.size());
    double mean_x = 0, mean_y = 0;
    for (const auto& s : samples) {
        mean_x += s.bytes;
        mean_y += s.ms;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0, sxy = 0;
    for (const auto& s : samples) {
        const double dx = s.bytes - mean_x;
        sxx += dx * dx;
        sxy += dx * (s.ms - mean_y);
    }
    TransferFit fit;
    fit.rate = sxy / sxx;
    fit.tr_ini = mean_y - fit.rate * mean_x;
    if (fit.rate < 0) {
        fit.rate = 0;
        fit.clamped = true;
    }
    if (fit.tr_ini < 0) {
        fit.tr_ini = 0;
        fit.clamped = true;
    }
    return fit;
}

} // namespace mmco
