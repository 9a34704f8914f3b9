#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmco/model.hpp"

namespace mmco {

enum class Mode { Default, MemoryOptimized, CoOptimized };

inline constexpr std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Default: return "default";
    case Mode::MemoryOptimized: return "mo";
    case Mode::CoOptimized: return "co";
    }
    return "?";
}

enum class SegmentKind { Transfer, Idle, CpuFlush, Exec, Writeback };

inline constexpr std::string_view to_string(SegmentKind k) {
    switch (k) {
    case SegmentKind::Transfer: return "Transfer";
    case SegmentKind::Idle: return "Idle";
    case SegmentKind::CpuFlush: return "CpuFlush";
    case SegmentKind::Exec: return "Exec";
    case SegmentKind::Writeback: return "Writeback";
    }
    return "?";
}

struct Segment {
    std::string task;
    SegmentKind kind = SegmentKind::Exec;
    Millis start = 0;
    Millis end = 0;
    bool overlappable = false; // true only for Idle

    Millis duration() const { return end - start; }
    bool operator==(const Segment&) const = default;
};

/// One dispatched job. The job occupies `resident_bytes` of the shared pool
/// from its arrival until its completion.
struct JobRecord {
    std::string name;
    std::string task;
    Policy policy = Policy::Device;
    Millis arrival = 0;
    Millis release = 0;
    Millis completion = 0;
    Bytes resident_bytes = 0;
    bool paired = false;

    Millis response() const { return completion - arrival; }
    bool operator==(const JobRecord&) const = default;
};

struct Timeline {
    Mode mode = Mode::Default;
    std::vector<Segment> segments;
    std::vector<JobRecord> jobs;

    bool operator==(const Timeline&) const = default;
};

inline Bytes resident_footprint(Policy policy, Bytes data_footprint) {
    return policy == Policy::Device ? 2 * data_footprint : data_footprint;
}

/// First arrival to last completion. Falls back to the segment span when the
/// timeline carries no job records.
inline Millis makespan(const Timeline& t) {
    if (!t.jobs.empty()) {
        Millis first = t.jobs.front().arrival, last = t.jobs.front().completion;
        for (const auto& j : t.jobs) {
            first = std::min(first, j.arrival);
            last = std::max(last, j.completion);
        }
        return last - first;
    }
    if (t.segments.empty()) return 0;
    Millis first = t.segments.front().start, last = t.segments.front().end;
    for (const auto& s : t.segments) {
        first = std::min(first, s.start);
        last = std::max(last, s.end);
    }
    return last - first;
}

/// Time covered by at least one Exec segment divided by the makespan.
inline double gpu_utilization(const Timeline& t) {
    const Millis span = makespan(t);
    if (span <= 0) return 0;
    std::vector<std::pair<Millis, Millis>> exec;
    for (const auto& s : t.segments)
        if (s.kind == SegmentKind::Exec && s.end > s.start) exec.emplace_back(s.start, s.end);
    std::sort(exec.begin(), exec.end());
    Millis busy = 0;
    std::optional<std::pair<Millis, Millis>> cur;
    for (const auto& iv : exec) {
        if (cur && iv.first <= cur->second) {
            cur->second = std::max(cur->second, iv.second);
        } else {
            if (cur) busy += cur->second - cur->first;
            cur = iv;
        }
    }
    if (cur) busy += cur->second - cur->first;
    return std::clamp(busy / span, 0.0, 1.0);
}

struct MemorySweep {
    Bytes peak = 0;
    std::optional<Millis> first_overflow; // first instant the capacity is exceeded
};

/// Sweeps job residency intervals [arrival, completion). Departures at an
/// instant are applied before arrivals at the same instant.
inline MemorySweep sweep_memory(const Timeline& t, Bytes capacity) {
    struct Event {
        Millis time;
        int order; // 0 = departure, 1 = arrival
        Bytes delta;
    };
    std::vector<Event> events;
    for (const auto& j : t.jobs) {
        if (j.completion <= j.arrival) continue;
        events.push_back({j.arrival, 1, j.resident_bytes});
        events.push_back({j.completion, 0, -j.resident_bytes});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.order < b.order;
    });
    MemorySweep out;
    Bytes level = 0;
    for (const auto& e : events) {
        level += e.delta;
        if (e.order == 1) {
            out.peak = std::max(out.peak, level);
            if (!out.first_overflow && level > capacity) out.first_overflow = e.time;
        }
    }
    return out;
}

inline Bytes peak_memory(const Timeline& t) {
    return sweep_memory(t, std::numeric_limits<Bytes>::infinity()).peak;
}

/// Segment-sweep legality check. Returns one message per violation:
///  - segments of one task never overlap each other;
///  - CpuFlush and Writeback overlap nothing;
///  - two segments of different tasks may overlap only when exactly one of
///    them is an Idle segment (no Exec/Exec, Transfer/Exec, Idle/Idle);
///  - only Idle segments are marked overlappable, and end >= start.
inline std::vector<std::string> validate_timeline(const Timeline& t, Millis tolerance = 1e-9) {
    std::vector<std::string> problems;
    auto describe = [](const Segment& s) {
        return s.task + ":" + std::string(to_string(s.kind)) + "[" + std::to_string(s.start) + "," +
               std::to_string(s.end) + "]";
    };
    for (const auto& s : t.segments) {
        if (s.end < s.start) problems.push_back("negative duration " + describe(s));
        if (s.overlappable != (s.kind == SegmentKind::Idle))
            problems.push_back("overlappable flag mismatch " + describe(s));
    }

    std::vector<const Segment*> order;
    for (const auto& s : t.segments) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const Segment* a, const Segment* b) {
        return a->start < b->start;
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Segment& a = *order[i];
        for (std::size_t k = i + 1; k < order.size(); ++k) {
            const Segment& b = *order[k];
            if (b.start >= a.end - tolerance) break;
            if (std::min(a.end, b.end) - std::max(a.start, b.start) <= tolerance) continue;
            std::string why;
            if (a.task == b.task)
                why = "same-task overlap";
            else if (a.kind == SegmentKind::CpuFlush || a.kind == SegmentKind::Writeback ||
                     b.kind == SegmentKind::CpuFlush || b.kind == SegmentKind::Writeback)
                why = "overlap with non-interruptible cache maintenance";
            else if ((a.kind == SegmentKind::Idle) == (b.kind == SegmentKind::Idle))
                why = a.kind == SegmentKind::Idle ? "idle/idle overlap" : "busy/busy overlap";
            if (!why.empty()) problems.push_back(why + ": " + describe(a) + " vs " + describe(b));
        }
    }
    return problems;
}

} // namespace mmco
