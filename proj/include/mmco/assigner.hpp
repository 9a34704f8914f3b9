#pragma once

// Footprint-driven conversion of Device tasks to Managed / HostPinned.
//
// A task is converted only when its extra overhead is covered by the part of
// its idle period that another kernel could fill (per-task check), and the
// number of converted tasks never exceeds the number left on Device (global
// quota, so every converted task can find a Device partner to overlap).

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmco/model.hpp"

namespace mmco {

/// Recoverable overhead if the task were converted to `target` (M or H).
/// Negative values mean nothing can be recovered.
inline Millis recoverable_portion(const PolicyOverheads& o, const PlatformProfile& p, Policy target) {
    return target == Policy::HostPinned ? o.idle - o.t_c : o.idle - p.ca_cpu - p.ca_gpu;
}

inline Millis recoverable_portion(const TaskProfile& task, const PlatformProfile& p, Policy target) {
    return recoverable_portion(compute_overheads(task, p), p, target);
}

inline bool satisfies_guideline1(const PolicyOverheads& o, const PlatformProfile& p, Policy target) {
    if (target == Policy::Device) return true;
    return o.of(target) - o.o_d <= recoverable_portion(o, p, target);
}

inline std::optional<Policy> guideline1_eligible(const PolicyOverheads& o, const PlatformProfile& p) {
    const bool m_ok = satisfies_guideline1(o, p, Policy::Managed);
    const bool h_ok = satisfies_guideline1(o, p, Policy::HostPinned);
    if (m_ok && h_ok) return o.o_h < o.o_m ? Policy::HostPinned : Policy::Managed;
    if (m_ok) return Policy::Managed;
    if (h_ok) return Policy::HostPinned;
    return std::nullopt;
}

inline std::optional<Policy> guideline1_eligible(const TaskProfile& task, const PlatformProfile& p) {
    return guideline1_eligible(compute_overheads(task, p), p);
}

/// Largest number of conversions that keeps converted <= remaining Device.
inline std::size_t conversion_quota(std::size_t task_count) { return task_count / 2; }

struct TaskAssignment {
    std::string task;
    Policy policy = Policy::Device;
    PolicyOverheads overheads;
    Millis recoverable_m = 0;
    Millis recoverable_h = 0;
    bool converted = false;

    Millis recoverable() const {
        return policy == Policy::HostPinned ? recoverable_h : recoverable_m;
    }

    bool operator==(const TaskAssignment&) const = default;
};

struct PolicyAssignment {
    std::vector<TaskAssignment> entries; // same order as the input tasks

    std::size_t count(Policy p) const {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [p](const auto& e) { return e.policy == p; }));
    }

    const TaskAssignment* find(std::string_view name) const {
        for (const auto& e : entries)
            if (e.task == name) return &e;
        return nullptr;
    }

    bool operator==(const PolicyAssignment&) const = default;
};

/// Starts every task on Device and converts guideline-eligible tasks in
/// descending order of recoverable overhead (ties by name) until the quota
/// is exhausted.
inline PolicyAssignment assign_policies(std::span<const TaskProfile> tasks, const PlatformProfile& p) {
    PolicyAssignment out;
    std::vector<std::optional<Policy>> eligible;
    out.entries.reserve(tasks.size());
    for (const auto& task : tasks) {
        TaskAssignment e;
        e.task = task.name;
        e.overheads = compute_overheads(task, p);
        e.recoverable_m = recoverable_portion(e.overheads, p, Policy::Managed);
        e.recoverable_h = recoverable_portion(e.overheads, p, Policy::HostPinned);
        eligible.push_back(guideline1_eligible(e.overheads, p));
        out.entries.push_back(std::move(e));
    }

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (eligible[i]) candidates.push_back(i);

    auto recoverable_for = [&](std::size_t i) {
        return recoverable_portion(out.entries[i].overheads, p, *eligible[i]);
    };
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        const Millis ra = recoverable_for(a), rb = recoverable_for(b);
        if (ra != rb) return ra > rb;
        if (out.entries[a].task != out.entries[b].task) return out.entries[a].task < out.entries[b].task;
        return a < b;
    });

    const std::size_t quota = conversion_quota(tasks.size());
    for (std::size_t n = 0; n < candidates.size() && n < quota; ++n) {
        auto& e = out.entries[candidates[n]];
        e.policy = *eligible[candidates[n]];
        e.converted = true;
    }
    return out;
}

} // namespace mmco
