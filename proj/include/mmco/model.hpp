#pragma once

// Analytical overhead of the three GPU memory-management policies. Overhead
// is the predicted GPU response time minus the pure kernel execution time.

#include <array>
#include <string_view>

#include "mmco/profiles.hpp"

namespace mmco {

enum class Policy { Device, Managed, HostPinned };

inline constexpr std::array<Policy, 3> kAllPolicies{Policy::Device, Policy::Managed, Policy::HostPinned};

inline constexpr std::string_view to_string(Policy p) {
    switch (p) {
    case Policy::Device: return "D";
    case Policy::Managed: return "M";
    case Policy::HostPinned: return "H";
    }
    return "?";
}

struct PolicyOverheads {
    Millis o_d = 0;
    Millis o_m = 0;
    Millis o_h = 0;
    Millis t_l = 0;
    Millis t_s = 0;
    Millis t_c = 0;
    Millis idle = 0;

    Millis of(Policy p) const {
        switch (p) {
        case Policy::Device: return o_d;
        case Policy::Managed: return o_m;
        case Policy::HostPinned: return o_h;
        }
        return 0;
    }

    bool operator==(const PolicyOverheads&) const = default;
};

inline Millis total_exec_time(const TaskProfile& task) {
    Millis sum = 0;
    for (const auto& k : task.kernels) sum += k.exec_time;
    return sum;
}

inline std::size_t dirty_launch_count(const TaskProfile& task) {
    std::size_t n = 0;
    for (const auto& k : task.kernels) n += k.dirty_cache_launch ? 1 : 0;
    return n;
}

/// Synchronous copy cost under Device: startup per copy plus per-byte cost in
/// each direction. First-touch initialization only applies device -> host.
inline Millis overhead_device(const TaskProfile& task, const PlatformProfile& p) {
    const double dh_rate = p.l_dh + (task.first_touch ? p.l_ini : 0.0);
    return static_cast<double>(task.n_memcpy) * p.tr_ini + dh_rate * task.bytes_dh + p.l_hd * task.bytes_hd;
}

/// T_l: page mapping plus a CPU flush for every launch on dirty managed data.
inline Millis launch_overhead(const TaskProfile& task, const PlatformProfile& p) {
    Millis sum = 0;
    for (const auto& k : task.kernels)
        if (k.dirty_cache_launch) sum += k.data_size * p.l_mapping + p.ca_cpu;
    return sum;
}

/// T_s: per-kernel writeback, each capped by a full GPU flush.
inline Millis completion_overhead(const TaskProfile& task, const PlatformProfile& p) {
    Millis sum = 0;
    for (const auto& k : task.kernels) sum += std::min(k.bytes_written * p.l_writeback, p.ca_gpu);
    // Each term is capped at ca_gpu, so the sum is bounded by N*ca_gpu;
    // the clamp only absorbs rounding from adding many capped terms.
    return std::min(sum, static_cast<double>(task.kernels.size()) * p.ca_gpu);
}

inline Millis overhead_managed(const TaskProfile& task, const PlatformProfile& p) {
    return launch_overhead(task, p) + completion_overhead(task, p);
}

/// T_c: cache-miss penalty of bypassing L2. The task-level L2 access count is
/// split across kernels by execution-time share (equal split when the task
/// has zero execution time). A kernel whose ILP*TLP falls below its peak
/// parallelism hides the penalty entirely.
inline Millis cache_penalty(const TaskProfile& task, const PlatformProfile& p) {
    const double miss_penalty = p.l_mem_access - p.l_gcache_access;
    const Millis exec = total_exec_time(task);
    const double n = static_cast<double>(task.kernels.size());
    const double accesses = static_cast<double>(task.n_l2);
    Millis sum = 0;
    for (const auto& k : task.kernels) {
        if (k.ipl * k.tpl < k.max_parallelism) continue;
        const double share = exec > 0 ? k.exec_time / exec : 1.0 / n;
        sum += task.l2_hit_rate * accesses * share * miss_penalty;
    }
    return sum;
}

/// Mapping cost charged to every kernel under HostPinned.
inline Millis hostpinned_mapping(const TaskProfile& task, const PlatformProfile& p) {
    Millis sum = 0;
    for (const auto& k : task.kernels) sum += k.data_size * p.l_mapping;
    return sum;
}

inline Millis overhead_hostpinned(const TaskProfile& task, const PlatformProfile& p) {
    return cache_penalty(task, p) + hostpinned_mapping(task, p);
}

/// I: the mapping part of T_l, during which the GPU sits idle and another
/// kernel may run. Flush costs are excluded since they cannot be overlapped.
inline Millis idle_period(const TaskProfile& task, const PlatformProfile& p) {
    Millis sum = 0;
    for (const auto& k : task.kernels)
        if (k.dirty_cache_launch) sum += k.data_size * p.l_mapping;
    return sum;
}

inline PolicyOverheads compute_overheads(const TaskProfile& task, const PlatformProfile& p) {
    PolicyOverheads o;
    o.o_d = overhead_device(task, p);
    o.t_l = launch_overhead(task, p);
    o.t_s = completion_overhead(task, p);
    o.o_m = o.t_l + o.t_s;
    o.t_c = cache_penalty(task, p);
    o.o_h = o.t_c + hostpinned_mapping(task, p);
    o.idle = idle_period(task, p);
    return o;
}

inline Millis policy_overhead(const TaskProfile& task, const PlatformProfile& p, Policy policy) {
    switch (policy) {
    case Policy::Device: return overhead_device(task, p);
    case Policy::Managed: return overhead_managed(task, p);
    case Policy::HostPinned: return overhead_hostpinned(task, p);
    }
    return 0;
}

inline Millis predict_response(const TaskProfile& task, const PlatformProfile& p, Policy policy) {
    return total_exec_time(task) + policy_overhead(task, p, policy);
}

struct PolicyChoice {
    Policy policy = Policy::Device;
    PolicyOverheads overheads;
};

/// Policy with the smallest overhead. Ties resolve in the order D, M, H.
inline PolicyChoice best_policy(const TaskProfile& task, const PlatformProfile& p) {
    PolicyChoice choice{Policy::Device, compute_overheads(task, p)};
    for (Policy candidate : {Policy::Managed, Policy::HostPinned})
        if (choice.overheads.of(candidate) < choice.overheads.of(choice.policy)) choice.policy = candidate;
    return choice;
}

} // namespace mmco
