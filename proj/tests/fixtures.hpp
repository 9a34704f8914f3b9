#pragma once

// Shared fixtures: reference platform and the two benchmark-shaped tasks
// used throughout the unit and acceptance suites.

#include <string>
#include <vector>

#include "mmco/profiles.hpp"

namespace mmco::testing {

/// 50 GB/s copies, 8 GB shared pool.
inline PlatformProfile reference_platform() {
    PlatformProfile p;
    p.tr_ini = 0.1;
    p.l_hd = 2e-8;
    p.l_dh = 2e-8;
    p.l_ini = 1e-8;
    p.l_mapping = 5e-8;
    p.l_writeback = 2e-8;
    p.l_mem_access = 1e-4;
    p.l_gcache_access = 2e-5;
    p.ca_cpu = 0.2;
    p.ca_gpu = 0.3;
    p.total_memory = 8e9;
    return p;
}

inline KernelProfile kernel(Bytes size, Bytes written, Millis exec, bool dirty, bool penalty_exposed = true) {
    KernelProfile k;
    k.data_size = size;
    k.bytes_written = written;
    k.exec_time = exec;
    k.dirty_cache_launch = dirty;
    k.ipl = 4;
    k.tpl = 32;
    k.max_parallelism = penalty_exposed ? 64 : 1024;
    return k;
}

/// One large dirty kernel; mapping dominates. O_D = 5.2, O_M = 5.5,
/// T_c = 6.4, O_H = 11.4, I = 5.0, exec = 10.
inline TaskProfile nw_like(Bytes copy_bytes = 1e8, std::string name = "nw") {
    TaskProfile t;
    t.name = std::move(name);
    t.kernels = {kernel(1e8, 1e8, 10.0, true)};
    t.n_memcpy = 2;
    t.bytes_hd = copy_bytes;
    t.bytes_dh = copy_bytes;
    t.n_l2 = 100000;
    t.l2_hit_rate = 0.8;
    t.data_footprint = 2e8;
    t.first_touch = true;
    return t;
}

/// 1024 small dirty kernels; launch flushes dominate under M.
/// O_D = 0.205, exec = 2.0, O_M ~ 205.5, T_c = 720.
inline TaskProfile gaussian_like(std::string name = "gaussian") {
    TaskProfile t;
    t.name = std::move(name);
    t.kernels.assign(1024, kernel(1e4, 1e4, 2.0 / 1024, true));
    t.n_memcpy = 2;
    t.bytes_hd = 1e5;
    t.bytes_dh = 1e5;
    t.n_l2 = 10000000;
    t.l2_hit_rate = 0.9;
    t.data_footprint = 1e6;
    t.first_touch = true;
    return t;
}

/// Detector-shaped task on a unit-capacity pool: D footprint 0.386
/// (two copies of 0.193), so three concurrent D instances cannot fit.
inline TaskProfile yolo_like() {
    TaskProfile t;
    t.name = "yolo";
    t.kernels = {kernel(0.05, 0.01, 20.0, true), kernel(0.05, 0.01, 15.0, false)};
    t.n_memcpy = 4;
    t.bytes_hd = 0.1;
    t.bytes_dh = 0.05;
    t.data_footprint = 0.193;
    return t;
}

inline Workload make_workload(std::vector<TaskProfile> tasks, std::vector<Arrival> arrivals = {}) {
    Workload w;
    if (arrivals.empty())
        for (const auto& t : tasks) arrivals.push_back({t.name, 0.0});
    w.tasks = std::move(tasks);
    w.trace.arrivals = std::move(arrivals);
    return w;
}

inline bool near_rel(double a, double b, double rel) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * scale;
}

} // namespace mmco::testing
