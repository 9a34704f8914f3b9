#pragma once

// Discrete-event co-execution of GPU tasks on a single integrated GPU.
//
// Jobs are dispatched from an EDF queue whenever the GPU is free. At each
// dispatch the head of the queue may be released together with one partner:
// a Device job runs inside the idle (page-mapping) period of a Managed or
// HostPinned job. All other work is serialized.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmco/assigner.hpp"
#include "mmco/timeline.hpp"

namespace mmco {

enum class PairingRule {
    FullResponse, // transfer + exec of the Device job must fit in the idle period
    ExecOnly,     // only exec must fit; the Device transfer runs before the pair
};

inline constexpr std::string_view to_string(PairingRule r) {
    return r == PairingRule::ExecOnly ? "exec-only" : "full-response";
}

struct SimOptions {
    PairingRule pairing = PairingRule::FullResponse;
};

/// A task instance taken from the arrival trace, with its per-phase costs
/// under the policy it was assigned.
struct Job {
    std::string name;
    TaskProfile profile;
    Millis arrival = 0;
    Policy policy = Policy::Device;
    PolicyOverheads overheads;

    Millis transfer = 0;  // Device copies
    Millis idle = 0;      // page mapping, overlappable
    Millis cpu_flush = 0; // Managed launch flushes
    Millis exec = 0;      // includes the cache penalty under HostPinned
    Millis writeback = 0; // Managed completion sync

    Millis response() const { return transfer + idle + cpu_flush + exec + writeback; }
};

inline void apply_policy(Job& job, Policy policy, const PlatformProfile& p) {
    job.policy = policy;
    job.overheads = compute_overheads(job.profile, p);
    const Millis pure = total_exec_time(job.profile);
    const auto& o = job.overheads;
    job.transfer = job.idle = job.cpu_flush = job.writeback = 0;
    job.exec = pure;
    switch (policy) {
    case Policy::Device:
        job.transfer = o.o_d;
        break;
    case Policy::Managed:
        job.idle = o.idle;
        job.cpu_flush = static_cast<double>(dirty_launch_count(job.profile)) * p.ca_cpu;
        job.writeback = o.t_s;
        break;
    case Policy::HostPinned:
        job.idle = hostpinned_mapping(job.profile, p);
        job.exec = pure + o.t_c;
        break;
    }
}

/// One job per arrival. A task that arrives more than once gets instance
/// names `task#1`, `task#2`, ... in arrival-list order.
inline std::vector<Job> expand_jobs(const Workload& w, const PlatformProfile& p) {
    std::map<std::string, int> occurrences;
    for (const auto& a : w.trace.arrivals) ++occurrences[a.task];
    std::map<std::string, int> seen;
    std::vector<Job> jobs;
    for (const auto& a : w.trace.arrivals) {
        const TaskProfile* t = w.find(a.task);
        if (!t) throw Error(ErrorKind::Reference, "arrivals", "arrival references unknown task '" + a.task + "'");
        Job job;
        job.name = occurrences[a.task] > 1 ? a.task + "#" + std::to_string(++seen[a.task]) : a.task;
        job.profile = *t;
        job.profile.name = job.name;
        job.arrival = a.t_ms;
        apply_policy(job, Policy::Device, p);
        jobs.push_back(std::move(job));
    }
    return jobs;
}

// ---------------------------------------------------------------------------
// Queue and pairing

struct QueueEntry {
    std::string name;
    Millis arrival = 0;
    Policy policy = Policy::Device;
    Millis deadline = 0; // arrival + predicted response under `policy`
    Millis idle = 0;
    Millis transfer = 0;
    Millis exec = 0;
    std::size_t job = 0; // index into the job list
};

inline QueueEntry make_queue_entry(const Job& job, std::size_t index) {
    return {job.name, job.arrival, job.policy, job.arrival + job.response(),
            job.idle, job.transfer, job.exec, index};
}

inline void edf_sort(std::vector<QueueEntry>& queue) {
    std::sort(queue.begin(), queue.end(), [](const QueueEntry& a, const QueueEntry& b) {
        if (a.deadline != b.deadline) return a.deadline < b.deadline;
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.name < b.name;
    });
}

/// Whether Device entry `dev` fits into the idle period of `host`.
inline bool fits_idle(const QueueEntry& dev, const QueueEntry& host, PairingRule rule) {
    if (dev.policy != Policy::Device || host.policy == Policy::Device) return false;
    const Millis need = rule == PairingRule::FullResponse ? dev.transfer + dev.exec : dev.exec;
    return need <= host.idle;
}

struct Pairing {
    std::size_t head = 0;    // queue position of the head
    std::size_t partner = 0; // queue position of its co-runner
};

/// Looks for a co-runner for the head of an EDF-sorted queue, scanning the
/// rest of the queue in order. Only Device x (Managed | HostPinned) pairs
/// qualify, and the Device member must fit in the other's idle period.
inline std::optional<Pairing> find_pair(const std::vector<QueueEntry>& queue, PairingRule rule) {
    if (queue.size() < 2) return std::nullopt;
    const QueueEntry& head = queue.front();
    for (std::size_t i = 1; i < queue.size(); ++i) {
        const QueueEntry& other = queue[i];
        if (fits_idle(head, other, rule) || fits_idle(other, head, rule)) return Pairing{0, i};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Timeline construction

struct Release {
    std::size_t first = 0;
    std::optional<std::size_t> second;
    Millis start = 0;
};

namespace detail {

inline void push_segment(Timeline& t, const std::string& task, SegmentKind kind, Millis start, Millis dur) {
    if (dur <= 0) return;
    t.segments.push_back({task, kind, start, start + dur, kind == SegmentKind::Idle});
}

/// Lays out the job's phases back to back from `start`; returns completion.
inline Millis place_sequential(Timeline& t, const Job& job, Millis start) {
    Millis at = start;
    push_segment(t, job.name, SegmentKind::Transfer, at, job.transfer);
    at += job.transfer;
    push_segment(t, job.name, SegmentKind::Idle, at, job.idle);
    at += job.idle;
    push_segment(t, job.name, SegmentKind::CpuFlush, at, job.cpu_flush);
    at += job.cpu_flush;
    push_segment(t, job.name, SegmentKind::Exec, at, job.exec);
    at += job.exec;
    push_segment(t, job.name, SegmentKind::Writeback, at, job.writeback);
    at += job.writeback;
    return at;
}

inline void record_job(Timeline& t, const Job& job, Millis release, Millis completion, bool paired) {
    t.jobs.push_back({job.name, job.profile.name, job.policy, job.arrival, release, completion,
                      resident_footprint(job.policy, job.profile.data_footprint), paired});
}

} // namespace detail

/// Places one release on the timeline and returns the time the GPU becomes
/// free again.
inline Millis place_release(Timeline& t, const std::vector<Job>& jobs, const Release& r, PairingRule rule) {
    if (!r.second) {
        const Job& job = jobs[r.first];
        const Millis done = detail::place_sequential(t, job, r.start);
        detail::record_job(t, job, r.start, done, false);
        return done;
    }
    const Job& a = jobs[r.first];
    const Job& b = jobs[*r.second];
    const Job& dev = a.policy == Policy::Device ? a : b;
    const Job& host = a.policy == Policy::Device ? b : a;

    Millis host_start = r.start;
    Millis dev_done = 0;
    if (rule == PairingRule::FullResponse) {
        dev_done = detail::place_sequential(t, dev, r.start);
    } else {
        detail::push_segment(t, dev.name, SegmentKind::Transfer, r.start, dev.transfer);
        host_start = r.start + dev.transfer;
        detail::push_segment(t, dev.name, SegmentKind::Exec, host_start, dev.exec);
        dev_done = host_start + dev.exec;
    }
    const Millis host_done = detail::place_sequential(t, host, host_start);
    // Record in release order so job listings read naturally.
    for (const Job* j : {&a, &b})
        detail::record_job(t, *j, r.start, j == &dev ? dev_done : host_done, true);
    return std::max(dev_done, host_done);
}

inline Millis release_ready_time(const std::vector<Job>& jobs, const Release& r, Millis gpu_free) {
    Millis ready = std::max(gpu_free, jobs[r.first].arrival);
    if (r.second) ready = std::max(ready, jobs[*r.second].arrival);
    return ready;
}

// ---------------------------------------------------------------------------
// Reports

struct SimReport {
    Mode mode = Mode::Default;
    Millis makespan = 0;
    std::vector<std::pair<std::string, Millis>> responses; // per job, trace order
    Bytes peak_memory = 0;
    Bytes total_memory = 0;
    double gpu_utilization = 0;
    bool oom = false;
    std::optional<Millis> oom_at;
    std::size_t pairs = 0;

    bool operator==(const SimReport&) const = default;
};

struct SimResult {
    Timeline timeline;
    SimReport report;
    std::vector<Policy> policies; // per job, trace order
};

inline SimReport make_report(const Timeline& t, const std::vector<Job>& jobs, const PlatformProfile& p) {
    SimReport r;
    r.mode = t.mode;
    r.makespan = makespan(t);
    r.total_memory = p.total_memory;
    for (const auto& job : jobs) {
        auto it = std::find_if(t.jobs.begin(), t.jobs.end(), [&](const JobRecord& j) { return j.name == job.name; });
        r.responses.emplace_back(job.name, it == t.jobs.end() ? 0.0 : it->response());
    }
    const auto mem = sweep_memory(t, p.total_memory);
    r.peak_memory = mem.peak;
    r.oom = mem.first_overflow.has_value();
    r.oom_at = mem.first_overflow;
    r.gpu_utilization = gpu_utilization(t);
    std::size_t paired_jobs = 0;
    for (const auto& j : t.jobs) paired_jobs += j.paired ? 1 : 0;
    r.pairs = paired_jobs / 2;
    return r;
}

inline Timeline build_timeline(const std::vector<Job>& jobs, const std::vector<Release>& plan, Mode mode,
                               PairingRule rule) {
    Timeline t;
    t.mode = mode;
    Millis gpu_free = 0;
    for (const auto& r : plan) gpu_free = place_release(t, jobs, r, rule);
    (void)gpu_free;
    return t;
}

/// Policies per job for the given mode. CO runs the guideline assigner over
/// the job instances.
inline std::vector<Policy> mode_policies(const std::vector<Job>& jobs, const PlatformProfile& p, Mode mode) {
    std::vector<Policy> out(jobs.size(), Policy::Device);
    if (mode == Mode::MemoryOptimized) std::fill(out.begin(), out.end(), Policy::Managed);
    if (mode == Mode::CoOptimized && !jobs.empty()) {
        std::vector<TaskProfile> profiles;
        for (const auto& j : jobs) profiles.push_back(j.profile);
        const auto assignment = assign_policies(profiles, p);
        for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = assignment.entries[i].policy;
    }
    return out;
}

/// EDF dispatch. Whenever the GPU is free, the arrived jobs are EDF-sorted and
/// the head is released, together with a partner if `find_pair` finds one.
inline std::vector<Release> dispatch_edf(const std::vector<Job>& jobs, PairingRule rule) {
    std::vector<Release> plan;
    std::vector<bool> done(jobs.size(), false);
    std::size_t remaining = jobs.size();
    Millis now = 0;
    if (!jobs.empty()) {
        now = jobs.front().arrival;
        for (const auto& j : jobs) now = std::min(now, j.arrival);
    }
    // Scratch timeline only used to advance the clock.
    Timeline scratch;
    while (remaining > 0) {
        std::vector<QueueEntry> queue;
        Millis next_arrival = std::numeric_limits<Millis>::infinity();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (done[i]) continue;
            if (jobs[i].arrival <= now)
                queue.push_back(make_queue_entry(jobs[i], i));
            else
                next_arrival = std::min(next_arrival, jobs[i].arrival);
        }
        if (queue.empty()) {
            now = next_arrival;
            continue;
        }
        edf_sort(queue);
        Release r{queue.front().job, std::nullopt, now};
        if (auto pair = find_pair(queue, rule)) r.second = queue[pair->partner].job;
        done[r.first] = true;
        --remaining;
        if (r.second) {
            done[*r.second] = true;
            --remaining;
        }
        now = place_release(scratch, jobs, r, rule);
        plan.push_back(r);
    }
    return plan;
}

inline SimResult simulate(const Workload& w, const PlatformProfile& p, Mode mode, const SimOptions& opts = {}) {
    std::vector<Job> jobs = expand_jobs(w, p);
    const auto policies = mode_policies(jobs, p, mode);
    for (std::size_t i = 0; i < jobs.size(); ++i) apply_policy(jobs[i], policies[i], p);

    SimResult out;
    out.policies = policies;
    out.timeline = build_timeline(jobs, dispatch_edf(jobs, opts.pairing), mode, opts.pairing);
    out.report = make_report(out.timeline, jobs, p);
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

inline constexpr std::size_t kBruteForceMaxJobs = 4;

/// Minimum-makespan schedule over every guideline-respecting policy
/// assignment and every sequence of single or paired releases (including
/// ones that wait for later arrivals). Used as an optimality oracle.
inline SimResult brute_force_schedule(const Workload& w, const PlatformProfile& p, const SimOptions& opts = {}) {
    std::vector<Job> jobs = expand_jobs(w, p);
    const std::size_t n = jobs.size();
    if (n > kBruteForceMaxJobs)
        throw Error(ErrorKind::Limit, "arrivals",
                    "brute force is limited to " + std::to_string(kBruteForceMaxJobs) + " jobs, got " +
                        std::to_string(n));

    std::vector<std::vector<Policy>> options(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto o = compute_overheads(jobs[i].profile, p);
        options[i].push_back(Policy::Device);
        for (Policy target : {Policy::Managed, Policy::HostPinned})
            if (satisfies_guideline1(o, p, target)) options[i].push_back(target);
    }

    Millis first_arrival = 0;
    if (n) {
        first_arrival = jobs.front().arrival;
        for (const auto& j : jobs) first_arrival = std::min(first_arrival, j.arrival);
    }

    Millis best = std::numeric_limits<Millis>::infinity();
    std::vector<Policy> best_policies;
    std::vector<Release> best_plan;

    std::vector<Policy> chosen(n, Policy::Device);
    std::vector<Release> plan;
    std::vector<bool> used(n, false);

    std::function<void(Millis, std::size_t)> sequence = [&](Millis gpu_free, std::size_t placed) {
        if (placed == n) {
            if (gpu_free - first_arrival < best) {
                best = gpu_free - first_arrival;
                best_policies = chosen;
                best_plan = plan;
            }
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = true;
            // single release
            {
                Release r{i, std::nullopt, 0};
                r.start = release_ready_time(jobs, r, gpu_free);
                const Millis end = r.start + jobs[i].response();
                plan.push_back(r);
                sequence(std::max(gpu_free, end), placed + 1);
                plan.pop_back();
            }
            for (std::size_t k = i + 1; k < n; ++k) {
                if (used[k]) continue;
                const auto ei = make_queue_entry(jobs[i], i), ek = make_queue_entry(jobs[k], k);
                if (!fits_idle(ei, ek, opts.pairing) && !fits_idle(ek, ei, opts.pairing)) continue;
                used[k] = true;
                Release r{i, k, 0};
                r.start = release_ready_time(jobs, r, gpu_free);
                Timeline scratch;
                const Millis end = place_release(scratch, jobs, r, opts.pairing);
                plan.push_back(r);
                sequence(end, placed + 2);
                plan.pop_back();
                used[k] = false;
            }
            used[i] = false;
        }
    };

    std::function<void(std::size_t, std::size_t)> assign = [&](std::size_t i, std::size_t converted) {
        if (i == n) {
            if (2 * converted > n) return; // converted must not exceed Device count
            for (std::size_t j = 0; j < n; ++j) apply_policy(jobs[j], chosen[j], p);
            sequence(first_arrival, 0);
            return;
        }
        for (Policy policy : options[i]) {
            chosen[i] = policy;
            assign(i + 1, converted + (policy == Policy::Device ? 0 : 1));
        }
        chosen[i] = Policy::Device;
    };
    assign(0, 0);

    for (std::size_t j = 0; j < n; ++j) apply_policy(jobs[j], best_policies.empty() ? Policy::Device : best_policies[j], p);
    SimResult out;
    out.policies = best_policies.empty() ? std::vector<Policy>(n, Policy::Device) : best_policies;
    out.timeline = build_timeline(jobs, best_plan, Mode::CoOptimized, opts.pairing);
    out.report = make_report(out.timeline, jobs, p);
    return out;
}

} // namespace mmco
