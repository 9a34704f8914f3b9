#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "mmco/profiles.hpp"
#include "oracle.hpp"

using namespace mmco;
using namespace mmco::testing;

namespace {

const char* kPlatformDoc = R"({
  "tr_ini": 0.1, "l_hd": 2e-8, "l_dh": 2e-8, "l_ini": 1e-8, "l_mapping": 5e-8,
  "l_mem_access": 1e-4, "l_gcache_access": 2e-5, "l_writeback": 2e-8,
  "ca_cpu": 0.2, "ca_gpu": 0.3, "total_memory": 8e9
})";

template <typename Fn>
Error capture_error(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "expected mmco::Error";
    return Error(ErrorKind::Io, "", "none");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

const char* kWorkloadDoc = R"({
  "tasks": [
    {"name": "a", "kernels": [{"data_size": 1e6, "bytes_written": 1e5, "exec_time": 1.5,
       "dirty_cache_launch": true, "ipl": 4, "tpl": 32, "max_parallelism": 64}],
     "n_memcpy": 2, "bytes_hd": 1e6, "bytes_dh": 1e6, "n_l2": 1000, "l2_hit_rate": 0.5,
     "data_footprint": 2e6, "first_touch": false},
    {"name": "b", "kernels": [{"data_size": 1e3, "bytes_written": 0, "exec_time": 0.25,
       "dirty_cache_launch": false, "ipl": 1, "tpl": 1, "max_parallelism": 8}],
     "n_memcpy": 0, "bytes_hd": 0, "bytes_dh": 0, "n_l2": 0, "l2_hit_rate": 0,
     "data_footprint": 1e3, "first_touch": true}
  ],
  "arrivals": [{"task": "a", "t_ms": 0}, {"task": "b", "t_ms": 0}]
})";

} // namespace

TEST(PlatformProfile, LoadsValidDocument) {
    const auto p = load_platform_profile(kPlatformDoc);
    EXPECT_EQ(p, reference_platform());
}

TEST(PlatformProfile, MissingFieldIsNamed) {
    const std::string doc = replace(kPlatformDoc, "\"ca_cpu\": 0.2, ", "");
    const auto e = capture_error([&] { load_platform_profile(doc); });
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_EQ(e.field(), "ca_cpu");
}

TEST(PlatformProfile, GcacheSlowerThanMemoryIsInvariantError) {
    const std::string doc = replace(kPlatformDoc, "\"l_gcache_access\": 2e-5", "\"l_gcache_access\": 2e-4");
    const auto e = capture_error([&] { load_platform_profile(doc); });
    EXPECT_EQ(e.kind(), ErrorKind::Invariant);
    EXPECT_EQ(e.field(), "l_gcache_access");
}

TEST(PlatformProfile, NegativeValueIsInvariantError) {
    const std::string doc = replace(kPlatformDoc, "\"l_hd\": 2e-8", "\"l_hd\": -2e-8");
    const auto e = capture_error([&] { load_platform_profile(doc); });
    EXPECT_EQ(e.kind(), ErrorKind::Invariant);
    EXPECT_EQ(e.field(), "l_hd");
}

TEST(PlatformProfile, ZeroCapacityRejected) {
    const std::string doc = replace(kPlatformDoc, "\"total_memory\": 8e9", "\"total_memory\": 0");
    EXPECT_EQ(capture_error([&] { load_platform_profile(doc); }).field(), "total_memory");
}

TEST(PlatformProfile, NonNumericAndUnknownFieldsRejected) {
    EXPECT_EQ(capture_error([&] { load_platform_profile(replace(kPlatformDoc, "0.1", "\"fast\"")); }).field(),
              "tr_ini");
    EXPECT_EQ(capture_error([&] { load_platform_profile(replace(kPlatformDoc, "{", "{\"l_mem\": 1,")); })
                  .field(),
              "l_mem");
}

// Any byte sequence either parses into a validated profile or raises Error.
TEST(PlatformProfile, ParsingIsTotalOnMutatedInput) {
    std::mt19937_64 rng(7);
    const std::string base = kPlatformDoc;
    const std::string alphabet = "{}[]\":,-+.eE0123456789 abc\n\\";
    int parsed = 0, rejected = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string doc = base;
        const int edits = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int k = 0; k < edits; ++k) {
            const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, doc.size() - 1)(rng);
            switch (rng() % 3) {
            case 0: doc.erase(pos, 1); break;
            case 1: doc.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
            default: doc[pos] = alphabet[rng() % alphabet.size()]; break;
            }
        }
        try {
            const auto p = load_platform_profile(doc);
            EXPECT_NO_THROW(validate(p));
            ++parsed;
        } catch (const Error&) {
            ++rejected;
        }
    }
    EXPECT_EQ(parsed + rejected, 2000);
    EXPECT_GT(rejected, 0);
}

TEST(Workload, ParsesTasksAndArrivals) {
    const auto w = load_workload(kWorkloadDoc);
    ASSERT_EQ(w.tasks.size(), 2u);
    EXPECT_EQ(w.tasks[0].name, "a");
    EXPECT_EQ(w.tasks[0].kernels.size(), 1u);
    EXPECT_TRUE(w.tasks[0].kernels[0].dirty_cache_launch);
    EXPECT_EQ(w.tasks[0].n_memcpy, 2u);
    ASSERT_EQ(w.trace.arrivals.size(), 2u);
    EXPECT_EQ(w.trace.arrivals[1].task, "b");
    EXPECT_EQ(w.trace.arrivals[1].t_ms, 0.0);
}

TEST(Workload, UnknownArrivalReference) {
    const std::string doc = replace(kWorkloadDoc, R"({"task": "b", "t_ms": 0})", R"({"task": "X", "t_ms": 0})");
    const auto e = capture_error([&] { load_workload(doc); });
    EXPECT_EQ(e.kind(), ErrorKind::Reference);
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos);
}

TEST(Workload, DuplicateTaskName) {
    const std::string doc = replace(kWorkloadDoc, R"("name": "b")", R"("name": "a")");
    EXPECT_EQ(capture_error([&] { load_workload(doc); }).kind(), ErrorKind::Reference);
}

TEST(Workload, BytesWrittenAboveDataSize) {
    const std::string doc = replace(kWorkloadDoc, R"("bytes_written": 1e5)", R"("bytes_written": 2e6)");
    const auto e = capture_error([&] { load_workload(doc); });
    EXPECT_EQ(e.kind(), ErrorKind::Invariant);
    EXPECT_EQ(e.field(), "tasks[0].kernels[0].bytes_written");
}

TEST(Workload, TaskInvariants) {
    auto t = nw_like();
    t.kernels.clear();
    EXPECT_EQ(capture_error([&] { validate(t); }).field(), "kernels");
    t = nw_like();
    t.l2_hit_rate = 1.5;
    EXPECT_EQ(capture_error([&] { validate(t); }).field(), "l2_hit_rate");
    t = nw_like();
    t.data_footprint = 1.0;
    EXPECT_EQ(capture_error([&] { validate(t); }).field(), "data_footprint");
    t = nw_like();
    EXPECT_NO_THROW(validate(t));
}

TEST(Workload, NegativeArrivalAndFractionalCount) {
    EXPECT_EQ(capture_error([&] {
                  load_workload(replace(kWorkloadDoc, R"({"task": "a", "t_ms": 0})", R"({"task": "a", "t_ms": -1})"));
              }).field(),
              "arrivals[0].t_ms");
    EXPECT_EQ(capture_error([&] { load_workload(replace(kWorkloadDoc, R"("n_memcpy": 2)", R"("n_memcpy": 2.5)")); })
                  .field(),
              "tasks[0].n_memcpy");
}

TEST(Workload, EmptyWorkloadIsValid) {
    const auto w = load_workload(R"({"tasks": [], "arrivals": []})");
    EXPECT_TRUE(w.tasks.empty());
}

TEST(Serialization, RoundTripRandomWorkloads) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_platform(rng);
        EXPECT_EQ(load_platform_profile(serialize(p)), p);
        Workload w = random_workload(rng, 1 + i % 4, true);
        EXPECT_EQ(load_workload(serialize(w)), w);
    }
}

// ---------------------------------------------------------------------------

TEST(TransferFit, RecoversNoiselessLine) {
    std::vector<TransferSample> samples;
    for (int i = 0; i <= 10; ++i) {
        const double k = i * 1e6;
        samples.push_back({k, 0.1 + 2e-8 * k});
    }
    const auto fit = fit_transfer_params(samples);
    EXPECT_TRUE(near_rel(fit.tr_ini, 0.1, 1e-9)) << fit.tr_ini;
    EXPECT_TRUE(near_rel(fit.rate, 2e-8, 1e-9)) << fit.rate;
    EXPECT_FALSE(fit.clamped);
}

TEST(TransferFit, TwoPointsGiveExactLine) {
    const std::vector<TransferSample> samples{{0, 0.5}, {1e6, 1.5}};
    const auto fit = fit_transfer_params(samples);
    EXPECT_DOUBLE_EQ(fit.tr_ini, 0.5);
    EXPECT_DOUBLE_EQ(fit.rate, 1e-6);
}

TEST(TransferFit, DegenerateInputs) {
    const std::vector<TransferSample> one{{1e6, 1.0}};
    EXPECT_EQ(capture_error([&] { fit_transfer_params(one); }).kind(), ErrorKind::Degenerate);
    const std::vector<TransferSample> same{{1e6, 1.0}, {1e6, 1.1}, {1e6, 0.9}};
    EXPECT_EQ(capture_error([&] { fit_transfer_params(same); }).kind(), ErrorKind::Degenerate);
}

TEST(TransferFit, NegativeInterceptIsClamped) {
    const std::vector<TransferSample> samples{{1e6, 0.5}, {2e6, 1.5}, {3e6, 2.5}};
    const auto fit = fit_transfer_params(samples);
    EXPECT_EQ(fit.tr_ini, 0.0);
    EXPECT_TRUE(fit.clamped);
    EXPECT_DOUBLE_EQ(fit.rate, 1e-6);
}

TEST(TransferSamplesCsv, ParsesWithHeader) {
    const auto s = load_transfer_samples("bytes,ms\n0,0.5\n\n1000000, 1.5\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1].bytes, 1e6);
    EXPECT_EQ(s[1].ms, 1.5);
}

TEST(TransferSamplesCsv, Errors) {
    EXPECT_EQ(capture_error([] { load_transfer_samples("0,0.5\n"); }).field(), "header");
    EXPECT_EQ(capture_error([] { load_transfer_samples("bytes,ms\n1,abc\n"); }).field(), "line 2");
    EXPECT_EQ(capture_error([] { load_transfer_samples("bytes,ms\n1,2,3\n"); }).kind(), ErrorKind::Parse);
    EXPECT_EQ(capture_error([] { load_transfer_samples("bytes,ms\n-1,2\n"); }).kind(), ErrorKind::Invariant);
}
