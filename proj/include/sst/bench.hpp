#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sst {

struct BenchSize {
    std::size_t height = 256;
    std::size_t width = 256;
    std::size_t bands = 32;
};

struct BenchOptions {
    std::vector<BenchSize> sizes = {{256, 256, 32}};
    int repetitions = 5;
    int threads = 1;
    std::size_t m1 = 256;
    std::size_t mask_size = 9;
    std::size_t channels = 8;
    std::size_t smoothing_radius = 1;
    std::size_t patch_size = 64;
    int baseline_iterations = 3;
    std::uint64_t seed = 1;
};

struct PathTiming {
    double median_ms = 0.0;
    double mad_ms = 0.0;  // median absolute deviation
    std::vector<double> samples_ms;
};

struct BenchSizeResult {
    BenchSize size;
    PathTiming global;
    PathTiming baseline;
    std::uint64_t global_madds = 0;    // closed-form multiply-add count
    std::uint64_t baseline_madds = 0;
    std::size_t global_centers = 0;
    std::size_t baseline_centers = 0;
    std::size_t centers_per_patch = 0;
};

/// Times one global one-shot association + aggregation pass against the
/// patch-iterative baseline at equal total center count. Inputs (cube,
/// derivative, semantic features) are prepared outside the timed region; one
/// unmeasured warm-up run precedes the measured repetitions.
std::vector<BenchSizeResult> measure_bench(const BenchOptions& options);

/// Structured key=value report including a hardware note, the thread count,
/// the kernel backend and the closed-form operation counts.
std::string format_bench_report(const BenchOptions& options,
                                const std::vector<BenchSizeResult>& results);

// Closed-form multiply-add counts for the two paths (mask construction,
// distance terms, exponential kernel and aggregation; one count per
// multiply-add, exponential and division).
std::uint64_t global_pass_madds(std::size_t height, std::size_t width, std::size_t bands,
                                std::size_t channels, std::size_t centers,
                                std::size_t mask_size);
std::uint64_t patch_baseline_madds(std::size_t height, std::size_t width, std::size_t bands,
                                   std::size_t channels, std::size_t patch_size,
                                   std::size_t centers_per_patch, std::size_t mask_size,
                                   int iterations);

}  // namespace sst
