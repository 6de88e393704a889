#include "sst/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sst/features.hpp"
#include "sst/kernels.hpp"
#include "sst/pipeline.hpp"
#include "sst/scpa.hpp"
#include "sst/synthetic.hpp"

namespace sst {

namespace {

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

PathTiming summarize(std::vector<double> samples) {
    PathTiming t;
    t.median_ms = median(samples);
    std::vector<double> dev;
    dev.reserve(samples.size());
    for (double s : samples) dev.push_back(std::abs(s - t.median_ms));
    t.mad_ms = median(dev);
    t.samples_ms = std::move(samples);
    return t;
}

std::string cpu_model() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find("model name");
        if (pos == std::string::npos) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) break;
        auto name = line.substr(colon + 1);
        const auto begin = name.find_first_not_of(" \t");
        return begin == std::string::npos ? name : name.substr(begin);
    }
    return "unknown-cpu";
}

// multiply-add counts of one cache build (mask selection + static terms)
std::uint64_t cache_madds(std::uint64_t pixels, std::uint64_t centers, std::uint64_t bands,
                          std::uint64_t kept) {
    return 2 * pixels * centers + pixels * kept * (2 + bands + (bands - 1));
}

// multiply-add counts of one association + aggregation round
std::uint64_t round_madds(std::uint64_t pixels, std::uint64_t centers, std::uint64_t channels,
                          std::uint64_t kept) {
    return pixels * kept * (2 * channels + 2) + centers * channels;
}

}  // namespace

std::uint64_t global_pass_madds(std::size_t height, std::size_t width, std::size_t bands,
                                std::size_t channels, std::size_t centers,
                                std::size_t mask_size) {
    const std::uint64_t n = static_cast<std::uint64_t>(height) * width;
    return cache_madds(n, centers, bands, mask_size) +
           round_madds(n, centers, channels, mask_size);
}

std::uint64_t patch_baseline_madds(std::size_t height, std::size_t width, std::size_t bands,
                                   std::size_t channels, std::size_t patch_size,
                                   std::size_t centers_per_patch, std::size_t mask_size,
                                   int iterations) {
    // Every iteration rebuilds the tile-local distances, matching the
    // baseline implementation.
    std::uint64_t total = 0;
    for (std::size_t r0 = 0; r0 < height; r0 += patch_size) {
        const std::size_t th = std::min(patch_size, height - r0);
        for (std::size_t c0 = 0; c0 < width; c0 += patch_size) {
            const std::size_t tw = std::min(patch_size, width - c0);
            const std::uint64_t n = static_cast<std::uint64_t>(th) * tw;
            const std::uint64_t m = std::min<std::uint64_t>(centers_per_patch, n);
            const std::uint64_t kept = std::min<std::uint64_t>(mask_size, m);
            total += static_cast<std::uint64_t>(iterations) *
                     (cache_madds(n, m, bands, kept) + round_madds(n, m, channels, kept));
        }
    }
    return total;
}

std::vector<BenchSizeResult> measure_bench(const BenchOptions& options) {
    using clock = std::chrono::steady_clock;

    std::vector<BenchSizeResult> results;
    for (const BenchSize& size : options.sizes) {
        const HsiCube cube = random_cube(size.height, size.width, size.bands, options.seed);
        const SpectralDerivative deriv = spectral_derivative(cube);
        const PcaFeatureProvider provider(std::min(options.channels, size.bands),
                                          options.smoothing_radius);
        const FeatureMap features = provider.compute(cube);
        const PixelFeatures px = make_pixel_features(cube, deriv, features);

        const std::size_t patches_r = (size.height + options.patch_size - 1) / options.patch_size;
        const std::size_t patches_c = (size.width + options.patch_size - 1) / options.patch_size;
        const std::size_t patch_count = patches_r * patches_c;
        // Equal total center budget across the two paths.
        const std::size_t per_patch =
            std::max<std::size_t>(1, (options.m1 + patch_count - 1) / patch_count);

        CenterSet grid =
            make_center_set(px, init_center_grid(size.height, size.width, options.m1));

        auto time_global = [&]() {
            const auto begin = clock::now();
            ScpaResult r = scpa_group(px, grid, options.mask_size, 1, options.threads);
            const auto end = clock::now();
            (void)r;
            return std::chrono::duration<double, std::milli>(end - begin).count();
        };
        auto time_baseline = [&]() {
            const auto begin = clock::now();
            PatchBaselineResult r =
                patch_baseline_pipeline(px, options.patch_size, per_patch, options.mask_size,
                                        options.baseline_iterations, options.threads);
            const auto end = clock::now();
            (void)r;
            return std::chrono::duration<double, std::milli>(end - begin).count();
        };

        time_global();  // warm-up, unmeasured
        time_baseline();

        std::vector<double> global_samples, baseline_samples;
        for (int rep = 0; rep < options.repetitions; ++rep) {
            global_samples.push_back(time_global());
            baseline_samples.push_back(time_baseline());
        }

        BenchSizeResult res;
        res.size = size;
        res.global = summarize(std::move(global_samples));
        res.baseline = summarize(std::move(baseline_samples));
        res.global_madds =
            global_pass_madds(size.height, size.width, size.bands,
                              std::min(options.channels, size.bands), options.m1,
                              options.mask_size);
        res.baseline_madds = patch_baseline_madds(
            size.height, size.width, size.bands, std::min(options.channels, size.bands),
            options.patch_size, per_patch, options.mask_size, options.baseline_iterations);
        res.global_centers = options.m1;
        res.baseline_centers =
            patch_baseline_pipeline(px, options.patch_size, per_patch, options.mask_size, 1, 1)
                .total_centers;
        res.centers_per_patch = per_patch;
        results.push_back(std::move(res));
    }
    return results;
}

std::string format_bench_report(const BenchOptions& options,
                                const std::vector<BenchSizeResult>& results) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "bench.hardware=" << cpu_model() << "\n";
    out << "bench.threads=" << options.threads << "\n";
    out << "bench.kernel_backend=" << kernels::backend_name() << "\n";
    out << "bench.repetitions=" << options.repetitions << "\n";
    out << "bench.m1=" << options.m1 << "\n";
    out << "bench.mask_size=" << options.mask_size << "\n";
    out << "bench.channels=" << options.channels << "\n";
    out << "bench.patch_size=" << options.patch_size << "\n";
    out << "bench.baseline_iterations=" << options.baseline_iterations << "\n";
    out << "bench.seed=" << options.seed << "\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const BenchSizeResult& r = results[i];
        const std::string p = "size." + std::to_string(i) + ".";
        out << p << "dims=" << r.size.height << "x" << r.size.width << "x" << r.size.bands
            << "\n";
        out << p << "global.median_ms=" << r.global.median_ms << "\n";
        out << p << "global.mad_ms=" << r.global.mad_ms << "\n";
        out << p << "global.madds=" << r.global_madds << "\n";
        out << p << "global.centers=" << r.global_centers << "\n";
        out << p << "baseline.median_ms=" << r.baseline.median_ms << "\n";
        out << p << "baseline.mad_ms=" << r.baseline.mad_ms << "\n";
        out << p << "baseline.madds=" << r.baseline_madds << "\n";
        out << p << "baseline.centers=" << r.baseline_centers << "\n";
        out << p << "baseline.centers_per_patch=" << r.centers_per_patch << "\n";
        out << p << "global_faster=" << (r.global.median_ms < r.baseline.median_ms ? 1 : 0)
            << "\n";
    }
    return out.str();
}

}  // namespace sst
