#include "sst/synthetic.hpp"

#include <random>
#include <vector>

#include "sst/error.hpp"

namespace sst {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

HsiCube random_cube(std::size_t height, std::size_t width, std::size_t bands,
                    std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::vector<double> values(height * width * bands);
    for (double& v : values) v = lo + (hi - lo) * uniform01(rng);
    return HsiCube(height, width, bands, std::move(values));
}

LabeledCube striped_cube(std::size_t height, std::size_t width, std::size_t bands,
                         std::uint16_t classes, double noise, std::uint64_t seed) {
    if (classes < 1) throw invalid_input_error("striped_cube: need at least one class");
    std::mt19937_64 rng(seed);
    std::vector<double> values(height * width * bands);
    std::vector<std::uint16_t> labels(height * width);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const std::uint16_t cls =
                static_cast<std::uint16_t>(c * classes / width);  // stripe index, 0-based
            labels[r * width + c] = static_cast<std::uint16_t>(cls + 1);
            double* px = values.data() + (r * width + c) * bands;
            const double level = 10.0 * cls;
            const double slope = 0.5 * (cls + 1);
            for (std::size_t b = 0; b < bands; ++b)
                px[b] = level + slope * static_cast<double>(b) +
                        noise * (2.0 * uniform01(rng) - 1.0);
        }
    }
    return {HsiCube(height, width, bands, std::move(values)),
            LabelMap(height, width, classes, std::move(labels))};
}

}  // namespace sst
