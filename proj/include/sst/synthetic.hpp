#pragma once

#include <cstdint>

#include "sst/cube.hpp"

namespace sst {

/// Seeded uniform random cube with values in [lo, hi). The generator consumes
/// a fixed 53-bit stream, so identical seeds give identical cubes everywhere.
HsiCube random_cube(std::size_t height, std::size_t width, std::size_t bands,
                    std::uint64_t seed, double lo = 0.0, double hi = 1.0);

struct LabeledCube {
    HsiCube cube;
    LabelMap labels;
};

/// Vertical stripes of spectrally separable classes: class c has base level
/// 10c and band slope 0.5(c+1), plus uniform noise of the given amplitude.
/// Every pixel is labeled with its stripe's class (1-based).
LabeledCube striped_cube(std::size_t height, std::size_t width, std::size_t bands,
                         std::uint16_t classes, double noise, std::uint64_t seed);

}  // namespace sst
