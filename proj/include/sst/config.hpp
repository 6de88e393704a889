#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sst/classifier.hpp"

namespace sst {

/// Pipeline hyperparameters, serialized as a flat key=value text file.
/// Defaults follow the reference configuration: 256 centers filtered to 128,
/// mask size 9, density neighborhood 9, and 3 + 4 aggregation repeats.
struct PipelineConfig {
    std::size_t m1 = 256;               // first-stage center count
    std::size_t m2 = 128;               // centers kept after filtering
    std::size_t mask_size = 9;          // spatial top-k mask
    std::size_t dicf_k = 9;             // density neighborhood size
    int repeats1 = 3;                   // first-stage aggregation repeats
    int repeats2 = 4;                   // second-stage aggregation repeats
    std::size_t channels = 8;           // semantic feature channels C1
    std::size_t smoothing_radius = 1;   // feature-provider box radius
    std::vector<BlockKind> blocks = {BlockKind::kAttention, BlockKind::kSsm,
                                     BlockKind::kAttention, BlockKind::kSsm};
    std::uint64_t seed = 1;

    /// Throws config_error naming the offending key.
    void validate() const;
    std::string serialize() const;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

std::string format_block_pattern(const std::vector<BlockKind>& blocks);
std::vector<BlockKind> parse_block_pattern(const std::string& text);

}  // namespace sst
