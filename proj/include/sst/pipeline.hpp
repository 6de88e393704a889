#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sst/config.hpp"
#include "sst/cube.hpp"
#include "sst/dicf.hpp"
#include "sst/features.hpp"
#include "sst/scpa.hpp"

namespace sst {

struct ClusterOutput {
    SpectralDerivative derivative;
    FeatureMap features;
    CenterSet stage1_centers;   // after the first aggregation group
    SupertokenSet stage1_tokens;
    FilterResult filter;
    CenterSet centers;          // final second-stage centers (kept-score order)
    SupertokenSet tokens;       // final supertokens, one per kept center
    AssociationMatrix assoc;    // final association
    std::vector<std::int32_t> assignment;  // per-pixel token index
};

/// Full clustering pipeline: derivative -> semantic features -> grid init ->
/// repeats1 aggregation blocks -> density-isolation filtering -> repeats2
/// aggregation blocks over the kept centers -> hard assignment. Token order
/// is the kept-index order (descending filter score). The second stage clamps
/// the mask to the kept center count. Bit-identical across thread counts.
ClusterOutput run_cluster(const HsiCube& cube, const PipelineConfig& config, int threads = 1);

/// Patch-local association: the image is tiled into patch_size x patch_size
/// tiles (final tiles clamp to the image edge), each tile gets its own
/// center grid, and pixels only associate within their tile. Tile-local grids,
/// masks, normalizers and weights follow exactly the global rules applied to
/// the tile in isolation, so a single whole-image tile reproduces the global
/// path. Token indices run tile-major. Edge tiles smaller than
/// centers_per_patch or mask_size clamp both.
AssociationMatrix patch_baseline_associate(const PixelFeatures& pixels, std::size_t patch_size,
                                           std::size_t centers_per_patch,
                                           std::size_t mask_size);

struct PatchBaselineResult {
    AssociationMatrix assoc;
    SupertokenSet tokens;
    std::size_t total_centers = 0;
};

/// The iterative baseline: per tile, `iterations` association + aggregation
/// rounds with the centers' semantic rows updated between rounds.
PatchBaselineResult patch_baseline_pipeline(const PixelFeatures& pixels, std::size_t patch_size,
                                            std::size_t centers_per_patch,
                                            std::size_t mask_size, int iterations,
                                            int threads = 1);

}  // namespace sst
