#include "sst/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "assoc_cache.hpp"
#include "sst/error.hpp"
#include "sst/kernels.hpp"
#include "sst/softlabel.hpp"

namespace sst {

ClusterOutput run_cluster(const HsiCube& cube, const PipelineConfig& config, int threads) {
    config.validate();
    if (config.channels > cube.bands())
        throw config_error("channels", "semantic channels exceed the cube's band count");
    if (config.m1 > cube.pixel_count())
        throw config_error("m1", "more centers than pixels");

    SpectralDerivative deriv = spectral_derivative(cube);
    PcaFeatureProvider provider(config.channels, config.smoothing_radius);
    FeatureMap features = provider.compute(cube);
    PixelFeatures px = make_pixel_features(cube, deriv, features);

    CenterSet grid = make_center_set(
        px, init_center_grid(cube.height(), cube.width(), config.m1));
    ScpaResult stage1 =
        scpa_group(px, std::move(grid), config.mask_size, config.repeats1, threads);

    FilterResult filter = filter_centers(stage1.tokens, stage1.centers, config.dicf_k,
                                         config.m2, cube.height(), cube.width());
    CenterSet kept = select_centers(stage1.centers, filter.kept_indices);

    const std::size_t stage2_mask = std::min(config.mask_size, config.m2);
    ScpaResult stage2 = scpa_group(px, std::move(kept), stage2_mask, config.repeats2, threads);

    std::vector<std::int32_t> assignment = hard_assign(stage2.assoc);

    return ClusterOutput{std::move(deriv),
                         std::move(features),
                         std::move(stage1.centers),
                         std::move(stage1.tokens),
                         std::move(filter),
                         std::move(stage2.centers),
                         std::move(stage2.tokens),
                         std::move(stage2.assoc),
                         std::move(assignment)};
}

namespace {

struct Tile {
    std::size_t row_begin, row_end, col_begin, col_end;
    std::size_t token_base;  // first global token index of this tile
    std::vector<PixelCoord> center_coords;  // global coordinates
};

struct Tiling {
    std::vector<Tile> tiles;
    std::size_t tiles_per_row_band = 0;  // tiles per image row of tiles
    std::size_t patch_size = 0;
    std::size_t total_centers = 0;
};

Tiling build_tiling(std::size_t height, std::size_t width, std::size_t patch_size,
                    std::size_t centers_per_patch) {
    if (patch_size < 1) throw invalid_input_error("patch baseline: patch size must be >= 1");
    if (centers_per_patch < 1)
        throw invalid_input_error("patch baseline: centers per patch must be >= 1");

    Tiling tiling;
    tiling.patch_size = patch_size;
    const std::size_t tiles_r = (height + patch_size - 1) / patch_size;
    const std::size_t tiles_c = (width + patch_size - 1) / patch_size;
    tiling.tiles_per_row_band = tiles_c;
    tiling.tiles.reserve(tiles_r * tiles_c);

    std::size_t token_base = 0;
    for (std::size_t ti = 0; ti < tiles_r; ++ti) {
        for (std::size_t tj = 0; tj < tiles_c; ++tj) {
            Tile tile;
            tile.row_begin = ti * patch_size;
            tile.row_end = std::min(tile.row_begin + patch_size, height);
            tile.col_begin = tj * patch_size;
            tile.col_end = std::min(tile.col_begin + patch_size, width);
            const std::size_t th = tile.row_end - tile.row_begin;
            const std::size_t tw = tile.col_end - tile.col_begin;
            const std::size_t count = std::min(centers_per_patch, th * tw);
            tile.center_coords = init_center_grid(th, tw, count);
            for (PixelCoord& c : tile.center_coords) {
                c.row += static_cast<std::int32_t>(tile.row_begin);
                c.col += static_cast<std::int32_t>(tile.col_begin);
            }
            tile.token_base = token_base;
            token_base += count;
            tiling.tiles.push_back(std::move(tile));
        }
    }
    tiling.total_centers = token_base;
    return tiling;
}

// Per-pixel cache over tile-local centers. Spatial terms are normalized by
// the tile's own max(h, w), matching the global rules applied to the tile in
// isolation.
detail::AssocCache build_tiled_cache(const PixelFeatures& px, const Tiling& tiling,
                                     const Matrix& center_spectral,
                                     const Matrix& center_derivative, std::size_t mask_size) {
    const std::size_t n = px.pixel_count();
    const std::size_t w = px.width();
    const std::size_t b = px.spectra.channels;
    const std::size_t bd = px.derivative.channels;
    const double nb = std::sqrt(static_cast<double>(b));
    const double nbd = std::sqrt(static_cast<double>(bd));
    const auto& kern = kernels::active();

    detail::AssocCache cache;
    cache.pixel_count = n;
    cache.center_count = tiling.total_centers;
    cache.mask_size = mask_size;
    cache.offsets.assign(n + 1, 0);

    auto tile_of = [&](std::size_t p) -> const Tile& {
        const std::size_t r = p / w;
        const std::size_t c = p % w;
        return tiling.tiles[(r / tiling.patch_size) * tiling.tiles_per_row_band +
                            c / tiling.patch_size];
    };

    std::size_t max_local = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const Tile& tile = tile_of(p);
        max_local = std::max(max_local, tile.center_coords.size());
        cache.offsets[p + 1] =
            cache.offsets[p] + std::min(mask_size, tile.center_coords.size());
    }
    cache.center_index.resize(cache.offsets[n]);
    cache.spatial_term.resize(cache.offsets[n]);
    cache.static_feature_term.resize(cache.offsets[n]);

    std::vector<detail::CoordColumns> tile_columns;
    tile_columns.reserve(tiling.tiles.size());
    for (const Tile& tile : tiling.tiles)
        tile_columns.push_back(detail::split_coords(tile.center_coords));

    std::vector<double> d2(max_local);
    std::vector<std::pair<double, std::int32_t>> scratch;
    std::vector<std::int32_t> cand_scratch;
    scratch.reserve(mask_size + 1);
    std::vector<std::int32_t> local(mask_size);
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t r = p / w;
        const std::size_t c = p % w;
        const std::size_t tile_index =
            (r / tiling.patch_size) * tiling.tiles_per_row_band + c / tiling.patch_size;
        const Tile& tile = tiling.tiles[tile_index];
        const detail::CoordColumns& columns = tile_columns[tile_index];
        const std::size_t m_local = tile.center_coords.size();
        const std::size_t keep = std::min(mask_size, m_local);
        const double norm_spatial = static_cast<double>(
            std::max(tile.row_end - tile.row_begin, tile.col_end - tile.col_begin));

        kern.coord_squared_distances(static_cast<double>(r), static_cast<double>(c),
                                     columns.rows.data(), columns.cols.data(), d2.data(),
                                     m_local);
        detail::select_k_smallest(d2.data(), m_local, keep, -1.0, scratch, cand_scratch,
                                  local.data());

        for (std::size_t j = 0; j < keep; ++j) {
            const std::size_t e = cache.offsets[p] + j;
            const std::size_t global = tile.token_base + static_cast<std::size_t>(local[j]);
            cache.center_index[e] = static_cast<std::int32_t>(global);
            cache.spatial_term[e] = d2[static_cast<std::size_t>(local[j])] / norm_spatial;
            const double s1 =
                kern.squared_distance(px.spectra.pixel(p), center_spectral.row(global), b) / nb;
            const double s2 =
                kern.squared_distance(px.derivative.pixel(p), center_derivative.row(global), bd) /
                nbd;
            cache.static_feature_term[e] = s1 + s2;
        }
    }
    return cache;
}

CenterSet gather_tile_centers(const PixelFeatures& px, const Tiling& tiling) {
    std::vector<PixelCoord> coords;
    coords.reserve(tiling.total_centers);
    for (const Tile& tile : tiling.tiles)
        coords.insert(coords.end(), tile.center_coords.begin(), tile.center_coords.end());
    return make_center_set(px, std::move(coords));
}

}  // namespace

AssociationMatrix patch_baseline_associate(const PixelFeatures& pixels, std::size_t patch_size,
                                           std::size_t centers_per_patch,
                                           std::size_t mask_size) {
    if (mask_size < 1)
        throw invalid_input_error("patch baseline: mask size must be >= 1");
    const Tiling tiling =
        build_tiling(pixels.height(), pixels.width(), patch_size, centers_per_patch);
    const CenterSet centers = gather_tile_centers(pixels, tiling);
    const detail::AssocCache cache =
        build_tiled_cache(pixels, tiling, centers.spectral, centers.derivative, mask_size);
    return detail::cache_associate(cache, pixels.semantic, centers.semantic, 1);
}

PatchBaselineResult patch_baseline_pipeline(const PixelFeatures& pixels, std::size_t patch_size,
                                            std::size_t centers_per_patch,
                                            std::size_t mask_size, int iterations,
                                            int threads) {
    if (iterations < 1)
        throw invalid_input_error("patch baseline: iterations must be >= 1");
    const Tiling tiling =
        build_tiling(pixels.height(), pixels.width(), patch_size, centers_per_patch);
    CenterSet centers = gather_tile_centers(pixels, tiling);

    // Iterative refinement in the style this baseline models: every round
    // rebuilds its tile-local distances from scratch. The incremental reuse
    // of the constant terms belongs to the one-shot path.
    PatchBaselineResult result;
    result.total_centers = tiling.total_centers;
    for (int it = 0; it < iterations; ++it) {
        const detail::AssocCache cache =
            build_tiled_cache(pixels, tiling, centers.spectral, centers.derivative, mask_size);
        result.assoc = detail::cache_associate(cache, pixels.semantic, centers.semantic, threads);
        result.tokens = aggregate(result.assoc, pixels.semantic, centers, threads);
        centers.semantic = result.tokens.features;
    }
    return result;
}

}  // namespace sst
