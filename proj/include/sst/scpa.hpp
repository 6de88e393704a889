#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sst/cube.hpp"
#include "sst/matrix.hpp"

namespace sst {

/// Clustering centers with their sampled feature rows. Coordinates are
/// pairwise distinct and in-bounds; feature rows are finite.
struct CenterSet {
    std::vector<PixelCoord> coords;  // M x (row, col)
    Matrix spectral;                 // M x B
    Matrix derivative;               // M x (B-1)
    Matrix semantic;                 // M x C1

    std::size_t count() const noexcept { return coords.size(); }
};

/// Pixel and center features the aggregation operates on. The three views
/// share the same H x W grid.
struct PixelFeatures {
    PlaneView spectra;     // B channels
    PlaneView derivative;  // B-1 channels
    PlaneView semantic;    // C1 channels

    std::size_t height() const noexcept { return spectra.height; }
    std::size_t width() const noexcept { return spectra.width; }
    std::size_t pixel_count() const noexcept { return spectra.pixel_count(); }
};

PixelFeatures make_pixel_features(const HsiCube& cube, const SpectralDerivative& deriv,
                                  const FeatureMap& features);

/// Uniform grid initialization: g_r = round(sqrt(M*H/W)) clamped to [1,H],
/// g_c = ceil(M/g_r) clamped to [1,W], first M cells row-major, each center at
/// the floor of its cell's midpoint. When the clamped grid has fewer than M
/// cells, g_r is raised to ceil(M/g_c).
std::vector<PixelCoord> init_center_grid(std::size_t height, std::size_t width,
                                         std::size_t target_count);

/// Samples spectral / derivative / semantic rows at the given coordinates and
/// validates distinctness and bounds.
CenterSet make_center_set(const PixelFeatures& pixels, std::vector<PixelCoord> coords);

/// N x M pixel-to-center distances. total = spatial + feature element-wise.
struct DistanceMatrix {
    Matrix total;
    std::optional<Matrix> spatial;
    std::optional<Matrix> feature;
};

/// Squared Euclidean coordinate distance divided by max(H, W).
Matrix spatial_distance(std::span<const PixelCoord> pixel_coords,
                        std::span<const PixelCoord> center_coords, std::size_t height,
                        std::size_t width);

/// Sum of squared-distance terms over spectra, derivatives and semantic
/// features, each normalized by the square root of its channel count.
Matrix feature_distance(const Matrix& pixel_spectra, const Matrix& pixel_derivs,
                        const Matrix& pixel_semantic, const CenterSet& centers);

/// Convenience composition retaining both components.
DistanceMatrix multi_criteria_distance(const PixelFeatures& pixels, const CenterSet& centers);

/// Sparse pixel-to-center affinities: per pixel, at most `mask_size` entries
/// (the spatially nearest centers, ties to the lower center index), stored in
/// ascending center-index order with weights exp(-D). Rows are CSR-indexed so
/// tiled variants can keep fewer centers per pixel.
struct AssociationMatrix {
    std::size_t pixel_count = 0;
    std::size_t center_count = 0;
    std::size_t mask_size = 0;
    std::vector<std::size_t> offsets;        // N + 1
    std::vector<std::int32_t> center_index;  // entries, ascending per pixel
    std::vector<double> weight;

    std::span<const std::int32_t> indices(std::size_t pixel) const {
        return {center_index.data() + offsets[pixel], offsets[pixel + 1] - offsets[pixel]};
    }
    std::span<const double> weights(std::size_t pixel) const {
        return {weight.data() + offsets[pixel], offsets[pixel + 1] - offsets[pixel]};
    }
};

AssociationMatrix associate(const DistanceMatrix& distance, std::size_t mask_size,
                            std::span<const PixelCoord> pixel_coords,
                            std::span<const PixelCoord> center_coords);

/// Aggregated supertokens with provenance: per token, the contributing
/// (pixel, weight) pairs in ascending pixel order.
struct SupertokenSet {
    Matrix features;  // M x C1
    std::vector<PixelCoord> center_coords;
    std::vector<std::size_t> offsets;  // M+1, CSR over the two arrays below
    std::vector<std::int64_t> pixel_index;
    std::vector<double> pixel_weight;

    std::size_t count() const noexcept { return center_coords.size(); }
};

/// token_m = (center_m + sum_i w_i f_i) / (1 + sum_i w_i), pixels ascending.
SupertokenSet aggregate(const AssociationMatrix& assoc, const PlaneView& pixel_semantic,
                        const CenterSet& centers, int threads = 1);

struct ScpaResult {
    SupertokenSet tokens;
    AssociationMatrix assoc;
    CenterSet centers;  // semantic rows replaced by the aggregated features
};

/// One association + aggregation pass. Never materializes the dense N x M
/// distance matrix: distances are evaluated only on each pixel's mask.
ScpaResult scpa_block(const PixelFeatures& pixels, const CenterSet& centers,
                      std::size_t mask_size, int threads = 1);

/// `repeats` sequential blocks. Only the centers' semantic rows change between
/// repeats, so the spatial mask and the spectral/derivative distance terms are
/// computed once and reused; results are bit-identical to chained scpa_block
/// calls.
ScpaResult scpa_group(const PixelFeatures& pixels, CenterSet centers, std::size_t mask_size,
                      int repeats, int threads = 1);

}  // namespace sst
