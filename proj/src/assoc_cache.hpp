#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sst/cube.hpp"
#include "sst/matrix.hpp"
#include "sst/scpa.hpp"

// Shared internals of the masked association paths (global and tiled). A
// cache pins, per pixel, the kept center ids plus the distance terms that do
// not change while the centers' semantic rows update: the normalized spatial
// term and the spectral + derivative feature terms.
namespace sst::detail {

struct AssocCache {
    std::size_t pixel_count = 0;
    std::size_t center_count = 0;
    std::size_t mask_size = 0;                // maximum entries per pixel
    std::vector<std::size_t> offsets;         // N + 1
    std::vector<std::int32_t> center_index;   // ascending per pixel
    std::vector<double> spatial_term;         // D_spa on kept pairs
    std::vector<double> static_feature_term;  // spectral + derivative terms
};

/// Weights for the current semantic rows, composed exactly like the dense
/// path: D = D_spa + ((s1 + s2) + s3), weight = exp(-D).
AssociationMatrix cache_associate(const AssocCache& cache, const PlaneView& pixel_semantic,
                                  const Matrix& center_semantic, int threads);

/// Global-grid cache: per pixel the `mask_size` spatially nearest centers,
/// ties to the lower index. Spatial term normalized by max(H, W).
AssocCache build_global_cache(const PixelFeatures& pixels, const CenterSet& centers,
                              std::size_t mask_size, int threads);

/// Center coordinates split into contiguous double columns so the coordinate
/// distance kernel can stream them.
struct CoordColumns {
    std::vector<double> rows;
    std::vector<double> cols;
};

CoordColumns split_coords(std::span<const PixelCoord> coords);

/// Indices of the k smallest entries of d2 (ties to the lower index), written
/// in ascending index order. `best` and `candidates` are reusable scratch.
/// bound_hint, when nonnegative, must be an upper bound on the k-th smallest
/// entry; it only narrows the scan, never the result. Returns the k-th
/// smallest value so callers can derive the next pixel's hint.
double select_k_smallest(const double* d2, std::size_t m, std::size_t k, double bound_hint,
                         std::vector<std::pair<double, std::int32_t>>& best,
                         std::vector<std::int32_t>& candidates, std::int32_t* out);

}  // namespace sst::detail
