#include "sst/scpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "assoc_cache.hpp"
#include "sst/error.hpp"
#include "sst/features.hpp"
#include "sst/kernels.hpp"
#include "sst/parallel.hpp"

namespace sst {

namespace {

void validate_pixel_features(const PixelFeatures& px) {
    const std::size_t h = px.spectra.height, w = px.spectra.width;
    if (px.derivative.height != h || px.derivative.width != w ||
        px.semantic.height != h || px.semantic.width != w)
        throw invalid_input_error("PixelFeatures: views disagree on grid size");
    if (px.derivative.channels + 1 != px.spectra.channels)
        throw invalid_input_error("PixelFeatures: derivative must have B-1 channels");
}

void validate_center_dims(const PixelFeatures& px, const CenterSet& centers) {
    if (centers.spectral.cols() != px.spectra.channels ||
        centers.derivative.cols() != px.derivative.channels ||
        centers.semantic.cols() != px.semantic.channels)
        throw invalid_input_error("CenterSet: feature widths disagree with pixel features");
    const std::size_t m = centers.count();
    if (centers.spectral.rows() != m || centers.derivative.rows() != m ||
        centers.semantic.rows() != m)
        throw invalid_input_error("CenterSet: row counts disagree with coordinate count");
}

}  // namespace

namespace detail {

CoordColumns split_coords(std::span<const PixelCoord> coords) {
    CoordColumns columns;
    columns.rows.reserve(coords.size());
    columns.cols.reserve(coords.size());
    for (const PixelCoord& c : coords) {
        columns.rows.push_back(static_cast<double>(c.row));
        columns.cols.push_back(static_cast<double>(c.col));
    }
    return columns;
}

namespace {

// Exact bounded insertion over candidate indices in ascending order; the
// lexicographic (distance, index) order implements the lower-index tie rule,
// and because indices ascend, a tie with the current worst can never improve
// the set, so d >= worst is an exact rejection.
void bounded_insert(const double* d2, const std::int32_t* candidates,
                    std::size_t candidate_count, std::size_t k,
                    std::vector<std::pair<double, std::int32_t>>& best) {
    best.clear();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < candidate_count; ++t) {
        const std::int32_t idx = candidates[t];
        const double d = d2[static_cast<std::size_t>(idx)];
        if (best.size() == k) {
            if (d >= worst) continue;
            best.pop_back();
        }
        const std::pair<double, std::int32_t> cand{d, idx};
        best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        if (best.size() == k) worst = best.back().first;
    }
}

}  // namespace

double select_k_smallest(const double* d2, std::size_t m, std::size_t k, double bound_hint,
                         std::vector<std::pair<double, std::int32_t>>& best,
                         std::vector<std::int32_t>& candidates, std::int32_t* out) {
    candidates.resize(m);

    if (m <= 4 * k) {
        for (std::size_t i = 0; i < m; ++i) candidates[i] = static_cast<std::int32_t>(i);
        bounded_insert(d2, candidates.data(), m, k, best);
    } else {
        double bound = bound_hint;
        if (!(bound >= 0.0)) {
            // No hint: a strided probe set yields a valid (if loose) upper
            // bound on the k-th smallest distance.
            const std::size_t stride = m / (2 * k);
            std::size_t probe = 0;
            for (std::size_t i = 0; probe < m && i < 2 * k; ++i, probe += stride)
                candidates[i] = static_cast<std::int32_t>(probe);
            bounded_insert(d2, candidates.data(), std::min<std::size_t>(2 * k, m), k, best);
            bound = best.back().first;
        }
        // Collect everything at or below the bound; the true k-set is a
        // subset, so the exact rule over the survivors loses nothing.
        std::size_t found = kernels::active().indices_at_most(d2, m, bound, candidates.data());
        if (found < k) {  // defensive: an invalid hint falls back to the full scan
            for (std::size_t i = 0; i < m; ++i) candidates[i] = static_cast<std::int32_t>(i);
            found = m;
        }
        bounded_insert(d2, candidates.data(), found, k, best);
    }
    for (std::size_t i = 0; i < k; ++i) out[i] = best[i].second;
    std::sort(out, out + k);
    return best.back().first;
}

}  // namespace detail

PixelFeatures make_pixel_features(const HsiCube& cube, const SpectralDerivative& deriv,
                                  const FeatureMap& features) {
    PixelFeatures px{cube.plane(), deriv.plane(), features.plane()};
    validate_pixel_features(px);
    return px;
}

std::vector<PixelCoord> init_center_grid(std::size_t height, std::size_t width,
                                         std::size_t target_count) {
    if (target_count < 1 || target_count > height * width)
        throw invalid_input_error("init_center_grid: target count outside [1, H*W]");

    const double ratio = static_cast<double>(target_count) * static_cast<double>(height) /
                         static_cast<double>(width);
    std::size_t rows = static_cast<std::size_t>(std::llround(std::sqrt(ratio)));
    rows = std::clamp<std::size_t>(rows, 1, height);
    std::size_t cols = std::clamp<std::size_t>((target_count + rows - 1) / rows, 1, width);
    if (rows * cols < target_count)  // clamped grid under-produces; widen rows
        rows = std::clamp<std::size_t>((target_count + cols - 1) / cols, 1, height);

    std::vector<PixelCoord> coords;
    coords.reserve(target_count);
    for (std::size_t i = 0; i < rows && coords.size() < target_count; ++i) {
        const std::size_t lo_r = i * height / rows;
        const std::size_t hi_r = (i + 1) * height / rows;
        const std::int32_t mid_r = static_cast<std::int32_t>((lo_r + hi_r) / 2);
        for (std::size_t j = 0; j < cols && coords.size() < target_count; ++j) {
            const std::size_t lo_c = j * width / cols;
            const std::size_t hi_c = (j + 1) * width / cols;
            coords.push_back({mid_r, static_cast<std::int32_t>((lo_c + hi_c) / 2)});
        }
    }
    return coords;
}

CenterSet make_center_set(const PixelFeatures& pixels, std::vector<PixelCoord> coords) {
    validate_pixel_features(pixels);
    std::unordered_set<std::int64_t> seen;
    for (const PixelCoord& c : coords) {
        if (c.row < 0 || c.col < 0 || static_cast<std::size_t>(c.row) >= pixels.height() ||
            static_cast<std::size_t>(c.col) >= pixels.width())
            throw invalid_input_error("make_center_set: coordinate out of bounds");
        const std::int64_t key = static_cast<std::int64_t>(c.row) *
                                     static_cast<std::int64_t>(pixels.width()) +
                                 c.col;
        if (!seen.insert(key).second)
            throw invalid_input_error("make_center_set: duplicate center coordinate");
    }
    CenterSet set;
    set.spectral = sample_at(coords, pixels.spectra);
    set.derivative = sample_at(coords, pixels.derivative);
    set.semantic = sample_at(coords, pixels.semantic);
    set.coords = std::move(coords);
    return set;
}

Matrix spatial_distance(std::span<const PixelCoord> pixel_coords,
                        std::span<const PixelCoord> center_coords, std::size_t height,
                        std::size_t width) {
    const double norm = static_cast<double>(std::max(height, width));
    const detail::CoordColumns columns = detail::split_coords(center_coords);
    const auto& k = kernels::active();
    Matrix out(pixel_coords.size(), center_coords.size());
    for (std::size_t n = 0; n < pixel_coords.size(); ++n) {
        double* row = out.row(n);
        k.coord_squared_distances(static_cast<double>(pixel_coords[n].row),
                                  static_cast<double>(pixel_coords[n].col),
                                  columns.rows.data(), columns.cols.data(), row,
                                  center_coords.size());
        for (std::size_t m = 0; m < center_coords.size(); ++m) row[m] /= norm;
    }
    return out;
}

Matrix feature_distance(const Matrix& pixel_spectra, const Matrix& pixel_derivs,
                        const Matrix& pixel_semantic, const CenterSet& centers) {
    const std::size_t n = pixel_spectra.rows();
    if (pixel_derivs.rows() != n || pixel_semantic.rows() != n)
        throw invalid_input_error("feature_distance: pixel row counts disagree");
    if (pixel_spectra.cols() != centers.spectral.cols() ||
        pixel_derivs.cols() != centers.derivative.cols() ||
        pixel_semantic.cols() != centers.semantic.cols())
        throw invalid_input_error("feature_distance: feature widths disagree with centers");

    const std::size_t b = pixel_spectra.cols();
    const std::size_t bd = pixel_derivs.cols();
    const std::size_t c1 = pixel_semantic.cols();
    const double nb = std::sqrt(static_cast<double>(b));
    const double nbd = std::sqrt(static_cast<double>(bd));
    const double nc = std::sqrt(static_cast<double>(c1));
    const auto& k = kernels::active();

    const std::size_t m = centers.count();
    Matrix out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = out.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double s1 =
                k.squared_distance(pixel_spectra.row(i), centers.spectral.row(j), b) / nb;
            const double s2 =
                k.squared_distance(pixel_derivs.row(i), centers.derivative.row(j), bd) / nbd;
            const double s3 =
                k.squared_distance(pixel_semantic.row(i), centers.semantic.row(j), c1) / nc;
            row[j] = (s1 + s2) + s3;
        }
    }
    return out;
}

namespace {

Matrix plane_to_matrix(const PlaneView& v) {
    Matrix out(v.pixel_count(), v.channels);
    std::copy(v.values, v.values + v.pixel_count() * v.channels, out.data());
    return out;
}

}  // namespace

DistanceMatrix multi_criteria_distance(const PixelFeatures& pixels, const CenterSet& centers) {
    validate_pixel_features(pixels);
    validate_center_dims(pixels, centers);
    std::vector<PixelCoord> pixel_coords;
    pixel_coords.reserve(pixels.pixel_count());
    for (std::size_t r = 0; r < pixels.height(); ++r)
        for (std::size_t c = 0; c < pixels.width(); ++c)
            pixel_coords.push_back({static_cast<std::int32_t>(r), static_cast<std::int32_t>(c)});

    DistanceMatrix d;
    d.spatial = spatial_distance(pixel_coords, centers.coords, pixels.height(), pixels.width());
    d.feature = feature_distance(plane_to_matrix(pixels.spectra),
                                 plane_to_matrix(pixels.derivative),
                                 plane_to_matrix(pixels.semantic), centers);
    d.total = Matrix(d.spatial->rows(), d.spatial->cols());
    for (std::size_t i = 0; i < d.total.size(); ++i)
        d.total.data()[i] = d.spatial->data()[i] + d.feature->data()[i];
    return d;
}

AssociationMatrix associate(const DistanceMatrix& distance, std::size_t mask_size,
                            std::span<const PixelCoord> pixel_coords,
                            std::span<const PixelCoord> center_coords) {
    const std::size_t n = distance.total.rows();
    const std::size_t m = distance.total.cols();
    if (mask_size < 1 || mask_size > m)
        throw invalid_input_error("associate: mask size outside [1, M]");
    if (pixel_coords.size() != n || center_coords.size() != m)
        throw invalid_input_error("associate: coordinate counts disagree with distance matrix");

    AssociationMatrix assoc;
    assoc.pixel_count = n;
    assoc.center_count = m;
    assoc.mask_size = mask_size;
    assoc.offsets.resize(n + 1);
    for (std::size_t p = 0; p <= n; ++p) assoc.offsets[p] = p * mask_size;
    assoc.center_index.resize(n * mask_size);
    assoc.weight.resize(n * mask_size);

    const detail::CoordColumns columns = detail::split_coords(center_coords);
    const auto& kern = kernels::active();
    std::vector<double> d2(m);
    std::vector<std::pair<double, std::int32_t>> scratch;
    std::vector<std::int32_t> cand_scratch;
    scratch.reserve(mask_size + 1);
    for (std::size_t p = 0; p < n; ++p) {
        std::int32_t* idx = assoc.center_index.data() + assoc.offsets[p];
        kern.coord_squared_distances(static_cast<double>(pixel_coords[p].row),
                                     static_cast<double>(pixel_coords[p].col),
                                     columns.rows.data(), columns.cols.data(), d2.data(), m);
        detail::select_k_smallest(d2.data(), m, mask_size, -1.0, scratch, cand_scratch, idx);
        double* w = assoc.weight.data() + assoc.offsets[p];
        for (std::size_t j = 0; j < mask_size; ++j)
            w[j] = std::exp(-distance.total(p, static_cast<std::size_t>(idx[j])));
    }
    return assoc;
}

SupertokenSet aggregate(const AssociationMatrix& assoc, const PlaneView& pixel_semantic,
                        const CenterSet& centers, int threads) {
    const std::size_t m = centers.count();
    const std::size_t c1 = centers.semantic.cols();
    if (assoc.center_count != m)
        throw invalid_input_error("aggregate: association center count disagrees");
    if (pixel_semantic.pixel_count() != assoc.pixel_count)
        throw invalid_input_error("aggregate: pixel count disagrees");
    if (pixel_semantic.channels != c1)
        throw invalid_input_error("aggregate: semantic widths disagree");

    SupertokenSet tokens;
    tokens.center_coords = centers.coords;
    tokens.offsets.assign(m + 1, 0);

    const std::size_t entries = assoc.center_index.size();
    for (std::size_t e = 0; e < entries; ++e)
        ++tokens.offsets[static_cast<std::size_t>(assoc.center_index[e]) + 1];
    for (std::size_t j = 0; j < m; ++j) tokens.offsets[j + 1] += tokens.offsets[j];

    tokens.pixel_index.resize(entries);
    tokens.pixel_weight.resize(entries);
    std::vector<std::size_t> cursor(tokens.offsets.begin(), tokens.offsets.end() - 1);
    for (std::size_t p = 0; p < assoc.pixel_count; ++p) {
        for (std::size_t e = assoc.offsets[p]; e < assoc.offsets[p + 1]; ++e) {
            const std::size_t tok = static_cast<std::size_t>(assoc.center_index[e]);
            tokens.pixel_index[cursor[tok]] = static_cast<std::int64_t>(p);
            tokens.pixel_weight[cursor[tok]] = assoc.weight[e];
            ++cursor[tok];
        }
    }

    // Tokens are independent; within a token the reduction runs in ascending
    // pixel order, so the result does not depend on the thread count.
    tokens.features = Matrix(m, c1);
    const auto& k = kernels::active();
    parallel_for(0, m, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t tok = lo; tok < hi; ++tok) {
            double* acc = tokens.features.row(tok);
            std::copy(centers.semantic.row(tok), centers.semantic.row(tok) + c1, acc);
            double denom = 1.0;
            for (std::size_t e = tokens.offsets[tok]; e < tokens.offsets[tok + 1]; ++e) {
                const double w = tokens.pixel_weight[e];
                k.axpy(acc, pixel_semantic.pixel(static_cast<std::size_t>(tokens.pixel_index[e])),
                       w, c1);
                denom += w;
            }
            for (std::size_t ch = 0; ch < c1; ++ch) acc[ch] /= denom;
        }
    });
    return tokens;
}

namespace detail {

AssocCache build_global_cache(const PixelFeatures& px, const CenterSet& centers,
                              std::size_t mask_size, int threads) {
    const std::size_t n = px.pixel_count();
    const std::size_t w = px.width();
    const std::size_t b = px.spectra.channels;
    const std::size_t bd = px.derivative.channels;
    const double norm_spatial = static_cast<double>(std::max(px.height(), px.width()));
    const double nb = std::sqrt(static_cast<double>(b));
    const double nbd = std::sqrt(static_cast<double>(bd));

    AssocCache cache;
    cache.pixel_count = n;
    cache.center_count = centers.count();
    cache.mask_size = mask_size;
    cache.offsets.resize(n + 1);
    for (std::size_t p = 0; p <= n; ++p) cache.offsets[p] = p * mask_size;
    cache.center_index.resize(n * mask_size);
    cache.spatial_term.resize(n * mask_size);
    cache.static_feature_term.resize(n * mask_size);

    const CoordColumns columns = split_coords(centers.coords);
    const std::size_t m = centers.count();
    const auto& k = kernels::active();
    parallel_for(0, n, threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> d2(m);
        std::vector<std::pair<double, std::int32_t>> scratch;
        std::vector<std::int32_t> cand_scratch;
        scratch.reserve(mask_size + 1);
        // A pixel one column over moves every coordinate distance by at most
        // 1, so (sqrt(kth) + 1)^2 from the previous pixel bounds the next
        // k-th distance; the hint narrows the candidate scan and never
        // changes the selected set.
        double prev_kth = -1.0;
        std::size_t prev_row = static_cast<std::size_t>(-1);
        for (std::size_t p = lo; p < hi; ++p) {
            const std::size_t row = p / w;
            const double r = static_cast<double>(row);
            const double c = static_cast<double>(p % w);
            double hint = -1.0;
            if (row == prev_row && prev_kth >= 0.0)
                hint = prev_kth + 2.0 * std::sqrt(prev_kth) + 1.0 + 1e-6;
            std::int32_t* idx = cache.center_index.data() + cache.offsets[p];
            k.coord_squared_distances(r, c, columns.rows.data(), columns.cols.data(), d2.data(),
                                      m);
            prev_kth =
                select_k_smallest(d2.data(), m, mask_size, hint, scratch, cand_scratch, idx);
            prev_row = row;
            for (std::size_t j = 0; j < mask_size; ++j) {
                const std::size_t e = cache.offsets[p] + j;
                const std::size_t cm = static_cast<std::size_t>(idx[j]);
                cache.spatial_term[e] = d2[cm] / norm_spatial;
                const double s1 =
                    k.squared_distance(px.spectra.pixel(p), centers.spectral.row(cm), b) / nb;
                const double s2 =
                    k.squared_distance(px.derivative.pixel(p), centers.derivative.row(cm), bd) /
                    nbd;
                cache.static_feature_term[e] = s1 + s2;
            }
        }
    });
    return cache;
}

AssociationMatrix cache_associate(const AssocCache& cache, const PlaneView& pixel_semantic,
                                  const Matrix& center_semantic, int threads) {
    const std::size_t c1 = pixel_semantic.channels;
    const double nc = std::sqrt(static_cast<double>(c1));

    AssociationMatrix assoc;
    assoc.pixel_count = cache.pixel_count;
    assoc.center_count = cache.center_count;
    assoc.mask_size = cache.mask_size;
    assoc.offsets = cache.offsets;
    assoc.center_index = cache.center_index;
    assoc.weight.resize(cache.center_index.size());

    const auto& k = kernels::active();
    parallel_for(0, cache.pixel_count, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            for (std::size_t e = cache.offsets[p]; e < cache.offsets[p + 1]; ++e) {
                const std::size_t cm = static_cast<std::size_t>(cache.center_index[e]);
                const double s3 =
                    k.squared_distance(pixel_semantic.pixel(p), center_semantic.row(cm), c1) / nc;
                const double d = cache.spatial_term[e] + (cache.static_feature_term[e] + s3);
                assoc.weight[e] = std::exp(-d);
            }
        }
    });
    return assoc;
}

}  // namespace detail

ScpaResult scpa_group(const PixelFeatures& pixels, CenterSet centers, std::size_t mask_size,
                      int repeats, int threads) {
    validate_pixel_features(pixels);
    validate_center_dims(pixels, centers);
    if (centers.count() < 1) throw invalid_input_error("scpa_group: no centers");
    if (mask_size < 1 || mask_size > centers.count())
        throw invalid_input_error("scpa_group: mask size outside [1, M]");
    if (repeats < 1) throw invalid_input_error("scpa_group: repeats must be >= 1");

    const detail::AssocCache cache =
        detail::build_global_cache(pixels, centers, mask_size, threads);

    ScpaResult result;
    for (int rep = 0; rep < repeats; ++rep) {
        result.assoc = detail::cache_associate(cache, pixels.semantic, centers.semantic, threads);
        result.tokens = aggregate(result.assoc, pixels.semantic, centers, threads);
        centers.semantic = result.tokens.features;
    }
    result.centers = std::move(centers);
    return result;
}

ScpaResult scpa_block(const PixelFeatures& pixels, const CenterSet& centers,
                      std::size_t mask_size, int threads) {
    return scpa_group(pixels, centers, mask_size, 1, threads);
}

}  // namespace sst
