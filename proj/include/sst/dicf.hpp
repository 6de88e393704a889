#pragma once

#include <cstddef>
#include <vector>

#include "sst/matrix.hpp"
#include "sst/scpa.hpp"

namespace sst {

/// Center-to-center structure: symmetric zero-diagonal distance matrix plus
/// per-center density rho in (0,1], isolation eta in (0, D_max] and their
/// product score.
struct CenterGraph {
    Matrix distance;
    std::vector<double> density;
    std::vector<double> isolation;
    std::vector<double> score;
    double max_distance = 0.0;
};

/// Same spatial + multi-feature distance formulas as the pixel-to-center
/// path, applied center-to-center. Symmetric with an exactly zero diagonal.
Matrix center_distance_matrix(const CenterSet& centers, std::size_t height, std::size_t width);

/// rho(j) = exp(-mean of squared distances to the K nearest other centers),
/// ties toward the lower index. Requires 1 <= K <= M-1.
std::vector<double> local_density(const Matrix& center_distance, std::size_t k);

/// eta(j) = min distance to any strictly denser center; the density peak
/// (every center with no strictly denser one) takes its row maximum instead.
std::vector<double> isolation(const Matrix& center_distance, const std::vector<double>& density);

CenterGraph build_center_graph(const CenterSet& centers, std::size_t height, std::size_t width,
                               std::size_t k);

struct FilterResult {
    std::vector<std::size_t> kept_indices;  // sorted by descending score, ties to lower index
    std::vector<double> scores;             // all M1 scores
    double mean_pairwise_distance = 0.0;    // d_e over the kept features
    double separation = 0.0;                // L_sst = 1 / d_e
};

/// d_e = mean Euclidean (non-squared) distance over ordered distinct pairs of
/// rows; returns (d_e, 1/d_e). Errors when all rows coincide.
std::pair<double, double> separation_loss(const Matrix& kept_features);

/// Scores every center by density * isolation and keeps the `keep` highest.
/// Kept centers keep their original rows; nothing is merged.
FilterResult filter_centers(const SupertokenSet& tokens, const CenterSet& centers,
                            std::size_t k, std::size_t keep, std::size_t height,
                            std::size_t width);

/// Row-gather of a CenterSet at the given indices, in the given order.
CenterSet select_centers(const CenterSet& centers, std::span<const std::size_t> indices);

}  // namespace sst
