#include "sst/dicf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sst/error.hpp"
#include "sst/kernels.hpp"

namespace sst {

Matrix center_distance_matrix(const CenterSet& centers, std::size_t height, std::size_t width) {
    const std::size_t m = centers.count();
    if (m < 2) throw invalid_input_error("center_distance_matrix: need at least 2 centers");

    const double norm_spatial = static_cast<double>(std::max(height, width));
    const std::size_t b = centers.spectral.cols();
    const std::size_t bd = centers.derivative.cols();
    const std::size_t c1 = centers.semantic.cols();
    const double nb = std::sqrt(static_cast<double>(b));
    const double nbd = std::sqrt(static_cast<double>(bd));
    const double nc = std::sqrt(static_cast<double>(c1));
    const auto& k = kernels::active();

    Matrix out(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double dr = static_cast<double>(centers.coords[i].row - centers.coords[j].row);
            const double dc = static_cast<double>(centers.coords[i].col - centers.coords[j].col);
            const double spa = (dr * dr + dc * dc) / norm_spatial;
            const double s1 =
                k.squared_distance(centers.spectral.row(i), centers.spectral.row(j), b) / nb;
            const double s2 =
                k.squared_distance(centers.derivative.row(i), centers.derivative.row(j), bd) / nbd;
            const double s3 =
                k.squared_distance(centers.semantic.row(i), centers.semantic.row(j), c1) / nc;
            const double d = spa + ((s1 + s2) + s3);
            out(i, j) = d;
            out(j, i) = d;
        }
    }
    return out;
}

std::vector<double> local_density(const Matrix& center_distance, std::size_t k) {
    const std::size_t m = center_distance.rows();
    if (m < 2 || center_distance.cols() != m)
        throw invalid_input_error("local_density: distance matrix must be MxM with M >= 2");
    if (k < 1 || k >= m)
        throw invalid_input_error("local_density: K outside [1, M-1]");

    std::vector<double> density(m);
    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
        scratch.clear();
        for (std::size_t i = 0; i < m; ++i)
            if (i != j) scratch.push_back({center_distance(j, i), i});
        std::partial_sort(scratch.begin(), scratch.begin() + static_cast<long>(k), scratch.end());
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += scratch[i].first * scratch[i].first;
        density[j] = std::exp(-acc / static_cast<double>(k));
    }
    return density;
}

std::vector<double> isolation(const Matrix& center_distance, const std::vector<double>& density) {
    const std::size_t m = center_distance.rows();
    if (density.size() != m)
        throw invalid_input_error("isolation: density size disagrees with distance matrix");

    std::vector<double> eta(m);
    for (std::size_t j = 0; j < m; ++j) {
        double min_denser = std::numeric_limits<double>::infinity();
        double row_max = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            row_max = std::max(row_max, center_distance(j, i));
            if (density[i] > density[j]) min_denser = std::min(min_denser, center_distance(j, i));
        }
        eta[j] = std::isfinite(min_denser) ? min_denser : row_max;
    }
    return eta;
}

CenterGraph build_center_graph(const CenterSet& centers, std::size_t height, std::size_t width,
                               std::size_t k) {
    CenterGraph graph;
    graph.distance = center_distance_matrix(centers, height, width);
    graph.density = local_density(graph.distance, k);
    graph.isolation = isolation(graph.distance, graph.density);
    graph.max_distance = *std::max_element(graph.distance.data(),
                                           graph.distance.data() + graph.distance.size());
    graph.score.resize(centers.count());
    for (std::size_t j = 0; j < centers.count(); ++j)
        graph.score[j] = graph.density[j] * graph.isolation[j];
    return graph;
}

std::pair<double, double> separation_loss(const Matrix& kept_features) {
    const std::size_t m = kept_features.rows();
    if (m < 2) throw invalid_input_error("separation_loss: need at least 2 centers");

    const auto& k = kernels::active();
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            acc += std::sqrt(
                k.squared_distance(kept_features.row(i), kept_features.row(j), kept_features.cols()));
    const double de = 2.0 * acc / (static_cast<double>(m) * static_cast<double>(m - 1));
    if (de == 0.0)
        throw degenerate_input_error("separation_loss: all kept features identical");
    return {de, 1.0 / de};
}

FilterResult filter_centers(const SupertokenSet& tokens, const CenterSet& centers,
                            std::size_t k, std::size_t keep, std::size_t height,
                            std::size_t width) {
    const std::size_t m = centers.count();
    if (keep < 1 || keep > m)
        throw invalid_input_error("filter_centers: keep count outside [1, M]");
    if (tokens.features.rows() != m)
        throw invalid_input_error("filter_centers: token count disagrees with centers");

    // Score on the aggregated token features; spectral/derivative rows are the
    // centers' original samples.
    CenterSet scored = centers;
    scored.semantic = tokens.features;
    const CenterGraph graph = build_center_graph(scored, height, width, k);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (graph.score[a] != graph.score[b]) return graph.score[a] > graph.score[b];
        return a < b;
    });

    FilterResult result;
    result.scores = graph.score;
    result.kept_indices.assign(order.begin(), order.begin() + static_cast<long>(keep));

    if (keep >= 2) {
        Matrix kept_features(keep, tokens.features.cols());
        for (std::size_t i = 0; i < keep; ++i) {
            const double* src = tokens.features.row(result.kept_indices[i]);
            std::copy(src, src + tokens.features.cols(), kept_features.row(i));
        }
        const auto [de, loss] = separation_loss(kept_features);
        result.mean_pairwise_distance = de;
        result.separation = loss;
    } else {
        result.mean_pairwise_distance = std::numeric_limits<double>::quiet_NaN();
        result.separation = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

CenterSet select_centers(const CenterSet& centers, std::span<const std::size_t> indices) {
    CenterSet out;
    out.coords.reserve(indices.size());
    out.spectral = Matrix(indices.size(), centers.spectral.cols());
    out.derivative = Matrix(indices.size(), centers.derivative.cols());
    out.semantic = Matrix(indices.size(), centers.semantic.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        if (src >= centers.count())
            throw invalid_input_error("select_centers: index out of range");
        out.coords.push_back(centers.coords[src]);
        std::copy(centers.spectral.row(src), centers.spectral.row(src) + centers.spectral.cols(),
                  out.spectral.row(i));
        std::copy(centers.derivative.row(src),
                  centers.derivative.row(src) + centers.derivative.cols(), out.derivative.row(i));
        std::copy(centers.semantic.row(src), centers.semantic.row(src) + centers.semantic.cols(),
                  out.semantic.row(i));
    }
    return out;
}

}  // namespace sst
