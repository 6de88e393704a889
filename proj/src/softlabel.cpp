#include "sst/softlabel.hpp"

#include <algorithm>
#include <cmath>

#include "sst/error.hpp"

namespace sst {

namespace {
constexpr double kLogFloor = 1e-12;
}

std::vector<std::int32_t> hard_assign(const AssociationMatrix& assoc) {
    std::vector<std::int32_t> assignment(assoc.pixel_count);
    for (std::size_t p = 0; p < assoc.pixel_count; ++p) {
        const auto idx = assoc.indices(p);
        const auto w = assoc.weights(p);
        if (idx.empty())
            throw invalid_input_error("hard_assign: pixel " + std::to_string(p) +
                                      " has no stored association");
        // Entries are stored in ascending center-index order, so a strict
        // comparison keeps the lowest index among ties.
        std::size_t best = 0;
        for (std::size_t j = 1; j < idx.size(); ++j)
            if (w[j] > w[best]) best = j;
        assignment[p] = idx[best];
    }
    return assignment;
}

Matrix class_counts(std::span<const std::int32_t> assignment, const LabelMap& labels,
                    std::size_t token_count) {
    if (assignment.size() != labels.labels().size())
        throw invalid_input_error("class_counts: assignment size disagrees with label map");
    Matrix counts(token_count, labels.class_count(), 0.0);
    for (std::size_t p = 0; p < assignment.size(); ++p) {
        const std::uint16_t label = labels.labels()[p];
        if (label == 0) continue;
        const std::size_t tok = static_cast<std::size_t>(assignment[p]);
        if (tok >= token_count)
            throw invalid_input_error("class_counts: assignment refers to unknown token");
        counts(tok, static_cast<std::size_t>(label - 1)) += 1.0;
    }
    return counts;
}

SoftLabelMatrix soft_labels(const Matrix& counts) {
    SoftLabelMatrix out;
    out.probabilities = Matrix(counts.rows(), counts.cols(), 0.0);
    out.valid.assign(counts.rows(), false);
    for (std::size_t m = 0; m < counts.rows(); ++m) {
        double total = 0.0;
        for (std::size_t c = 0; c < counts.cols(); ++c) {
            if (counts(m, c) < 0.0)
                throw invalid_input_error("soft_labels: negative count");
            total += counts(m, c);
        }
        if (total <= 0.0) continue;
        out.valid[m] = true;
        for (std::size_t c = 0; c < counts.cols(); ++c)
            out.probabilities(m, c) = counts(m, c) / total;
    }
    return out;
}

double soft_cross_entropy(const Matrix& predictions, const SoftLabelMatrix& labels) {
    if (predictions.rows() != labels.token_count() ||
        predictions.cols() != labels.class_count())
        throw invalid_input_error("soft_cross_entropy: shape mismatch");

    for (std::size_t m = 0; m < predictions.rows(); ++m) {
        double sum = 0.0;
        for (std::size_t c = 0; c < predictions.cols(); ++c) {
            // negated comparisons so NaN entries fail too
            if (!(predictions(m, c) >= 0.0))
                throw invalid_input_error("soft_cross_entropy: negative or non-finite probability");
            sum += predictions(m, c);
        }
        if (!(std::abs(sum - 1.0) <= 1e-6))
            throw invalid_input_error("soft_cross_entropy: prediction row does not sum to 1");
    }

    double acc = 0.0;
    std::size_t valid_count = 0;
    for (std::size_t m = 0; m < predictions.rows(); ++m) {
        if (!labels.valid[m]) continue;
        ++valid_count;
        for (std::size_t c = 0; c < predictions.cols(); ++c) {
            const double l = labels.probabilities(m, c);
            if (l == 0.0) continue;
            acc -= l * std::log(std::max(predictions(m, c), kLogFloor));
        }
    }
    if (valid_count == 0)
        throw degenerate_input_error("soft_cross_entropy: no valid tokens");
    return acc / static_cast<double>(valid_count);
}

double total_loss(double cross_entropy, double separation) {
    if (!std::isfinite(cross_entropy) || !std::isfinite(separation))
        throw invalid_input_error("total_loss: non-finite term");
    return cross_entropy + separation;
}

LabelMap project_to_pixels(std::span<const std::int32_t> assignment,
                           std::span<const std::uint16_t> token_classes, std::size_t height,
                           std::size_t width, std::uint16_t class_count) {
    if (assignment.size() != height * width)
        throw invalid_input_error("project_to_pixels: assignment does not cover all pixels");
    std::vector<std::uint16_t> labels(assignment.size());
    for (std::size_t p = 0; p < assignment.size(); ++p) {
        const std::size_t tok = static_cast<std::size_t>(assignment[p]);
        if (tok >= token_classes.size())
            throw invalid_input_error("project_to_pixels: assignment refers to unknown token");
        labels[p] = token_classes[tok];
    }
    return LabelMap(height, width, class_count, std::move(labels));
}

}  // namespace sst
