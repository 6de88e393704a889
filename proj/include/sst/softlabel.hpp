#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sst/cube.hpp"
#include "sst/matrix.hpp"
#include "sst/scpa.hpp"

namespace sst {

/// Per-pixel token index: the stored center with maximal association weight,
/// ties to the lower token index.
std::vector<std::int32_t> hard_assign(const AssociationMatrix& assoc);

/// M x C counts of labeled pixels per (token, class); label 0 (unlabeled) is
/// excluded. Entries are whole numbers.
Matrix class_counts(std::span<const std::int32_t> assignment, const LabelMap& labels,
                    std::size_t token_count);

/// Per-token class-proportion rows. Tokens owning no labeled pixel are
/// flagged invalid and their row stays all-zero.
struct SoftLabelMatrix {
    Matrix probabilities;     // M x C, valid rows sum to 1
    std::vector<bool> valid;  // false when the token has zero labeled pixels

    std::size_t token_count() const noexcept { return probabilities.rows(); }
    std::size_t class_count() const noexcept { return probabilities.cols(); }
};

SoftLabelMatrix soft_labels(const Matrix& counts);

/// Mean over valid tokens of -sum_c L(m,c) * log(max(P(m,c), 1e-12)).
/// Prediction rows must be probability distributions (sum 1 +- 1e-6,
/// entries >= 0). Errors when no token is valid.
double soft_cross_entropy(const Matrix& predictions, const SoftLabelMatrix& labels);

double total_loss(double cross_entropy, double separation);

/// Each pixel receives its token's predicted class (1-based class indices).
LabelMap project_to_pixels(std::span<const std::int32_t> assignment,
                           std::span<const std::uint16_t> token_classes, std::size_t height,
                           std::size_t width, std::uint16_t class_count);

}  // namespace sst
