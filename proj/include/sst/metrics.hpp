#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sst/cube.hpp"

namespace sst {

/// C x C counts, rows = ground truth, columns = prediction. Pixels with
/// ground-truth label 0 are excluded.
struct ConfusionMatrix {
    std::size_t class_count = 0;
    std::vector<std::int64_t> counts;  // class_count * class_count

    std::int64_t& at(std::size_t gt, std::size_t pred) {
        return counts[gt * class_count + pred];
    }
    std::int64_t at(std::size_t gt, std::size_t pred) const {
        return counts[gt * class_count + pred];
    }
    std::int64_t total() const;
};

ConfusionMatrix confusion(const LabelMap& ground_truth, const LabelMap& prediction);

struct Scores {
    double oa = 0.0;
    double aa = 0.0;
    double cf1 = 0.0;
    double kappa = 0.0;
    double miou = 0.0;
    // Per class (0-based over classes 1..C); entries for classes absent from
    // both ground truth and prediction are set to -1 and excluded from the
    // averages.
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<double> iou;
};

/// OA, AA (mean recall over classes present in the ground truth), CF1 and
/// mIoU (means over classes present in ground truth or prediction), and
/// Cohen's kappa.
Scores scores(const ConfusionMatrix& cm);

/// Flat key=value report with a fixed, documented key order.
std::string format_metric_report(const Scores& s, std::int64_t evaluated_pixels);

}  // namespace sst
