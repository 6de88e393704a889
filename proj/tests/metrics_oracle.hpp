#pragma once

// Independent second implementation of the classification scores, structured
// around explicit per-class TP/FP/FN instead of the production row/column
// sums. Used by the unit suite and the acceptance gate.

#include <cstddef>

#include "sst/metrics.hpp"

namespace sst_test {

struct OracleScores {
    double oa, aa, cf1, kappa, miou;
};

inline OracleScores oracle_scores(const sst::ConfusionMatrix& cm) {
    const std::size_t c = cm.class_count;
    double total = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) total += static_cast<double>(cm.at(i, j));
    for (std::size_t i = 0; i < c; ++i) diag += static_cast<double>(cm.at(i, i));

    OracleScores s{};
    s.oa = diag / total;

    double recall_sum = 0.0, f1_sum = 0.0, iou_sum = 0.0, pe = 0.0;
    std::size_t gt_present = 0, any_present = 0;
    for (std::size_t k = 0; k < c; ++k) {
        double tp = static_cast<double>(cm.at(k, k));
        double fn = 0.0, fp = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            if (j != k) {
                fn += static_cast<double>(cm.at(k, j));
                fp += static_cast<double>(cm.at(j, k));
            }
        }
        const double gt = tp + fn;
        const double pred = tp + fp;
        pe += gt * pred;
        if (gt > 0.0) {
            ++gt_present;
            recall_sum += tp / gt;
        }
        if (gt > 0.0 || pred > 0.0) {
            ++any_present;
            const double precision = pred > 0.0 ? tp / pred : 0.0;
            const double recall = gt > 0.0 ? tp / gt : 0.0;
            f1_sum += precision + recall > 0.0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
            iou_sum += (tp + fp + fn) > 0.0 ? tp / (tp + fp + fn) : 0.0;
        }
    }
    s.aa = gt_present > 0 ? recall_sum / static_cast<double>(gt_present) : 0.0;
    s.cf1 = any_present > 0 ? f1_sum / static_cast<double>(any_present) : 0.0;
    s.miou = any_present > 0 ? iou_sum / static_cast<double>(any_present) : 0.0;
    pe /= total * total;
    s.kappa = pe < 1.0 ? (s.oa - pe) / (1.0 - pe) : 1.0;
    return s;
}

}  // namespace sst_test
