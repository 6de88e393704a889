#include "sst/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sst/error.hpp"

namespace sst {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion(const LabelMap& ground_truth, const LabelMap& prediction) {
    if (ground_truth.height() != prediction.height() ||
        ground_truth.width() != prediction.width())
        throw invalid_input_error("confusion: shape mismatch");

    const std::size_t c = ground_truth.class_count();
    ConfusionMatrix cm;
    cm.class_count = c;
    cm.counts.assign(c * c, 0);
    for (std::size_t p = 0; p < ground_truth.labels().size(); ++p) {
        const std::uint16_t gt = ground_truth.labels()[p];
        if (gt == 0) continue;
        const std::uint16_t pred = prediction.labels()[p];
        if (pred == 0 || pred > c)
            throw invalid_input_error("confusion: prediction outside 1..C on a labeled pixel");
        ++cm.at(gt - 1, pred - 1);
    }
    return cm;
}

Scores scores(const ConfusionMatrix& cm) {
    const std::size_t c = cm.class_count;
    const double total = static_cast<double>(cm.total());
    if (total <= 0.0) throw degenerate_input_error("scores: empty confusion matrix");

    std::vector<double> row_sum(c, 0.0), col_sum(c, 0.0);
    double trace = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double v = static_cast<double>(cm.at(i, j));
            row_sum[i] += v;
            col_sum[j] += v;
        }
        trace += static_cast<double>(cm.at(i, i));
    }

    Scores s;
    s.oa = trace / total;

    s.precision.assign(c, -1.0);
    s.recall.assign(c, -1.0);
    s.f1.assign(c, -1.0);
    s.iou.assign(c, -1.0);

    double recall_acc = 0.0, f1_acc = 0.0, iou_acc = 0.0;
    std::size_t gt_classes = 0, present_classes = 0;
    for (std::size_t i = 0; i < c; ++i) {
        const double tp = static_cast<double>(cm.at(i, i));
        const bool in_gt = row_sum[i] > 0.0;
        const bool in_pred = col_sum[i] > 0.0;
        if (!in_gt && !in_pred) continue;  // absent everywhere: excluded, not zero

        ++present_classes;
        const double precision = in_pred ? tp / col_sum[i] : 0.0;
        const double recall = in_gt ? tp / row_sum[i] : 0.0;
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        const double denom = row_sum[i] + col_sum[i] - tp;  // TP + FP + FN
        const double iou = denom > 0.0 ? tp / denom : 0.0;

        s.precision[i] = precision;
        s.recall[i] = recall;
        s.f1[i] = f1;
        s.iou[i] = iou;
        f1_acc += f1;
        iou_acc += iou;
        if (in_gt) {
            recall_acc += recall;
            ++gt_classes;
        }
    }
    s.aa = gt_classes > 0 ? recall_acc / static_cast<double>(gt_classes) : 0.0;
    s.cf1 = present_classes > 0 ? f1_acc / static_cast<double>(present_classes) : 0.0;
    s.miou = present_classes > 0 ? iou_acc / static_cast<double>(present_classes) : 0.0;

    double pe = 0.0;
    for (std::size_t i = 0; i < c; ++i) pe += row_sum[i] * col_sum[i];
    pe /= total * total;
    // pe == 1 only when all mass sits in a single diagonal cell, where
    // agreement is perfect.
    s.kappa = (1.0 - pe) > 0.0 ? (s.oa - pe) / (1.0 - pe) : 1.0;
    return s;
}

std::string format_metric_report(const Scores& s, std::int64_t evaluated_pixels) {
    std::ostringstream out;
    out.precision(12);
    out << "pixels_evaluated=" << evaluated_pixels << "\n";
    out << "oa=" << s.oa << "\n";
    out << "aa=" << s.aa << "\n";
    out << "cf1=" << s.cf1 << "\n";
    out << "kappa=" << s.kappa << "\n";
    out << "miou=" << s.miou << "\n";
    for (std::size_t i = 0; i < s.f1.size(); ++i) {
        const std::size_t label = i + 1;
        out << "class." << label << ".precision=" << s.precision[i] << "\n";
        out << "class." << label << ".recall=" << s.recall[i] << "\n";
        out << "class." << label << ".f1=" << s.f1[i] << "\n";
        out << "class." << label << ".iou=" << s.iou[i] << "\n";
    }
    return out.str();
}

}  // namespace sst
