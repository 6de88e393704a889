#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "metrics_oracle.hpp"
#include "sst/metrics.hpp"
#include "test_support.hpp"

using namespace sst;
using sst_test::OracleScores;
using sst_test::oracle_scores;

namespace {

ConfusionMatrix make_cm(std::size_t classes, std::vector<std::int64_t> counts) {
    ConfusionMatrix cm;
    cm.class_count = classes;
    cm.counts = std::move(counts);
    return cm;
}

}  // namespace

TEST_CASE("perfect predictions score 1 everywhere") {
    LabelMap gt(2, 3, 2, {1, 1, 2, 2, 1, 2});
    const ConfusionMatrix cm = confusion(gt, gt);
    CHECK(cm.at(0, 0) == 3);
    CHECK(cm.at(1, 1) == 3);
    CHECK(cm.at(0, 1) == 0);
    const Scores s = scores(cm);
    CHECK(s.oa == doctest::Approx(1.0));
    CHECK(s.aa == doctest::Approx(1.0));
    CHECK(s.cf1 == doctest::Approx(1.0));
    CHECK(s.kappa == doctest::Approx(1.0));
    CHECK(s.miou == doctest::Approx(1.0));
}

TEST_CASE("unlabeled pixels are excluded from the tally") {
    LabelMap gt(1, 4, 2, {0, 0, 0, 0});
    LabelMap pred(1, 4, 2, {1, 2, 1, 2});
    const ConfusionMatrix cm = confusion(gt, pred);
    CHECK(cm.total() == 0);
    CHECK_THROWS_AS(scores(cm), degenerate_input_error);
}

TEST_CASE("chance-level agreement gives kappa 0") {
    const ConfusionMatrix cm = make_cm(2, {5, 5, 5, 5});
    const Scores s = scores(cm);
    CHECK(s.oa == doctest::Approx(0.5));
    CHECK(s.kappa == doctest::Approx(0.0));
}

TEST_CASE("confusion requires matching shapes and in-range predictions") {
    LabelMap gt(1, 2, 2, {1, 2});
    LabelMap small(1, 1, 2, {1});
    CHECK_THROWS_AS(confusion(gt, small), invalid_input_error);
    LabelMap zero_pred(1, 2, 2, {0, 1});
    CHECK_THROWS_AS(confusion(gt, zero_pred), invalid_input_error);
}

TEST_CASE("confusion counts match a per-pixel tally oracle") {
    std::mt19937_64 rng(199);
    std::vector<std::uint16_t> gt_raw(48), pred_raw(48);
    for (std::size_t p = 0; p < 48; ++p) {
        gt_raw[p] = static_cast<std::uint16_t>(rng() % 4);       // 0..3, 0 unlabeled
        pred_raw[p] = static_cast<std::uint16_t>(1 + rng() % 3); // 1..3
    }
    LabelMap gt(6, 8, 3, gt_raw);
    LabelMap pred(6, 8, 3, pred_raw);
    const ConfusionMatrix cm = confusion(gt, pred);

    std::vector<std::int64_t> tally(9, 0);
    for (std::size_t p = 0; p < 48; ++p)
        if (gt_raw[p] > 0) ++tally[(gt_raw[p] - 1) * 3 + (pred_raw[p] - 1)];
    CHECK(cm.counts == tally);
}

TEST_CASE("random confusion matrices match the second implementation") {
    std::mt19937_64 rng(203);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t c = 2 + rng() % 4;
        std::vector<std::int64_t> counts(c * c);
        std::int64_t total = 0;
        for (auto& v : counts) {
            v = static_cast<std::int64_t>(rng() % 7);
            total += v;
        }
        if (total == 0) counts[0] = 1;
        const ConfusionMatrix cm = make_cm(c, std::move(counts));
        const Scores got = scores(cm);
        const OracleScores want = oracle_scores(cm);
        CHECK(got.oa == doctest::Approx(want.oa).epsilon(1e-9));
        CHECK(got.aa == doctest::Approx(want.aa).epsilon(1e-9));
        CHECK(got.cf1 == doctest::Approx(want.cf1).epsilon(1e-9));
        CHECK(got.kappa == doctest::Approx(want.kappa).epsilon(1e-9));
        CHECK(got.miou == doctest::Approx(want.miou).epsilon(1e-9));
    }
}

TEST_CASE("scores live in their stated ranges") {
    std::mt19937_64 rng(207);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t c = 2 + rng() % 5;
        std::vector<std::int64_t> counts(c * c);
        std::int64_t total = 0;
        for (auto& v : counts) {
            v = static_cast<std::int64_t>(rng() % 5);
            total += v;
        }
        if (total == 0) counts[c + 1] = 3;
        const Scores s = scores(make_cm(c, std::move(counts)));
        CHECK(s.oa >= 0.0);
        CHECK(s.oa <= 1.0);
        CHECK(s.aa >= 0.0);
        CHECK(s.aa <= 1.0);
        CHECK(s.cf1 >= 0.0);
        CHECK(s.cf1 <= 1.0);
        CHECK(s.miou >= 0.0);
        CHECK(s.miou <= 1.0);
        CHECK(s.kappa >= -1.0);
        CHECK(s.kappa <= 1.0);
    }
}

TEST_CASE("scores are invariant under a joint class permutation") {
    std::mt19937_64 rng(211);
    const std::size_t c = 4;
    std::vector<std::int64_t> counts(c * c);
    for (auto& v : counts) v = static_cast<std::int64_t>(rng() % 6) + 1;
    const ConfusionMatrix cm = make_cm(c, counts);

    const std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<std::int64_t> permuted(c * c);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j)
            permuted[perm[i] * c + perm[j]] = counts[i * c + j];
    const ConfusionMatrix pm = make_cm(c, std::move(permuted));

    const Scores a = scores(cm);
    const Scores b = scores(pm);
    CHECK(a.oa == doctest::Approx(b.oa).epsilon(1e-12));
    CHECK(a.aa == doctest::Approx(b.aa).epsilon(1e-12));
    CHECK(a.cf1 == doctest::Approx(b.cf1).epsilon(1e-12));
    CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-12));
    CHECK(a.miou == doctest::Approx(b.miou).epsilon(1e-12));
}

TEST_CASE("kappa is 1 exactly for diagonal matrices with positive trace") {
    CHECK(scores(make_cm(2, {7, 0, 0, 3})).kappa == doctest::Approx(1.0));
    CHECK(scores(make_cm(2, {5, 0, 0, 0})).kappa == doctest::Approx(1.0));  // single class
    CHECK(scores(make_cm(2, {5, 1, 0, 4})).kappa < 1.0);
}

TEST_CASE("class absent from both sides is excluded, not zero") {
    // class 3 never appears; CF1 averages over the two present classes
    const Scores s = scores(make_cm(3, {4, 1, 0, 2, 3, 0, 0, 0, 0}));
    CHECK(s.f1[2] == -1.0);
    CHECK(s.iou[2] == -1.0);
    const double f1_0 = s.f1[0], f1_1 = s.f1[1];
    CHECK(s.cf1 == doctest::Approx((f1_0 + f1_1) / 2.0).epsilon(1e-12));
}

TEST_CASE("a predicted-only class counts as zero F1") {
    // class 2 has no ground truth but receives predictions
    const Scores s = scores(make_cm(2, {3, 2, 0, 0}));
    CHECK(s.f1[1] == 0.0);
    CHECK(s.cf1 == doctest::Approx(s.f1[0] / 2.0).epsilon(1e-12));
}

TEST_CASE("the metric report carries the documented key set in order") {
    LabelMap gt(1, 4, 2, {1, 1, 2, 2});
    LabelMap pred(1, 4, 2, {1, 2, 2, 2});
    const ConfusionMatrix cm = confusion(gt, pred);
    const std::string report = format_metric_report(scores(cm), cm.total());

    std::istringstream in(report);
    std::string line;
    std::vector<std::string> keys;
    while (std::getline(in, line)) keys.push_back(line.substr(0, line.find('=')));
    const std::vector<std::string> expected{
        "pixels_evaluated", "oa",     "aa",
        "cf1",              "kappa",  "miou",
        "class.1.precision", "class.1.recall", "class.1.f1", "class.1.iou",
        "class.2.precision", "class.2.recall", "class.2.f1", "class.2.iou"};
    CHECK(keys == expected);
}
