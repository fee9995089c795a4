#include "ctxprop/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <utility>

using namespace ctxprop;

namespace {

Box2D box(double x, double y, double w, double h) { return Box2D{x, y, x + w, y + h}; }

// The matching contract restated naively: walk proposals in rank order,
// each grabs the highest-IoU unmatched annotation above threshold.
MatchResult reference_match(const std::vector<Box2D>& ann,
                            const std::vector<Box2D>& props, double thr) {
    MatchResult res;
    std::vector<int> owner(ann.size(), -1);
    for (int rank = 0; rank < int(props.size()); ++rank) {
        // enumerate all candidate pairs, then select lexicographically by
        // (-iou, annotation index)
        std::vector<std::pair<double, int>> cands;
        for (int a = 0; a < int(ann.size()); ++a) {
            if (owner[a] >= 0) continue;
            const double iou = iou_2d(props[rank], ann[a]);
            if (iou >= thr) cands.emplace_back(-iou, a);
        }
        std::sort(cands.begin(), cands.end());
        const int pick = cands.empty() ? -1 : cands.front().second;
        if (pick >= 0) {
            owner[pick] = rank;
            res.matched_pairs.emplace_back(pick, rank);
        }
    }
    for (int a = 0; a < int(ann.size()); ++a)
        if (owner[a] < 0) res.unmatched_annotations.push_back(a);
    return res;
}

}  // namespace

TEST_CASE("identical proposals match every annotation in order") {
    std::vector<Box2D> ann{box(0, 0, 10, 10), box(20, 0, 10, 10), box(40, 0, 8, 8)};
    const auto res = match(ann, ann, 0.5);
    REQUIRE(res.matched_pairs.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(res.matched_pairs[i].first == i);
        CHECK(res.matched_pairs[i].second == i);
    }
    CHECK(res.unmatched_annotations.empty());
}

TEST_CASE("one proposal overlapping two annotations matches only the best") {
    std::vector<Box2D> ann{box(0, 0, 10, 10), box(4, 0, 10, 10)};
    std::vector<Box2D> props{box(1, 0, 10, 10)};
    const auto res = match(ann, props, 0.3);
    REQUIRE(res.matched_pairs.size() == 1);
    CHECK(res.matched_pairs[0].first == 0);  // higher IoU with the first
    REQUIRE(res.unmatched_annotations.size() == 1);
    CHECK(res.unmatched_annotations[0] == 1);
}

TEST_CASE("empty proposals leave all annotations unmatched") {
    std::vector<Box2D> ann{box(0, 0, 5, 5), box(10, 10, 5, 5)};
    const auto res = match(ann, {}, 0.5);
    CHECK(res.matched_pairs.empty());
    CHECK(res.unmatched_annotations.size() == 2);
}

TEST_CASE("greedy matcher agrees with the naive reference on random scenes") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> pos(0, 80), size(4, 20);
    std::uniform_int_distribution<int> n_ann(0, 6), n_prop(0, 8);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<Box2D> ann, props;
        const int na = n_ann(rng), np = n_prop(rng);
        for (int i = 0; i < na; ++i) ann.push_back(box(pos(rng), pos(rng), size(rng), size(rng)));
        for (int i = 0; i < np; ++i) props.push_back(box(pos(rng), pos(rng), size(rng), size(rng)));
        const double thr = trial % 2 ? 0.5 : 0.75;
        const auto got = match(ann, props, thr);
        const auto want = reference_match(ann, props, thr);
        CHECK(got.matched_pairs == want.matched_pairs);
        CHECK(got.unmatched_annotations == want.unmatched_annotations);
    }
}

TEST_CASE("recall_curve basics and monotonicity") {
    std::vector<SceneEval> scenes(2);
    scenes[0].annotations = {box(0, 0, 10, 10), box(30, 0, 10, 10)};
    scenes[0].proposals = {box(100, 100, 5, 5), box(0, 0, 10, 10), box(30, 0, 10, 10)};
    scenes[1].annotations = {box(5, 5, 8, 8)};
    scenes[1].proposals = {box(5, 5, 8, 8)};
    const auto curve = recall_curve(scenes, {0, 1, 2, 3}, 0.5);
    CHECK(curve.recall[0] == doctest::Approx(0.0));
    CHECK(curve.recall[3] == doctest::Approx(1.0));
    for (size_t i = 1; i < curve.recall.size(); ++i)
        CHECK(curve.recall[i] >= curve.recall[i - 1]);
}

TEST_CASE("stricter IoU never increases recall") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> pos(0, 60), size(5, 15);
    std::vector<SceneEval> scenes(5);
    for (auto& s : scenes) {
        for (int i = 0; i < 4; ++i)
            s.annotations.push_back(box(pos(rng), pos(rng), size(rng), size(rng)));
        for (int i = 0; i < 10; ++i) {
            Box2D b = s.annotations[i % 4];
            b.x1 += pos(rng) * 0.05;
            b.x2 += pos(rng) * 0.03;
            s.proposals.push_back(b);
        }
    }
    const std::vector<int> budgets{1, 3, 5, 10};
    const auto loose = recall_curve(scenes, budgets, 0.5);
    const auto strict = recall_curve(scenes, budgets, 0.75);
    for (size_t i = 0; i < budgets.size(); ++i)
        CHECK(strict.recall[i] <= loose.recall[i]);
}

TEST_CASE("recall_curve requires annotations") {
    std::vector<SceneEval> scenes(1);
    scenes[0].proposals = {box(0, 0, 5, 5)};
    CHECK_THROWS_AS(recall_curve(scenes, {1}, 0.5), NoAnnotations);
}

TEST_CASE("curve CSV format and escaping") {
    RecallCurve c;
    c.budgets = {10};
    c.recall = {0.25};
    c.iou_threshold = 0.5;
    CHECK(write_curve_csv(c, "sliding_window") ==
          "strategy,iou,budget,recall\nsliding_window,0.500000,10,0.250000\n");
    const auto quoted = write_curve_csv(c, "a,b");
    CHECK(quoted.find("\"a,b\",") != std::string::npos);
}

TEST_CASE("emitted CSV parses back to the same curve") {
    RecallCurve c;
    c.budgets = {1, 10, 100};
    c.recall = {0.1, 0.45, 0.871234};
    c.iou_threshold = 0.75;
    std::istringstream in(write_curve_csv(c, "hot"));
    std::string line;
    std::getline(in, line);  // header
    size_t i = 0;
    while (std::getline(in, line)) {
        double iou, rec;
        int budget;
        char label[16];
        REQUIRE(std::sscanf(line.c_str(), "%15[^,],%lf,%d,%lf", label, &iou, &budget,
                            &rec) == 4);
        CHECK(budget == c.budgets[i]);
        CHECK(rec == doctest::Approx(c.recall[i]).epsilon(1e-9));
        ++i;
    }
    CHECK(i == c.budgets.size());
}
