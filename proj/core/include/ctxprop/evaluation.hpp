#pragma once

#include "ctxprop/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ctxprop {

struct NoAnnotations : std::runtime_error {
    NoAnnotations() : std::runtime_error("no annotations to evaluate against") {}
};

struct MatchResult {
    std::vector<std::pair<int, int>> matched_pairs;  // (annotation_index, proposal_rank)
    std::vector<int> unmatched_annotations;
};

/// Greedy one-to-one matching in proposal-rank order: each proposal takes
/// the still-unmatched annotation of highest IoU if it reaches the
/// threshold; annotation ties by smaller index.
MatchResult match(const std::vector<Box2D>& annotations,
                  const std::vector<Box2D>& proposals, double iou_threshold);

struct SceneEval {
    std::vector<Box2D> annotations;
    std::vector<Box2D> proposals;  // ranked
};

struct RecallCurve {
    std::vector<int> budgets;
    std::vector<double> recall;
    double iou_threshold = 0.5;
};

/// Micro-averaged recall over all annotations at each proposal budget.
RecallCurve recall_curve(const std::vector<SceneEval>& scenes,
                         const std::vector<int>& budgets, double iou_threshold);

/// CSV with header strategy,iou,budget,recall; labels with commas quoted.
std::string write_curve_csv(const RecallCurve& curve, const std::string& strategy_label);

}  // namespace ctxprop
