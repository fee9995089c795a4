#include "ctxprop/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ctxprop {

MatchResult match(const std::vector<Box2D>& annotations,
                  const std::vector<Box2D>& proposals, double iou_threshold) {
    MatchResult res;
    std::vector<bool> taken(annotations.size(), false);
    for (size_t rank = 0; rank < proposals.size(); ++rank) {
        int best = -1;
        double best_iou = 0;
        for (size_t a = 0; a < annotations.size(); ++a) {
            if (taken[a]) continue;
            const double iou = iou_2d(proposals[rank], annotations[a]);
            if (iou >= iou_threshold && iou > best_iou) {
                best_iou = iou;
                best = int(a);
            }
        }
        if (best >= 0) {
            taken[best] = true;
            res.matched_pairs.emplace_back(best, int(rank));
        }
    }
    for (size_t a = 0; a < annotations.size(); ++a)
        if (!taken[a]) res.unmatched_annotations.push_back(int(a));
    return res;
}

RecallCurve recall_curve(const std::vector<SceneEval>& scenes,
                         const std::vector<int>& budgets, double iou_threshold) {
    size_t total = 0;
    for (const auto& s : scenes) total += s.annotations.size();
    if (total == 0) throw NoAnnotations();

    RecallCurve curve;
    curve.budgets = budgets;
    curve.iou_threshold = iou_threshold;
    for (int b : budgets) {
        size_t matched = 0;
        for (const auto& s : scenes) {
            std::vector<Box2D> prefix(
                s.proposals.begin(),
                s.proposals.begin() + std::min<size_t>(b, s.proposals.size()));
            matched += match(s.annotations, prefix, iou_threshold).matched_pairs.size();
        }
        curve.recall.push_back(double(matched) / double(total));
    }
    return curve;
}

std::string write_curve_csv(const RecallCurve& curve,
                            const std::string& strategy_label) {
    std::string label = strategy_label;
    if (label.find(',') != std::string::npos || label.find('"') != std::string::npos) {
        std::string quoted = "\"";
        for (char c : label) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        quoted += '"';
        label = quoted;
    }
    std::ostringstream os;
    os << "strategy,iou,budget,recall\n";
    char buf[64];
    for (size_t i = 0; i < curve.budgets.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f,%d,%.6f", curve.iou_threshold,
                      curve.budgets[i], curve.recall[i]);
        os << label << ',' << buf << '\n';
    }
    return os.str();
}

}  // namespace ctxprop
