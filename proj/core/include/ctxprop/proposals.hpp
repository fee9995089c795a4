#pragma once

#include "ctxprop/geometry.hpp"
#include "ctxprop/kde.hpp"
#include "ctxprop/topics.hpp"

#include <cstdint>
#include <vector>

namespace ctxprop {

enum class StrategyKind {
    SlidingWindow3D,
    PairwiseKDE,
    HigherOrderTopics,
    HigherOrderElongation
};

struct Strategy {
    StrategyKind kind = StrategyKind::SlidingWindow3D;
    Frame frame = Frame::CameraCentered;  // ignored for SlidingWindow3D
};

enum class SeedMode { All, TopScoring };

struct ProposalRequest {
    std::vector<Detection2D> seeds;
    CameraModel camera;
    GridSpec grid;
    int budget = 1;
    double dedup_iou = 0.95;
    std::uint64_t rng_seed = 0;
    SeedMode seed_mode = SeedMode::All;
};

enum class Provenance { Grid, PairwiseSample, TopicSample, Fallback };

struct Proposal {
    Box2D box;
    Provenance tag = Provenance::Grid;
    int topic = -1;  // set for TopicSample
};

struct ProposalSet {
    std::vector<Proposal> proposals;
    bool exhausted = false;  // candidates ran out before the budget filled
};

/// Per-topic word ids in descending probability; compute once per model
/// when generating for many images.
struct TopicWordOrder {
    std::vector<std::vector<int>> words;

    static TopicWordOrder build(const LdaModel& m);
};

struct Models {
    const KdeModel* kde = nullptr;
    const LdaModel* lda = nullptr;
    const TopicWordOrder* lda_order = nullptr;  // optional cache
};

struct ModelMissing : std::runtime_error {
    ModelMissing() : std::runtime_error("strategy requires a fitted model") {}
};

/// Ranked proposal stream for one image. Deterministic given the request,
/// models and seed. Falls back to the sliding-window grid when no seeds
/// survive lifting.
ProposalSet generate(const ProposalRequest& req, const Strategy& strategy,
                     const Models& models);

/// Append fallback proposals to primary with dedup, truncated to budget.
ProposalSet merge_streams(const ProposalSet& primary, const ProposalSet& fallback,
                          int budget, double dedup_iou);

}  // namespace ctxprop
