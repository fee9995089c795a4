#pragma once

#include "ctxprop/geometry.hpp"

#include <utility>
#include <vector>

namespace ctxprop {

enum class Frame { CameraCentered, ObjectCentered };
enum class PoseMode { FullPose, Elongation };

struct RelationConfig {
    Frame frame = Frame::CameraCentered;
    PoseMode pose_mode = PoseMode::FullPose;
};

/// Relative location and relative pose of dst as seen from src.
/// r_theta lives in (-pi, pi] for FullPose and [0, pi) in Elongation mode.
struct PairwiseRelation {
    double r_x = 0, r_z = 0, r_theta = 0;
};

struct TooFewObjects : std::runtime_error {
    TooFewObjects() : std::runtime_error("need at least 2 objects for relations") {}
};

/// Fold a heading into [0, pi), identifying theta and theta + pi.
double elongation_fold(double theta);

PairwiseRelation compute_pairwise(const Object3D& src, const Object3D& dst,
                                  const RelationConfig& cfg);

/// All ordered pairs (i, j), i != j, tagged with the source index.
std::vector<std::pair<int, PairwiseRelation>> scene_relations(
    const std::vector<Object3D>& objects, const RelationConfig& cfg);

}  // namespace ctxprop
