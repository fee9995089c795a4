#include "ctxprop/relations.hpp"

#include <cmath>

namespace ctxprop {

double elongation_fold(double theta) {
    double t = std::fmod(theta, kPi);
    if (t < 0) t += kPi;
    if (t >= kPi) t -= kPi;  // fmod rounding at the boundary
    return t;
}

PairwiseRelation compute_pairwise(const Object3D& src, const Object3D& dst,
                                  const RelationConfig& cfg) {
    const double dx = dst.box.x - src.box.x;
    const double dz = dst.box.z - src.box.z;
    PairwiseRelation r;
    if (cfg.frame == Frame::CameraCentered) {
        r.r_x = dx;
        r.r_z = dz;
    } else {
        const double c = std::cos(-src.box.theta);
        const double s = std::sin(-src.box.theta);
        r.r_x = dx * c - dz * s;
        r.r_z = dx * s + dz * c;
    }
    if (cfg.pose_mode == PoseMode::FullPose) {
        r.r_theta = wrap_angle(dst.box.theta - src.box.theta);
    } else {
        r.r_theta = elongation_fold(elongation_fold(dst.box.theta) -
                                    elongation_fold(src.box.theta));
    }
    return r;
}

std::vector<std::pair<int, PairwiseRelation>> scene_relations(
    const std::vector<Object3D>& objects, const RelationConfig& cfg) {
    if (objects.size() < 2) throw TooFewObjects();
    std::vector<std::pair<int, PairwiseRelation>> out;
    out.reserve(objects.size() * (objects.size() - 1));
    for (size_t i = 0; i < objects.size(); ++i) {
        for (size_t j = 0; j < objects.size(); ++j) {
            if (i == j) continue;
            out.emplace_back(int(i), compute_pairwise(objects[i], objects[j], cfg));
        }
    }
    return out;
}

}  // namespace ctxprop
