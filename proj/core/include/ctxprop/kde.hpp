#pragma once

#include "ctxprop/relations.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace ctxprop {

struct Bandwidth {
    double x = 0, z = 0, theta = 0;
};

struct EmptyTrainingSet : std::runtime_error {
    EmptyTrainingSet() : std::runtime_error("KDE needs at least one relation") {}
};
struct ZeroBandwidth : std::runtime_error {
    ZeroBandwidth() : std::runtime_error("density undefined with zero bandwidth") {}
};

/// Gaussian product-kernel KDE over (r_x, r_z, r_theta). The angular
/// dimension is circular with period 2*pi (FullPose) or pi (Elongation)
/// and uses a wrapped Gaussian approximated by 3 replicas.
struct KdeModel {
    std::vector<PairwiseRelation> samples;
    Bandwidth bandwidth;
    PoseMode pose_mode = PoseMode::FullPose;

    size_t sample_count() const { return samples.size(); }
    double angle_period() const { return pose_mode == PoseMode::FullPose ? 2 * kPi : kPi; }
};

/// Silverman's rule per dimension when no fixed bandwidth is given:
/// h_d = 1.06 * sigma_d * n^(-1/5), circular sigma for theta.
KdeModel fit_kde(const std::vector<PairwiseRelation>& relations, PoseMode pose_mode,
                 std::optional<Bandwidth> fixed = std::nullopt);

double kde_density(const KdeModel& m, const PairwiseRelation& r);

std::vector<PairwiseRelation> kde_sample(const KdeModel& m, std::uint64_t rng_seed,
                                         size_t n);

/// Single draw advancing a caller-owned generator.
PairwiseRelation kde_sample_one(const KdeModel& m, std::mt19937_64& rng);

void save_kde(const KdeModel& m, std::ostream& os);
KdeModel load_kde(std::istream& is);

}  // namespace ctxprop
