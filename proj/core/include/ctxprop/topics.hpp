#pragma once

#include "ctxprop/relations.hpp"

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace ctxprop {

struct OutOfExtent : std::runtime_error {
    OutOfExtent() : std::runtime_error("relation outside vocabulary extent") {}
};
struct EmptyCorpus : std::runtime_error {
    EmptyCorpus() : std::runtime_error("no documents in corpus") {}
};

/// Quantization lattice over relation space. Word ids are row-major with
/// theta fastest, then x, then z:
///   id = (iz * nx + ix) * theta_bins + itheta
struct Vocabulary {
    double cell_x = 0.8, cell_z = 0.8;  // W/2, half the mean annotated width
    int theta_bins = 8;
    double x_min = -30, x_max = 30;
    double z_min = -60, z_max = 60;
    PoseMode pose_mode = PoseMode::FullPose;

    int nx() const { return int(std::lround((x_max - x_min) / cell_x)); }
    int nz() const { return int(std::lround((z_max - z_min) / cell_z)); }
    int size() const { return nx() * nz() * theta_bins; }
    double angle_period() const { return pose_mode == PoseMode::FullPose ? 2 * kPi : kPi; }
};

int quantize(const PairwiseRelation& r, const Vocabulary& v);
PairwiseRelation dequantize(int word, const Vocabulary& v);

/// Words sourced at one object in one scene.
struct Document {
    int source_object = 0;
    std::vector<int> words;
};

/// One document per object per scene with >= 2 objects; out-of-extent
/// relations are dropped, empty documents discarded.
std::vector<Document> build_corpus(const std::vector<std::vector<Object3D>>& scenes,
                                   const RelationConfig& cfg, const Vocabulary& v);

struct LdaModel {
    int num_topics = 16;
    std::vector<std::vector<double>> phi;  // T x V, row-stochastic
    double alpha_prior = 0;
    double beta_prior = 0;
    Vocabulary vocab;
};

struct LdaFitStats {
    std::vector<double> log_likelihood;  // log p(w|z) after each sweep
};

/// Collapsed Gibbs sampling; phi is read from the final sweep's counts.
/// Deterministic given the seed. Stats are filled only when requested.
LdaModel fit_lda(const std::vector<Document>& corpus, const Vocabulary& vocab, int T,
                 double alpha, double beta, int iterations, std::uint64_t rng_seed,
                 LdaFitStats* stats = nullptr);

int sample_word(const LdaModel& m, int topic, std::uint64_t rng_seed);

/// k highest-probability words, descending, ties by smaller index.
std::vector<std::pair<int, double>> topic_top_words(const LdaModel& m, int topic,
                                                    int k);

void save_lda(const LdaModel& m, std::ostream& os);
LdaModel load_lda(std::istream& is);

}  // namespace ctxprop
