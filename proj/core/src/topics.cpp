#include "ctxprop/topics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace ctxprop {

namespace {

double angle_range_min(const Vocabulary& v) {
    return v.pose_mode == PoseMode::FullPose ? -kPi : 0.0;
}

double wrap_to_mode(double theta, const Vocabulary& v) {
    return v.pose_mode == PoseMode::FullPose ? wrap_angle(theta)
                                             : elongation_fold(theta);
}

}  // namespace

int quantize(const PairwiseRelation& r, const Vocabulary& v) {
    if (r.r_x < v.x_min || r.r_x >= v.x_max || r.r_z < v.z_min || r.r_z >= v.z_max)
        throw OutOfExtent();
    const int ix = int(std::floor((r.r_x - v.x_min) / v.cell_x));
    const int iz = int(std::floor((r.r_z - v.z_min) / v.cell_z));
    const double t = wrap_to_mode(r.r_theta, v) - angle_range_min(v);
    int it = int(std::floor(t / v.angle_period() * v.theta_bins));
    it = std::clamp(it, 0, v.theta_bins - 1);
    const int cx = std::clamp(ix, 0, v.nx() - 1);
    const int cz = std::clamp(iz, 0, v.nz() - 1);
    return (cz * v.nx() + cx) * v.theta_bins + it;
}

PairwiseRelation dequantize(int word, const Vocabulary& v) {
    const int it = word % v.theta_bins;
    const int ix = (word / v.theta_bins) % v.nx();
    const int iz = word / (v.theta_bins * v.nx());
    PairwiseRelation r;
    r.r_x = v.x_min + (ix + 0.5) * v.cell_x;
    r.r_z = v.z_min + (iz + 0.5) * v.cell_z;
    r.r_theta = angle_range_min(v) + (it + 0.5) * v.angle_period() / v.theta_bins;
    return r;
}

std::vector<Document> build_corpus(const std::vector<std::vector<Object3D>>& scenes,
                                   const RelationConfig& cfg, const Vocabulary& v) {
    std::vector<Document> corpus;
    for (const auto& scene : scenes) {
        if (scene.size() < 2) continue;
        const auto rels = scene_relations(scene, cfg);
        std::vector<Document> docs(scene.size());
        for (size_t i = 0; i < scene.size(); ++i) docs[i].source_object = int(i);
        for (const auto& [src, rel] : rels) {
            try {
                docs[src].words.push_back(quantize(rel, v));
            } catch (const OutOfExtent&) {
                // dropped
            }
        }
        for (auto& d : docs)
            if (!d.words.empty()) corpus.push_back(std::move(d));
    }
    if (corpus.empty()) throw EmptyCorpus();
    return corpus;
}

LdaModel fit_lda(const std::vector<Document>& corpus, const Vocabulary& vocab, int T,
                 double alpha, double beta, int iterations, std::uint64_t rng_seed,
                 LdaFitStats* stats) {
    if (corpus.empty()) throw EmptyCorpus();
    const int V = vocab.size();
    const int D = int(corpus.size());

    std::vector<std::vector<int>> z(D);
    std::vector<std::vector<int>> n_dt(D, std::vector<int>(T, 0));
    std::vector<std::vector<int>> n_tw(T, std::vector<int>(V, 0));
    std::vector<int> n_t(T, 0);

    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<int> topic_pick(0, T - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (int d = 0; d < D; ++d) {
        z[d].resize(corpus[d].words.size());
        for (size_t j = 0; j < corpus[d].words.size(); ++j) {
            const int w = corpus[d].words[j];
            const int t = topic_pick(rng);
            z[d][j] = t;
            ++n_dt[d][t];
            ++n_tw[t][w];
            ++n_t[t];
        }
    }

    std::vector<double> p(T);
    for (int it = 0; it < iterations; ++it) {
        for (int d = 0; d < D; ++d) {
            for (size_t j = 0; j < corpus[d].words.size(); ++j) {
                const int w = corpus[d].words[j];
                const int old = z[d][j];
                --n_dt[d][old];
                --n_tw[old][w];
                --n_t[old];
                double total = 0;
                for (int t = 0; t < T; ++t) {
                    p[t] = (n_dt[d][t] + alpha) * (n_tw[t][w] + beta) /
                           (n_t[t] + V * beta);
                    total += p[t];
                }
                const double u = unif(rng) * total;
                double acc = 0;
                int pick = T - 1;
                for (int t = 0; t < T; ++t) {
                    acc += p[t];
                    if (u < acc) {
                        pick = t;
                        break;
                    }
                }
                z[d][j] = pick;
                ++n_dt[d][pick];
                ++n_tw[pick][w];
                ++n_t[pick];
            }
        }
        if (stats) {
            // log p(w|z) under the collapsed model
            const double lgb = std::lgamma(beta);
            double ll = 0;
            for (int t = 0; t < T; ++t) {
                ll += std::lgamma(V * beta) - std::lgamma(n_t[t] + V * beta);
                for (int w = 0; w < V; ++w)
                    if (n_tw[t][w] > 0) ll += std::lgamma(n_tw[t][w] + beta) - lgb;
            }
            stats->log_likelihood.push_back(ll);
        }
    }

    LdaModel m;
    m.num_topics = T;
    m.alpha_prior = alpha;
    m.beta_prior = beta;
    m.vocab = vocab;
    m.phi.assign(T, std::vector<double>(V, 0.0));
    for (int t = 0; t < T; ++t) {
        const double denom = n_t[t] + V * beta;
        for (int w = 0; w < V; ++w) m.phi[t][w] = (n_tw[t][w] + beta) / denom;
    }
    return m;
}

int sample_word(const LdaModel& m, int topic, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0;
    const auto& row = m.phi[topic];
    for (size_t w = 0; w < row.size(); ++w) {
        acc += row[w];
        if (u < acc) return int(w);
    }
    return int(row.size()) - 1;
}

std::vector<std::pair<int, double>> topic_top_words(const LdaModel& m, int topic,
                                                    int k) {
    const auto& row = m.phi[topic];
    std::vector<int> order(row.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    });
    std::vector<std::pair<int, double>> out;
    out.reserve(k);
    for (int i = 0; i < k && i < int(order.size()); ++i)
        out.emplace_back(order[i], row[order[i]]);
    return out;
}

void save_lda(const LdaModel& m, std::ostream& os) {
    os << "CTXPROP_LDA 1\n";
    os << std::setprecision(17);
    const auto& v = m.vocab;
    os << "vocab " << v.cell_x << ' ' << v.cell_z << ' ' << v.theta_bins << ' '
       << v.x_min << ' ' << v.x_max << ' ' << v.z_min << ' ' << v.z_max << ' '
       << (v.pose_mode == PoseMode::FullPose ? "full" : "elongation") << "\n";
    os << "topics " << m.num_topics << ' ' << m.alpha_prior << ' ' << m.beta_prior
       << "\n";
    for (const auto& row : m.phi) {
        for (size_t w = 0; w < row.size(); ++w) os << (w ? " " : "") << row[w];
        os << "\n";
    }
}

LdaModel load_lda(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "CTXPROP_LDA" || version != 1)
        throw std::runtime_error("not an LDA model file");
    LdaModel m;
    std::string key, mode;
    auto& v = m.vocab;
    is >> key >> v.cell_x >> v.cell_z >> v.theta_bins >> v.x_min >> v.x_max >>
        v.z_min >> v.z_max >> mode;
    if (key != "vocab") throw std::runtime_error("malformed LDA model: vocab");
    v.pose_mode = (mode == "full") ? PoseMode::FullPose : PoseMode::Elongation;
    is >> key >> m.num_topics >> m.alpha_prior >> m.beta_prior;
    if (key != "topics") throw std::runtime_error("malformed LDA model: topics");
    m.phi.assign(m.num_topics, std::vector<double>(v.size(), 0.0));
    for (auto& row : m.phi) {
        double sum = 0;
        for (auto& p : row) {
            is >> p;
            sum += p;
        }
        if (!is) throw std::runtime_error("truncated LDA model file");
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::runtime_error("LDA model row is not a distribution");
    }
    return m;
}

}  // namespace ctxprop
