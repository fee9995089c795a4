#include "ctxprop/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ctxprop {

namespace {

struct Cell {
    int ix = 0, iz = 0, ik = 0;
};

int lattice_count(double lo, double hi, double step) {
    return int(std::floor((hi - lo) / step + 0.5)) + 1;
}

Cell snap_to_cell(const GridSpec& g, double x, double z, double theta) {
    Cell c;
    c.ix = std::clamp(int(std::lround((x - g.x_min) / g.x_step)), 0,
                      lattice_count(g.x_min, g.x_max, g.x_step) - 1);
    c.iz = std::clamp(int(std::lround((z - g.z_min) / g.z_step)), 0,
                      lattice_count(g.z_min, g.z_max, g.z_step) - 1);
    const int no = g.num_orientations / 2;
    const double dtheta = kPi / no;
    c.ik = int(std::lround(elongation_fold(theta) / dtheta)) % no;
    return c;
}

Box3D cell_box(const GridSpec& g, const Cell& c) {
    const int no = g.num_orientations / 2;
    return Box3D{g.x_min + c.ix * g.x_step, g.z_min + c.iz * g.z_step,
                 g.l, g.w, g.h, c.ik * (kPi / no)};
}

std::uint64_t cell_key(const Cell& c) {
    return (std::uint64_t(std::uint32_t(c.ix)) << 40) |
           (std::uint64_t(std::uint32_t(c.iz) & 0xFFFFFF) << 16) |
           std::uint64_t(std::uint32_t(c.ik) & 0xFFFF);
}

// Duplicate tracking: exact-cell fast path plus IoU scan against kept boxes.
struct Dedup {
    double iou_thr;
    std::vector<Box2D> kept;
    std::unordered_set<std::uint64_t> seen;

    bool accept(const Box2D& b, std::uint64_t key) {
        if (!seen.insert(key).second) return false;
        for (const auto& k : kept)
            if (iou_2d(b, k) > iou_thr) return false;
        kept.push_back(b);
        return true;
    }
};

// Place a sampled relation relative to a lifted seed.
Object3D apply_relation(const Object3D& seed, const PairwiseRelation& r, Frame frame,
                        PoseMode pose_mode) {
    double dx = r.r_x, dz = r.r_z;
    if (frame == Frame::ObjectCentered) {
        const double c = std::cos(seed.box.theta);
        const double s = std::sin(seed.box.theta);
        dx = r.r_x * c - r.r_z * s;
        dz = r.r_x * s + r.r_z * c;
    }
    Object3D out = seed;
    out.box.x += dx;
    out.box.z += dz;
    out.box.theta = pose_mode == PoseMode::FullPose
                        ? wrap_angle(seed.box.theta + r.r_theta)
                        : elongation_fold(elongation_fold(seed.box.theta) + r.r_theta);
    return out;
}

void fill_from_grid(const ProjectedGrid& pg, const GridSpec& spec, Provenance tag,
                    int budget, Dedup& dedup, ProposalSet& out) {
    for (size_t i = 0; i < pg.boxes.size(); ++i) {
        if (int(out.proposals.size()) >= budget) return;
        if (!pg.projections[i]) continue;
        const auto& b = pg.boxes[i];
        const Cell c = snap_to_cell(spec, b.x, b.z, b.theta);
        if (dedup.accept(*pg.projections[i], cell_key(c)))
            out.proposals.push_back(Proposal{*pg.projections[i], tag, -1});
    }
    out.exhausted = int(out.proposals.size()) < budget;
}

std::vector<Object3D> lift_seeds(const std::vector<Detection2D>& seeds,
                                 const ProjectedGrid& pg) {
    std::vector<Object3D> lifted;
    for (const auto& d : seeds) {
        try {
            lifted.push_back(lift_detection(d, pg));
        } catch (const NoProjectableBox&) {
        } catch (const NoOverlap&) {
        }
    }
    return lifted;
}

}  // namespace

TopicWordOrder TopicWordOrder::build(const LdaModel& m) {
    TopicWordOrder order;
    order.words.resize(m.num_topics);
    for (int t = 0; t < m.num_topics; ++t) {
        const auto ranked = topic_top_words(m, t, m.vocab.size());
        order.words[t].reserve(ranked.size());
        for (const auto& [word, prob] : ranked) order.words[t].push_back(word);
    }
    return order;
}

ProposalSet generate(const ProposalRequest& req, const Strategy& strategy,
                     const Models& models) {
    const auto grid = generate_grid(req.grid);
    const auto pg = ProjectedGrid::build(grid, req.camera);

    std::vector<Detection2D> seeds = req.seeds;
    if (req.seed_mode == SeedMode::TopScoring && seeds.size() > 1) {
        auto best = std::max_element(
            seeds.begin(), seeds.end(),
            [](const Detection2D& a, const Detection2D& b) { return a.score < b.score; });
        seeds = {*best};
    }

    ProposalSet out;
    Dedup dedup{req.dedup_iou, {}, {}};

    const bool relational = strategy.kind != StrategyKind::SlidingWindow3D;
    std::vector<Object3D> lifted;
    if (relational) lifted = lift_seeds(seeds, pg);

    if (!relational || lifted.empty()) {
        const Provenance tag = relational ? Provenance::Fallback : Provenance::Grid;
        fill_from_grid(pg, req.grid, tag, req.budget, dedup, out);
        return out;
    }

    // Cell-key check before projecting: revisited cells (common for topic
    // cursors) cost one hash lookup.
    auto emit = [&](const Object3D& obj, Provenance tag, int topic) {
        const Cell c = snap_to_cell(req.grid, obj.box.x, obj.box.z, obj.box.theta);
        if (!dedup.seen.insert(cell_key(c)).second) return;
        const Box3D box = cell_box(req.grid, c);
        const auto proj = try_project_box(box, req.camera);
        if (!proj) return;
        for (const auto& k : dedup.kept)
            if (iou_2d(*proj, k) > dedup.iou_thr) return;
        dedup.kept.push_back(*proj);
        out.proposals.push_back(Proposal{*proj, tag, topic});
    };

    if (strategy.kind == StrategyKind::PairwiseKDE) {
        if (!models.kde) throw ModelMissing();
        std::mt19937_64 rng(req.rng_seed);
        const long max_attempts = long(req.budget) * 64 + 4096;
        long attempts = 0;
        size_t seed_idx = 0;
        while (int(out.proposals.size()) < req.budget && attempts < max_attempts) {
            const Object3D& seed = lifted[seed_idx];
            seed_idx = (seed_idx + 1) % lifted.size();
            ++attempts;
            const PairwiseRelation r = kde_sample_one(*models.kde, rng);
            emit(apply_relation(seed, r, strategy.frame, models.kde->pose_mode),
                 Provenance::PairwiseSample, -1);
        }
        out.exhausted = int(out.proposals.size()) < req.budget;
        return out;
    }

    // Higher-order strategies: deterministic per-(seed, topic) cursors over
    // words in descending probability, topics visited round-robin.
    if (!models.lda) throw ModelMissing();
    const LdaModel& lda = *models.lda;
    const int T = lda.num_topics;
    TopicWordOrder local;
    const TopicWordOrder& order =
        models.lda_order ? *models.lda_order : (local = TopicWordOrder::build(lda));

    std::vector<size_t> cursor(lifted.size() * T, 0);
    bool progress = true;
    while (int(out.proposals.size()) < req.budget && progress) {
        progress = false;
        for (size_t si = 0; si < lifted.size(); ++si) {
            for (int t = 0; t < T; ++t) {
                if (int(out.proposals.size()) >= req.budget) break;
                size_t& cur = cursor[si * T + t];
                if (cur >= order.words[t].size()) continue;
                const int word = order.words[t][cur];
                ++cur;
                progress = true;
                const PairwiseRelation r = dequantize(word, lda.vocab);
                emit(apply_relation(lifted[si], r, strategy.frame,
                                    lda.vocab.pose_mode),
                     Provenance::TopicSample, t);
            }
        }
    }
    out.exhausted = int(out.proposals.size()) < req.budget;
    return out;
}

ProposalSet merge_streams(const ProposalSet& primary, const ProposalSet& fallback,
                          int budget, double dedup_iou) {
    ProposalSet out;
    std::vector<Box2D> kept;
    auto push = [&](const Proposal& p) {
        if (int(out.proposals.size()) >= budget) return;
        for (const auto& k : kept)
            if (iou_2d(p.box, k) > dedup_iou) return;
        kept.push_back(p.box);
        out.proposals.push_back(p);
    };
    for (const auto& p : primary.proposals) push(p);
    for (const auto& p : fallback.proposals) push(p);
    out.exhausted = primary.exhausted && fallback.exhausted &&
                    int(out.proposals.size()) < budget;
    return out;
}

}  // namespace ctxprop
