#include "ctxprop/dataset.hpp"
#include "ctxprop/evaluation.hpp"
#include "ctxprop/kde.hpp"
#include "ctxprop/proposals.hpp"
#include "ctxprop/topics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace ctxprop;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write file: " + p.string());
    out << text;
}

std::vector<std::string> list_image_ids(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir.string());
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".txt") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

struct GridOptions {
    double x_min = -15, x_max = 15;
    double z_min = 4, z_max = 64;
    double step = 0.5;
    int orientations = 8;
    double box_l = 3.88, box_w = 1.63, box_h = 1.53;  // KITTI car means

    GridSpec to_spec() const {
        GridSpec g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.z_min = z_min;
        g.z_max = z_max;
        g.x_step = step;
        g.z_step = step;
        g.num_orientations = orientations;
        g.l = box_l;
        g.w = box_w;
        g.h = box_h;
        return g;
    }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--grid-x-min", x_min, "grid lateral minimum (m)");
        cmd->add_option("--grid-x-max", x_max, "grid lateral maximum (m)");
        cmd->add_option("--grid-z-min", z_min, "grid depth minimum (m)");
        cmd->add_option("--grid-z-max", z_max, "grid depth maximum (m)");
        cmd->add_option("--grid-step", step, "grid step in x and z (m)");
        cmd->add_option("--orientations", orientations, "grid orientation count K");
        cmd->add_option("--box-l", box_l, "proposal box length (m)");
        cmd->add_option("--box-w", box_w, "proposal box width (m)");
        cmd->add_option("--box-h", box_h, "proposal box height (m)");
    }
};

struct SceneInputs {
    std::string labels_dir;
    std::string calib_dir;
    std::string class_name = "Car";
    int image_width = 1242;
    int image_height = 375;
    double camera_height = 1.65;

    void add_flags(CLI::App* cmd, bool labels_required) {
        auto* o = cmd->add_option("--labels", labels_dir, "directory of label files");
        if (labels_required) o->required();
        cmd->add_option("--calib", calib_dir, "directory of calibration files");
        cmd->add_option("--class", class_name, "class of interest");
        cmd->add_option("--image-width", image_width, "image width (px)");
        cmd->add_option("--image-height", image_height, "image height (px)");
        cmd->add_option("--camera-height", camera_height,
                        "camera height above ground (m)");
    }

    CameraModel camera_for(const std::string& image_id) const {
        auto cam = parse_calibration(
            read_file(fs::path(calib_dir) / (image_id + ".txt")), "P2", image_width,
            image_height);
        cam.height_above_ground = camera_height;
        return cam;
    }
};

std::vector<Object3D> class_objects(const std::vector<LabelRecord>& recs,
                                    const std::string& cls) {
    std::vector<Object3D> out;
    for (const auto& r : recs)
        if (r.type == cls) out.push_back(Object3D{to_box3d(r), r.score.value_or(1.0)});
    return out;
}

std::string manifest_line(const std::string& key, const std::string& value) {
    return key + "=" + value + "\n";
}

template <typename T>
std::string str(T v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

// ---- synth ----------------------------------------------------------------

int run_synth(const SynthSpec& spec, const std::string& out_dir) {
    const auto scenes = generate_synthetic(spec);
    for (const auto& s : scenes) {
        write_file(fs::path(out_dir) / "label_2" / (s.image_id + ".txt"),
                   write_label_file(s.annotation_records));
        write_file(fs::path(out_dir) / "calib" / (s.image_id + ".txt"),
                   write_calibration(s.camera));
        std::vector<LabelRecord> dets;
        for (const auto& d : s.detections) {
            for (const auto& lr : s.annotation_records) {
                if (lr.box2d.x1 == d.box.x1 && lr.box2d.y1 == d.box.y1 &&
                    lr.box2d.x2 == d.box.x2 && lr.box2d.y2 == d.box.y2) {
                    LabelRecord copy = lr;
                    copy.score = d.score;
                    dets.push_back(copy);
                    break;
                }
            }
        }
        write_file(fs::path(out_dir) / "det_2" / (s.image_id + ".txt"),
                   write_label_file(dets));
    }
    std::string man;
    man += manifest_line("command", "synth");
    man += manifest_line("scenes", str(spec.num_scenes));
    man += manifest_line("lanes", str(spec.lanes));
    man += manifest_line("lane_width", str(spec.lane_width));
    man += manifest_line("slots_per_lane", str(spec.slots_per_lane));
    man += manifest_line("spacing_mean", str(spec.spacing_mean));
    man += manifest_line("spacing_sd", str(spec.spacing_sd));
    man += manifest_line("occupancy", str(spec.occupancy));
    man += manifest_line("rng_seed", str(spec.rng_seed));
    man += manifest_line("seeds_per_scene", str(spec.seeds_per_scene));
    write_file(fs::path(out_dir) / "manifest.txt", man);
    std::cout << "wrote " << scenes.size() << " scenes to " << out_dir << "\n";
    return 0;
}

// ---- fit ------------------------------------------------------------------

struct FitOptions {
    std::string model_kind = "topics";  // pairwise | topics | topics-elongation
    std::string frame = "oc";
    std::string out_path;
    int topics = 16;
    int theta_bins = 8;
    double alpha = -1;  // default 50/T
    double beta = 0.01;
    int iterations = 1000;
    std::uint64_t seed = 0;
    double x_extent = 30, z_extent = 60;
    int min_objects = 2;
};

int run_fit(const SceneInputs& in, const FitOptions& opt) {
    const auto ids = list_image_ids(in.labels_dir);
    std::vector<std::vector<Object3D>> scenes;
    double width_sum = 0;
    size_t width_count = 0;
    for (const auto& id : ids) {
        const auto recs =
            parse_label_file(read_file(fs::path(in.labels_dir) / (id + ".txt")));
        auto objs = class_objects(recs, in.class_name);
        for (const auto& o : objs) {
            width_sum += o.box.w;
            ++width_count;
        }
        if (int(objs.size()) >= opt.min_objects) scenes.push_back(std::move(objs));
    }
    if (scenes.empty()) throw EmptyCorpus();
    const double mean_width = width_count ? width_sum / double(width_count) : 1.6;

    RelationConfig cfg;
    cfg.frame = opt.frame == "cc" ? Frame::CameraCentered : Frame::ObjectCentered;
    cfg.pose_mode = opt.model_kind == "topics-elongation" ? PoseMode::Elongation
                                                          : PoseMode::FullPose;

    std::string man;
    man += manifest_line("command", "fit");
    man += manifest_line("model", opt.model_kind);
    man += manifest_line("frame", opt.frame);
    man += manifest_line("scenes", str(scenes.size()));
    man += manifest_line("mean_width", str(mean_width));
    man += manifest_line("rng_seed", str(opt.seed));

    if (opt.model_kind == "pairwise") {
        std::vector<PairwiseRelation> rels;
        for (const auto& s : scenes)
            for (const auto& [src, r] : scene_relations(s, cfg)) rels.push_back(r);
        const auto model = fit_kde(rels, cfg.pose_mode);
        std::ofstream out(opt.out_path);
        save_kde(model, out);
        man += manifest_line("relations", str(rels.size()));
        man += manifest_line("bandwidth_x", str(model.bandwidth.x));
        man += manifest_line("bandwidth_z", str(model.bandwidth.z));
        man += manifest_line("bandwidth_theta", str(model.bandwidth.theta));
    } else {
        Vocabulary vocab;
        vocab.pose_mode = cfg.pose_mode;
        vocab.theta_bins = opt.theta_bins;
        const double cell = mean_width / 2.0;
        vocab.cell_x = cell;
        vocab.cell_z = cell;
        // extents snapped to whole cells
        vocab.x_max = std::ceil(opt.x_extent / cell) * cell;
        vocab.x_min = -vocab.x_max;
        vocab.z_max = std::ceil(opt.z_extent / cell) * cell;
        vocab.z_min = -vocab.z_max;
        const auto corpus = build_corpus(scenes, cfg, vocab);
        const double alpha = opt.alpha > 0 ? opt.alpha : 50.0 / opt.topics;
        const auto model = fit_lda(corpus, vocab, opt.topics, alpha, opt.beta,
                                   opt.iterations, opt.seed);
        std::ofstream out(opt.out_path);
        save_lda(model, out);
        size_t tokens = 0;
        for (const auto& d : corpus) tokens += d.words.size();
        man += manifest_line("topics", str(opt.topics));
        man += manifest_line("theta_bins", str(opt.theta_bins));
        man += manifest_line("alpha", str(alpha));
        man += manifest_line("beta", str(opt.beta));
        man += manifest_line("iterations", str(opt.iterations));
        man += manifest_line("vocabulary_size", str(vocab.size()));
        man += manifest_line("documents", str(corpus.size()));
        man += manifest_line("tokens", str(tokens));
    }
    write_file(opt.out_path + ".manifest", man);
    std::cout << "wrote model to " << opt.out_path << "\n";
    return 0;
}

// ---- sample ---------------------------------------------------------------

struct SampleOptions {
    std::string detections_dir;
    std::string strategy = "sliding";  // sliding | pairwise | topics | topics-elongation
    std::string frame = "oc";
    std::string model_path;
    std::string out_path;
    int budget = 1000;
    double tau = 0.0;
    double nms_threshold = 0.5;
    double dedup_iou = 0.95;
    std::uint64_t seed = 0;
    std::string seed_mode = "all";  // all | top
    int jobs = 4;
};

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Grid: return "grid";
        case Provenance::PairwiseSample: return "pairwise";
        case Provenance::TopicSample: return "topic";
        case Provenance::Fallback: return "fallback";
    }
    return "?";
}

int run_sample(const SceneInputs& in, const GridOptions& grid_opt,
               const SampleOptions& opt) {
    Strategy strategy;
    if (opt.strategy == "sliding") strategy.kind = StrategyKind::SlidingWindow3D;
    else if (opt.strategy == "pairwise") strategy.kind = StrategyKind::PairwiseKDE;
    else if (opt.strategy == "topics") strategy.kind = StrategyKind::HigherOrderTopics;
    else if (opt.strategy == "topics-elongation")
        strategy.kind = StrategyKind::HigherOrderElongation;
    else throw std::runtime_error("unknown strategy: " + opt.strategy);
    strategy.frame =
        opt.frame == "cc" ? Frame::CameraCentered : Frame::ObjectCentered;

    KdeModel kde;
    LdaModel lda;
    Models models;
    if (strategy.kind == StrategyKind::PairwiseKDE) {
        if (opt.model_path.empty()) throw ModelMissing();
        std::ifstream mf(opt.model_path);
        if (!mf) throw std::runtime_error("cannot open model: " + opt.model_path);
        kde = load_kde(mf);
        models.kde = &kde;
    } else if (strategy.kind != StrategyKind::SlidingWindow3D) {
        if (opt.model_path.empty()) throw ModelMissing();
        std::ifstream mf(opt.model_path);
        if (!mf) throw std::runtime_error("cannot open model: " + opt.model_path);
        lda = load_lda(mf);
        models.lda = &lda;
    }
    TopicWordOrder lda_order;
    if (models.lda) {
        lda_order = TopicWordOrder::build(lda);
        models.lda_order = &lda_order;
    }

    const auto ids = list_image_ids(opt.detections_dir);
    std::vector<std::string> outputs(ids.size());
    std::atomic<size_t> next{0};
    std::atomic<size_t> fallbacks{0};

    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < ids.size(); i = next.fetch_add(1)) {
            const auto& id = ids[i];
            ProposalRequest req;
            req.camera = in.camera_for(id);
            req.grid = grid_opt.to_spec();
            req.budget = opt.budget;
            req.dedup_iou = opt.dedup_iou;
            req.rng_seed = opt.seed;
            req.seed_mode =
                opt.seed_mode == "top" ? SeedMode::TopScoring : SeedMode::All;

            const auto recs = parse_label_file(
                read_file(fs::path(opt.detections_dir) / (id + ".txt")));
            std::vector<Detection2D> dets;
            for (const auto& r : recs)
                if (r.type == in.class_name && r.score.value_or(0.0) >= opt.tau)
                    dets.push_back(to_detection(r));
            req.seeds = nms(dets, opt.nms_threshold);
            if (req.seeds.empty()) fallbacks.fetch_add(1);

            const auto set = generate(req, strategy, models);
            std::ostringstream os;
            os.setf(std::ios::fixed);
            os.precision(2);
            int rank = 0;
            for (const auto& p : set.proposals) {
                os << id << ' ' << rank++ << ' ' << p.box.x1 << ' ' << p.box.y1
                   << ' ' << p.box.x2 << ' ' << p.box.y2 << ' '
                   << provenance_name(p.tag);
                if (p.tag == Provenance::TopicSample) os << ':' << p.topic;
                os << '\n';
            }
            outputs[i] = os.str();
        }
    };
    std::vector<std::thread> pool;
    const int jobs = std::max(1, opt.jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::string all;
    for (const auto& o : outputs) all += o;
    write_file(opt.out_path, all);

    std::string man;
    man += manifest_line("command", "sample");
    man += manifest_line("strategy", opt.strategy);
    man += manifest_line("frame", opt.frame);
    man += manifest_line("budget", str(opt.budget));
    man += manifest_line("tau", str(opt.tau));
    man += manifest_line("nms_threshold", str(opt.nms_threshold));
    man += manifest_line("dedup_iou", str(opt.dedup_iou));
    man += manifest_line("rng_seed", str(opt.seed));
    man += manifest_line("seed_mode", opt.seed_mode);
    man += manifest_line("images", str(ids.size()));
    man += manifest_line("fallback_images", str(fallbacks.load()));
    write_file(opt.out_path + ".manifest", man);
    std::cout << "wrote proposals for " << ids.size() << " images ("
              << fallbacks.load() << " fallback) to " << opt.out_path << "\n";
    return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalOptions {
    std::string proposals_path;
    std::string out_path;
    std::string label = "strategy";
    std::vector<double> ious{0.5, 0.75};
    std::vector<int> budgets{1, 10, 50, 100, 500, 1000};
};

int run_eval(const SceneInputs& in, const EvalOptions& opt) {
    if (!fs::exists(opt.proposals_path))
        throw std::runtime_error("proposals file not found: " + opt.proposals_path);
    std::map<std::string, std::vector<Box2D>> by_image;
    {
        std::ifstream pf(opt.proposals_path);
        std::string id, tag;
        int rank;
        Box2D b;
        while (pf >> id >> rank >> b.x1 >> b.y1 >> b.x2 >> b.y2 >> tag)
            by_image[id].push_back(b);
    }
    const auto ids = list_image_ids(in.labels_dir);
    std::vector<SceneEval> scenes;
    for (const auto& id : ids) {
        SceneEval s;
        const auto recs =
            parse_label_file(read_file(fs::path(in.labels_dir) / (id + ".txt")));
        for (const auto& r : recs)
            if (r.type == in.class_name) s.annotations.push_back(r.box2d);
        if (s.annotations.empty()) continue;
        auto it = by_image.find(id);
        if (it != by_image.end()) s.proposals = it->second;
        scenes.push_back(std::move(s));
    }
    std::string csv;
    for (double iou : opt.ious) {
        const auto curve = recall_curve(scenes, opt.budgets, iou);
        std::string block = write_curve_csv(curve, opt.label);
        if (!csv.empty()) block.erase(0, block.find('\n') + 1);  // drop header
        csv += block;
    }
    write_file(opt.out_path, csv);
    std::cout << "wrote curves to " << opt.out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-based object proposal pipeline"};
    app.require_subcommand(1);
    app.set_config("--config");

    // synth
    SynthSpec synth_spec;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate synthetic street scenes");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--scenes", synth_spec.num_scenes, "number of scenes");
    synth->add_option("--lanes", synth_spec.lanes, "lane count");
    synth->add_option("--lane-width", synth_spec.lane_width, "lane width (m)");
    synth->add_option("--slots", synth_spec.slots_per_lane, "slots per lane");
    synth->add_option("--z-start", synth_spec.z_start, "first slot depth (m)");
    synth->add_option("--spacing", synth_spec.spacing_mean, "slot spacing mean (m)");
    synth->add_option("--spacing-sd", synth_spec.spacing_sd, "slot spacing sd (m)");
    synth->add_option("--headings", synth_spec.heading_set,
                      "per-lane headings (radians, cyclic)");
    synth->add_option("--occupancy", synth_spec.occupancy, "slot occupancy probability");
    synth->add_option("--seed", synth_spec.rng_seed, "rng seed");
    synth->add_option("--seeds-per-scene", synth_spec.seeds_per_scene,
                      "detections exported per scene");

    // fit
    SceneInputs fit_in;
    FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "fit relation models from labels");
    fit_in.add_flags(fit, true);
    fit->add_option("--model", fit_opt.model_kind,
                    "pairwise | topics | topics-elongation");
    fit->add_option("--frame", fit_opt.frame, "cc | oc");
    fit->add_option("--out", fit_opt.out_path, "model output path")->required();
    fit->add_option("--topics", fit_opt.topics, "topic count T");
    fit->add_option("--theta-bins", fit_opt.theta_bins, "angular bins");
    fit->add_option("--alpha", fit_opt.alpha, "LDA alpha (default 50/T)");
    fit->add_option("--beta", fit_opt.beta, "LDA beta");
    fit->add_option("--iters", fit_opt.iterations, "Gibbs sweeps");
    fit->add_option("--seed", fit_opt.seed, "rng seed");
    fit->add_option("--x-extent", fit_opt.x_extent, "relation |x| extent (m)");
    fit->add_option("--z-extent", fit_opt.z_extent, "relation |z| extent (m)");
    fit->add_option("--min-objects", fit_opt.min_objects,
                    "minimum objects per training image");

    // sample
    SceneInputs sample_in;
    GridOptions grid_opt;
    SampleOptions sample_opt;
    auto* sample = app.add_subcommand("sample", "generate ranked proposals");
    sample_in.add_flags(sample, false);
    grid_opt.add_flags(sample);
    sample->add_option("--detections", sample_opt.detections_dir,
                       "directory of detection files")
        ->required();
    sample->add_option("--strategy", sample_opt.strategy,
                       "sliding | pairwise | topics | topics-elongation");
    sample->add_option("--frame", sample_opt.frame, "cc | oc");
    sample->add_option("--model", sample_opt.model_path, "fitted model file");
    sample->add_option("--out", sample_opt.out_path, "proposals output path")
        ->required();
    sample->add_option("--budget", sample_opt.budget, "proposals per image");
    sample->add_option("--tau", sample_opt.tau, "detection score threshold");
    sample->add_option("--nms", sample_opt.nms_threshold, "seed NMS threshold");
    sample->add_option("--dedup", sample_opt.dedup_iou, "proposal dedup IoU");
    sample->add_option("--seed", sample_opt.seed, "rng seed");
    sample->add_option("--seed-mode", sample_opt.seed_mode, "all | top");
    sample->add_option("--jobs", sample_opt.jobs, "worker threads");

    // eval
    SceneInputs eval_in;
    EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "recall-vs-budget curves");
    eval_in.add_flags(eval, true);
    eval->add_option("--proposals", eval_opt.proposals_path, "proposals file")
        ->required();
    eval->add_option("--out", eval_opt.out_path, "CSV output path")->required();
    eval->add_option("--label", eval_opt.label, "strategy label in the CSV");
    eval->add_option("--iou", eval_opt.ious, "IoU thresholds");
    eval->add_option("--budgets", eval_opt.budgets, "budgets (ascending)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(synth_spec, synth_out);
        if (fit->parsed()) return run_fit(fit_in, fit_opt);
        if (sample->parsed()) return run_sample(sample_in, grid_opt, sample_opt);
        if (eval->parsed()) return run_eval(eval_in, eval_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
