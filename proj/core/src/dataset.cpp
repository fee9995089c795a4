#include "ctxprop/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace ctxprop {

Box3D to_box3d(const LabelRecord& r) {
    return Box3D{r.x, r.z, r.l, r.w, r.h, wrap_angle(r.rot_y)};
}

Detection2D to_detection(const LabelRecord& r) {
    return Detection2D{r.box2d, wrap_angle(r.alpha), r.score.value_or(0.0)};
}

std::vector<LabelRecord> parse_label_file(const std::string& text) {
    std::vector<LabelRecord> out;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream fields(line);
        std::vector<std::string> tok;
        std::string f;
        while (fields >> f) tok.push_back(f);
        if (tok.size() != 15 && tok.size() != 16)
            throw MalformedLine(line_no, int(tok.size()));
        LabelRecord r;
        r.type = tok[0];
        double v[15];
        for (size_t i = 1; i < tok.size(); ++i) {
            try {
                v[i - 1] = std::stod(tok[i]);
            } catch (const std::exception&) {
                throw MalformedLine(line_no, int(i));
            }
        }
        r.truncated = v[0];
        r.occluded = v[1];
        r.alpha = v[2];
        r.box2d = Box2D{v[3], v[4], v[5], v[6]};
        r.h = v[7];
        r.w = v[8];
        r.l = v[9];
        r.x = v[10];
        r.y = v[11];
        r.z = v[12];
        r.rot_y = v[13];
        if (tok.size() == 16) r.score = v[14];
        out.push_back(std::move(r));
    }
    return out;
}

std::string write_label_file(const std::vector<LabelRecord>& records) {
    std::ostringstream os;
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf),
                      "%s %.2f %.0f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f "
                      "%.6f %.6f %.6f",
                      r.type.c_str(), r.truncated, r.occluded, r.alpha, r.box2d.x1,
                      r.box2d.y1, r.box2d.x2, r.box2d.y2, r.h, r.w, r.l, r.x, r.y,
                      r.z, r.rot_y);
        os << buf;
        if (r.score) {
            std::snprintf(buf, sizeof(buf), " %.6f", *r.score);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

CameraModel parse_calibration(const std::string& text, const std::string& key,
                              int image_width, int image_height) {
    std::istringstream lines(text);
    std::string line;
    const std::string prefix = key + ":";
    while (std::getline(lines, line)) {
        if (line.rfind(prefix, 0) != 0) continue;
        std::istringstream fields(line.substr(prefix.size()));
        std::vector<double> vals;
        double v;
        while (fields >> v) vals.push_back(v);
        if (vals.size() != 12) throw MalformedMatrix(key);
        CameraModel cam;
        cam.image_width = image_width;
        cam.image_height = image_height;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) cam.projection(r, c) = vals[r * 4 + c];
        return cam;
    }
    throw MissingMatrix(key);
}

std::string write_calibration(const CameraModel& cam, const std::string& key) {
    std::ostringstream os;
    os << key << ":";
    char buf[64];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) {
            std::snprintf(buf, sizeof(buf), " %.12e", cam.projection(r, c));
            os << buf;
        }
    os << '\n';
    return os.str();
}

std::pair<std::vector<SceneRecord>, std::vector<SceneRecord>> split_dataset(
    const std::vector<SceneRecord>& records, const SplitSpec& spec) {
    std::vector<SceneRecord> eligible;
    for (const auto& r : records) {
        int count = 0;
        for (const auto& a : r.annotation_records)
            if (a.type == spec.class_of_interest) ++count;
        if (r.annotation_records.empty())
            count = int(r.annotations.size());  // synthetic records without labels
        if (count >= spec.min_objects_per_image) eligible.push_back(r);
    }
    std::sort(eligible.begin(), eligible.end(),
              [](const SceneRecord& a, const SceneRecord& b) {
                  return a.image_id < b.image_id;
              });
    const size_t n_train = size_t(std::ceil(spec.fraction * double(eligible.size())));
    std::vector<SceneRecord> train(eligible.begin(),
                                   eligible.begin() + std::min(n_train, eligible.size()));
    std::vector<SceneRecord> test(eligible.begin() + std::min(n_train, eligible.size()),
                                  eligible.end());
    return {std::move(train), std::move(test)};
}

CameraModel synthetic_camera() {
    CameraModel cam;
    cam.image_width = 1242;
    cam.image_height = 375;
    cam.height_above_ground = 1.65;
    cam.projection << 721.5, 0, 609.5, 0,
                      0, 721.5, 172.8, 0,
                      0, 0, 1, 0;
    return cam;
}

std::vector<SceneRecord> generate_synthetic(const SynthSpec& spec) {
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const CameraModel cam = synthetic_camera();

    std::vector<SceneRecord> scenes;
    scenes.reserve(spec.num_scenes);
    for (int s = 0; s < spec.num_scenes; ++s) {
        SceneRecord rec;
        char id[16];
        std::snprintf(id, sizeof(id), "%06d", s);
        rec.image_id = id;
        rec.camera = cam;
        for (int lane = 0; lane < spec.lanes; ++lane) {
            const double lane_x =
                (lane - (spec.lanes - 1) / 2.0) * spec.lane_width;
            const double heading =
                spec.heading_set.empty()
                    ? 0.0
                    : spec.heading_set[lane % spec.heading_set.size()];
            for (int slot = 0; slot < spec.slots_per_lane; ++slot) {
                const double z = spec.z_start + slot * spec.spacing_mean +
                                 jitter(rng) * spec.spacing_sd;
                const bool occupied = unif(rng) < spec.occupancy;
                if (!occupied) continue;
                Box3D box{lane_x, z, spec.car_l, spec.car_w, spec.car_h,
                          wrap_angle(heading)};
                const auto proj = try_project_box(box, cam);
                if (!proj) continue;
                rec.annotations.emplace_back(*proj, box);
                LabelRecord lr;
                lr.type = "Car";
                lr.alpha = wrap_angle(box.theta - std::atan2(box.x, box.z));
                lr.box2d = *proj;
                lr.h = box.h;
                lr.w = box.w;
                lr.l = box.l;
                lr.x = box.x;
                lr.y = cam.height_above_ground;
                lr.z = box.z;
                lr.rot_y = box.theta;
                rec.annotation_records.push_back(lr);
            }
        }
        // seeds: nearest cars, exact box and viewpoint
        std::vector<size_t> order(rec.annotations.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return rec.annotations[a].second.z < rec.annotations[b].second.z;
        });
        for (int k = 0; k < spec.seeds_per_scene && k < int(order.size()); ++k) {
            const auto& lr = rec.annotation_records[order[k]];
            Detection2D d = to_detection(lr);
            d.score = 1.0;
            rec.detections.push_back(d);
        }
        scenes.push_back(std::move(rec));
    }
    return scenes;
}

}  // namespace ctxprop
