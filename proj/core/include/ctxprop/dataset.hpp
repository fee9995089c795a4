#pragma once

#include "ctxprop/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctxprop {

struct MalformedLine : std::runtime_error {
    int line_number;
    int field_index;
    MalformedLine(int line, int field)
        : std::runtime_error("malformed label line " + std::to_string(line) +
                             " at field " + std::to_string(field)),
          line_number(line),
          field_index(field) {}
};
struct MissingMatrix : std::runtime_error {
    explicit MissingMatrix(const std::string& key)
        : std::runtime_error("calibration key not found: " + key) {}
};
struct MalformedMatrix : std::runtime_error {
    explicit MalformedMatrix(const std::string& key)
        : std::runtime_error("calibration matrix malformed for key: " + key) {}
};

/// One KITTI label line. 3D location (x, y, z) is the bottom-center of the
/// box in camera coordinates; rot_y is the yaw. Detection files carry a
/// trailing score.
struct LabelRecord {
    std::string type;
    double truncated = 0, occluded = 0, alpha = 0;
    Box2D box2d;
    double h = 0, w = 0, l = 0;
    double x = 0, y = 0, z = 0;
    double rot_y = 0;
    std::optional<double> score;
};

/// KITTI bottom-center location maps directly onto the footprint center.
Box3D to_box3d(const LabelRecord& r);
Detection2D to_detection(const LabelRecord& r);

std::vector<LabelRecord> parse_label_file(const std::string& text);
std::string write_label_file(const std::vector<LabelRecord>& records);

/// Reads the projection matrix under the given key (12 reals per line,
/// KITTI layout). Image size is not stored in calibration files.
CameraModel parse_calibration(const std::string& text, const std::string& key = "P2",
                              int image_width = 1242, int image_height = 375);
std::string write_calibration(const CameraModel& cam, const std::string& key = "P2");

struct SceneRecord {
    std::string image_id;
    CameraModel camera;
    std::vector<std::pair<Box2D, Box3D>> annotations;
    std::vector<LabelRecord> annotation_records;
    std::vector<Detection2D> detections;
};

enum class OrderingKey { Timestamp, ImageId };

struct SplitSpec {
    OrderingKey ordering_key = OrderingKey::ImageId;
    double fraction = 0.5;
    int min_objects_per_image = 2;
    std::string class_of_interest = "Car";
};

/// Sorts eligible scenes by id, first ceil(fraction * n) to train. Scenes
/// with fewer than min_objects_per_image instances of the class of
/// interest are excluded from both splits.
std::pair<std::vector<SceneRecord>, std::vector<SceneRecord>> split_dataset(
    const std::vector<SceneRecord>& records, const SplitSpec& spec);

/// Synthetic street scenes with planted relational structure: cars on lane
/// centerlines at noisy regular spacing, lane-dependent headings. Seeds
/// are the nearest cars with exact boxes and viewpoints.
struct SynthSpec {
    int num_scenes = 1;
    int lanes = 2;
    double lane_width = 3.0;
    int slots_per_lane = 6;
    double z_start = 8.0;
    double spacing_mean = 8.0, spacing_sd = 0.5;
    std::vector<double> heading_set = {0.0, kPi};  // per lane, cyclic
    double occupancy = 1.0;
    std::uint64_t rng_seed = 0;
    int seeds_per_scene = 1;
    double car_l = 4.0, car_w = 1.6, car_h = 1.5;
};

CameraModel synthetic_camera();
std::vector<SceneRecord> generate_synthetic(const SynthSpec& spec);

}  // namespace ctxprop
