#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ctxprop {

inline constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle into (-pi, pi].
double wrap_angle(double theta);

struct Box2D {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    bool valid() const { return x1 < x2 && y1 < y2; }
};

/// Ground-plane 3D box. (x, z) is the footprint center in camera
/// coordinates (x right, z forward); the box rests on the ground,
/// spanning y in [-h, 0] relative to the ground level. theta is the
/// yaw about the vertical axis, measured from +z toward +x.
struct Box3D {
    double x = 0, z = 0;
    double l = 1, w = 1, h = 1;
    double theta = 0;
};

struct Object3D {
    Box3D box;
    double score = 0;
};

struct Detection2D {
    Box2D box;
    double viewpoint_alpha = 0;  // egocentric observation angle, (-pi, pi]
    double score = 0;
};

/// Pinhole camera: 3x4 projection matrix mapping homogeneous camera-frame
/// meters to pixels. The camera sits height_above_ground meters above the
/// ground plane (y points down, so ground is at y = +height_above_ground).
struct CameraModel {
    Eigen::Matrix<double, 3, 4> projection = Eigen::Matrix<double, 3, 4>::Zero();
    int image_width = 0;
    int image_height = 0;
    double height_above_ground = 1.65;
};

/// Dense 3D proposal lattice. Orientations are the K/2 distinct values
/// in [0, pi); opposite headings project to the same 2D box.
struct GridSpec {
    double x_min = 0, x_max = 0;
    double z_min = 0, z_max = 0;
    double x_step = 0.5, z_step = 0.5;
    int num_orientations = 8;  // K, even, >= 2
    double l = 1, w = 1, h = 1;  // default proposal size
};

struct BehindCamera : std::runtime_error {
    BehindCamera() : std::runtime_error("box corner behind camera") {}
};
struct OutOfImage : std::runtime_error {
    OutOfImage() : std::runtime_error("projected box outside image") {}
};
struct EmptyGrid : std::runtime_error {
    EmptyGrid() : std::runtime_error("grid spec admits no lattice point") {}
};
struct NoProjectableBox : std::runtime_error {
    NoProjectableBox() : std::runtime_error("no grid box projects into the image") {}
};
struct NoOverlap : std::runtime_error {
    NoOverlap() : std::runtime_error("detection overlaps no grid projection") {}
};

/// Axis-aligned hull of the 8 projected corners, clipped to the image.
/// Throws BehindCamera / OutOfImage.
Box2D project_box(const Box3D& b, const CameraModel& cam);

/// Same as project_box but returns nullopt on failure.
std::optional<Box2D> try_project_box(const Box3D& b, const CameraModel& cam);

double iou_2d(const Box2D& a, const Box2D& b);

/// Deterministic z-major, then x, then theta enumeration.
std::vector<Box3D> generate_grid(const GridSpec& spec);

/// Grid with projections computed once; reusable across detections
/// sharing a camera.
struct ProjectedGrid {
    std::vector<Box3D> boxes;
    std::vector<std::optional<Box2D>> projections;

    static ProjectedGrid build(const std::vector<Box3D>& grid, const CameraModel& cam);
};

/// KITTI devkit convention: rot_y = alpha + atan2(x, z).
double viewpoint_to_pose(double alpha, double x, double z);

/// Best-IoU grid box, ties broken by smaller (z, x, theta).
/// Throws NoProjectableBox / NoOverlap.
Object3D lift_detection(const Detection2D& d, const ProjectedGrid& grid);
Object3D lift_detection(const Detection2D& d, const std::vector<Box3D>& grid,
                        const CameraModel& cam);

/// Greedy NMS by descending score (ties by input order). threshold = 1.0
/// keeps everything.
std::vector<Detection2D> nms(const std::vector<Detection2D>& dets,
                             double overlap_threshold);

}  // namespace ctxprop
