#include "ctxprop/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace ctxprop {

double wrap_angle(double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t <= -kPi) t += 2.0 * kPi;
    if (t > kPi) t -= 2.0 * kPi;
    return t;
}

namespace {

// 8 corners of a ground-plane box in camera coordinates.
std::array<Eigen::Vector4d, 8> box_corners(const Box3D& b, double ground_y) {
    const double c = std::cos(b.theta);
    const double s = std::sin(b.theta);
    // length axis points along the heading, width axis is perpendicular
    const double ux = s, uz = c;
    const double vx = c, vz = -s;
    std::array<Eigen::Vector4d, 8> corners;
    int k = 0;
    for (double dl : {-b.l / 2, b.l / 2})
        for (double dw : {-b.w / 2, b.w / 2})
            for (double dy : {0.0, -b.h}) {
                corners[k++] = Eigen::Vector4d(b.x + dl * ux + dw * vx,
                                               ground_y + dy,
                                               b.z + dl * uz + dw * vz, 1.0);
            }
    return corners;
}

}  // namespace

Box2D project_box(const Box3D& b, const CameraModel& cam) {
    const auto corners = box_corners(b, cam.height_above_ground);
    double x1 = std::numeric_limits<double>::infinity();
    double y1 = std::numeric_limits<double>::infinity();
    double x2 = -std::numeric_limits<double>::infinity();
    double y2 = -std::numeric_limits<double>::infinity();
    for (const auto& c : corners) {
        Eigen::Vector3d p = cam.projection * c;
        if (p.z() <= 0) throw BehindCamera();
        const double u = p.x() / p.z();
        const double v = p.y() / p.z();
        x1 = std::min(x1, u);
        y1 = std::min(y1, v);
        x2 = std::max(x2, u);
        y2 = std::max(y2, v);
    }
    x1 = std::max(x1, 0.0);
    y1 = std::max(y1, 0.0);
    x2 = std::min(x2, double(cam.image_width));
    y2 = std::min(y2, double(cam.image_height));
    if (x2 <= x1 || y2 <= y1 || (x2 - x1) * (y2 - y1) < 1.0) throw OutOfImage();
    return Box2D{x1, y1, x2, y2};
}

std::optional<Box2D> try_project_box(const Box3D& b, const CameraModel& cam) {
    try {
        return project_box(b, cam);
    } catch (const BehindCamera&) {
        return std::nullopt;
    } catch (const OutOfImage&) {
        return std::nullopt;
    }
}

double iou_2d(const Box2D& a, const Box2D& b) {
    const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (ix <= 0 || iy <= 0) return 0.0;
    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

std::vector<Box3D> generate_grid(const GridSpec& spec) {
    if (spec.x_step <= 0 || spec.z_step <= 0 || spec.x_max < spec.x_min ||
        spec.z_max < spec.z_min || spec.num_orientations < 2 ||
        spec.num_orientations % 2 != 0) {
        throw EmptyGrid();
    }
    const int no = spec.num_orientations / 2;
    const double dtheta = kPi / no;
    // half-step tolerance against float drift on the last lattice point
    std::vector<Box3D> out;
    for (double z = spec.z_min; z <= spec.z_max + spec.z_step * 0.5; z += spec.z_step) {
        for (double x = spec.x_min; x <= spec.x_max + spec.x_step * 0.5; x += spec.x_step) {
            for (int k = 0; k < no; ++k) {
                out.push_back(Box3D{x, z, spec.l, spec.w, spec.h, k * dtheta});
            }
        }
    }
    if (out.empty()) throw EmptyGrid();
    return out;
}

ProjectedGrid ProjectedGrid::build(const std::vector<Box3D>& grid,
                                   const CameraModel& cam) {
    ProjectedGrid pg;
    pg.boxes = grid;
    pg.projections.reserve(grid.size());
    for (const auto& b : grid) pg.projections.push_back(try_project_box(b, cam));
    return pg;
}

double viewpoint_to_pose(double alpha, double x, double z) {
    return wrap_angle(alpha + std::atan2(x, z));
}

namespace {

bool grid_less(const Box3D& a, const Box3D& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.x != b.x) return a.x < b.x;
    return a.theta < b.theta;
}

}  // namespace

Object3D lift_detection(const Detection2D& d, const ProjectedGrid& grid) {
    if (grid.boxes.empty()) throw NoProjectableBox();
    double best_iou = 0.0;
    const Box3D* best = nullptr;
    bool any_projected = false;
    for (size_t i = 0; i < grid.boxes.size(); ++i) {
        if (!grid.projections[i]) continue;
        any_projected = true;
        const double iou = iou_2d(d.box, *grid.projections[i]);
        if (iou > best_iou ||
            (iou == best_iou && best && iou > 0 && grid_less(grid.boxes[i], *best))) {
            best_iou = iou;
            best = &grid.boxes[i];
        }
    }
    if (!any_projected) throw NoProjectableBox();
    if (!best || best_iou == 0.0) throw NoOverlap();
    Box3D box = *best;
    box.theta = viewpoint_to_pose(d.viewpoint_alpha, box.x, box.z);
    return Object3D{box, d.score};
}

Object3D lift_detection(const Detection2D& d, const std::vector<Box3D>& grid,
                        const CameraModel& cam) {
    return lift_detection(d, ProjectedGrid::build(grid, cam));
}

std::vector<Detection2D> nms(const std::vector<Detection2D>& dets,
                             double overlap_threshold) {
    std::vector<size_t> order(dets.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return dets[a].score > dets[b].score;
    });
    std::vector<Detection2D> kept;
    for (size_t i : order) {
        bool suppressed = false;
        for (const auto& k : kept) {
            if (iou_2d(dets[i].box, k.box) > overlap_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(dets[i]);
    }
    return kept;
}

}  // namespace ctxprop
