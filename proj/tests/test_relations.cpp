#include "ctxprop/relations.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ctxprop;

namespace {

Object3D obj(double x, double z, double theta) {
    return Object3D{Box3D{x, z, 4, 1.6, 1.5, theta}, 1.0};
}

}  // namespace

TEST_CASE("elongation_fold") {
    CHECK(elongation_fold(0) == doctest::Approx(0));
    CHECK(elongation_fold(kPi) == doctest::Approx(0));
    CHECK(elongation_fold(5 * kPi / 4) == doctest::Approx(kPi / 4));
    CHECK(elongation_fold(-kPi / 4) == doctest::Approx(3 * kPi / 4));
}

TEST_CASE("elongation_fold is idempotent and pi-periodic") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng);
        const double f = elongation_fold(t);
        CHECK(f >= 0);
        CHECK(f < kPi);
        CHECK(elongation_fold(f) == doctest::Approx(f));
        CHECK(elongation_fold(t + kPi) == doctest::Approx(f).epsilon(1e-9));
    }
}

TEST_CASE("camera-centered relation is the raw difference") {
    const auto r = compute_pairwise(obj(0, 5, 0), obj(2, 9, kPi / 2),
                                    {Frame::CameraCentered, PoseMode::FullPose});
    CHECK(r.r_x == doctest::Approx(2));
    CHECK(r.r_z == doctest::Approx(4));
    CHECK(r.r_theta == doctest::Approx(kPi / 2));
}

TEST_CASE("object-centered equals camera-centered when src pose is zero") {
    const RelationConfig cc{Frame::CameraCentered, PoseMode::FullPose};
    const RelationConfig oc{Frame::ObjectCentered, PoseMode::FullPose};
    const auto a = compute_pairwise(obj(1, 7, 0), obj(-3, 12, 1.0), cc);
    const auto b = compute_pairwise(obj(1, 7, 0), obj(-3, 12, 1.0), oc);
    CHECK(a.r_x == doctest::Approx(b.r_x));
    CHECK(a.r_z == doctest::Approx(b.r_z));
    CHECK(a.r_theta == doctest::Approx(b.r_theta));
}

TEST_CASE("object-centered half-turn negates the offset") {
    const RelationConfig oc{Frame::ObjectCentered, PoseMode::FullPose};
    const auto r = compute_pairwise(obj(1, 7, kPi), obj(3, 10, 0.5), oc);
    CHECK(r.r_x == doctest::Approx(-2));
    CHECK(r.r_z == doctest::Approx(-3));
    CHECK(r.r_theta == doctest::Approx(wrap_angle(0.5 - kPi)));
}

TEST_CASE("camera-centered relations are translation covariant") {
    const RelationConfig cc{Frame::CameraCentered, PoseMode::FullPose};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 100; ++i) {
        const double x1 = u(rng), z1 = u(rng), x2 = u(rng), z2 = u(rng);
        const double tx = u(rng), tz = u(rng);
        const auto a = compute_pairwise(obj(x1, z1, 0.3), obj(x2, z2, -0.7), cc);
        const auto b =
            compute_pairwise(obj(x1 + tx, z1 + tz, 0.3), obj(x2 + tx, z2 + tz, -0.7), cc);
        CHECK(a.r_x == doctest::Approx(b.r_x).epsilon(1e-9));
        CHECK(a.r_z == doctest::Approx(b.r_z).epsilon(1e-9));
    }
}

TEST_CASE("object-centered relations are rigid-motion invariant") {
    const RelationConfig oc{Frame::ObjectCentered, PoseMode::FullPose};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-20, 20);
    std::uniform_real_distribution<double> ua(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        const Object3D s = obj(u(rng), u(rng), ua(rng));
        const Object3D d = obj(u(rng), u(rng), ua(rng));
        const double phi = ua(rng), tx = u(rng), tz = u(rng);
        auto rotate = [&](const Object3D& o) {
            const double c = std::cos(phi), sn = std::sin(phi);
            return obj(o.box.x * c - o.box.z * sn + tx,
                       o.box.x * sn + o.box.z * c + tz,
                       wrap_angle(o.box.theta + phi));
        };
        const auto r1 = compute_pairwise(s, d, oc);
        const auto r2 = compute_pairwise(rotate(s), rotate(d), oc);
        CHECK(r1.r_x == doctest::Approx(r2.r_x).epsilon(1e-7));
        CHECK(r1.r_z == doctest::Approx(r2.r_z).epsilon(1e-7));
        CHECK(wrap_angle(r1.r_theta - r2.r_theta) == doctest::Approx(0).epsilon(1e-7));
    }
}

TEST_CASE("camera-centered relation is antisymmetric in location") {
    const RelationConfig cc{Frame::CameraCentered, PoseMode::FullPose};
    const auto fwd = compute_pairwise(obj(1, 5, 0.2), obj(4, 9, 1.1), cc);
    const auto rev = compute_pairwise(obj(4, 9, 1.1), obj(1, 5, 0.2), cc);
    CHECK(fwd.r_x == doctest::Approx(-rev.r_x));
    CHECK(fwd.r_z == doctest::Approx(-rev.r_z));
}

TEST_CASE("elongation mode keeps r_theta in [0, pi)") {
    const RelationConfig cfg{Frame::CameraCentered, PoseMode::Elongation};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ua(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        const auto r = compute_pairwise(obj(0, 5, ua(rng)), obj(1, 9, ua(rng)), cfg);
        CHECK(r.r_theta >= 0);
        CHECK(r.r_theta < kPi);
    }
}

TEST_CASE("scene_relations emits all ordered pairs") {
    std::vector<Object3D> two{obj(0, 5, 0), obj(1, 8, 0)};
    CHECK(scene_relations(two, {}).size() == 2);
    std::vector<Object3D> five;
    for (int i = 0; i < 5; ++i) five.push_back(obj(i, 5 + i, 0));
    CHECK(scene_relations(five, {}).size() == 20);
    std::vector<Object3D> one{obj(0, 5, 0)};
    CHECK_THROWS_AS(scene_relations(one, {}), TooFewObjects);
}
