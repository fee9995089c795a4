#include "ctxprop/kde.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace ctxprop;

namespace {

PairwiseRelation rel(double x, double z, double t) { return PairwiseRelation{x, z, t}; }

}  // namespace

TEST_CASE("fit_kde rejects an empty training set") {
    CHECK_THROWS_AS(fit_kde({}, PoseMode::FullPose), EmptyTrainingSet);
}

TEST_CASE("fixed zero bandwidth is a point mass") {
    const auto m = fit_kde({rel(1, 2, 0.5)}, PoseMode::FullPose, Bandwidth{0, 0, 0});
    const auto draws = kde_sample(m, 42, 50);
    for (const auto& d : draws) {
        CHECK(d.r_x == doctest::Approx(1));
        CHECK(d.r_z == doctest::Approx(2));
        CHECK(d.r_theta == doctest::Approx(0.5));
    }
}

TEST_CASE("Silverman bandwidth is zero for identical samples") {
    std::vector<PairwiseRelation> rs(10, rel(3, 4, 0.2));
    const auto m = fit_kde(rs, PoseMode::FullPose);
    CHECK(m.bandwidth.x == doctest::Approx(0));
    CHECK(m.bandwidth.z == doctest::Approx(0));
    CHECK(m.bandwidth.theta == doctest::Approx(0).epsilon(1e-6));
}

TEST_CASE("Silverman rule matches the direct formula") {
    // 100 samples with population sigma_x exactly 2.0
    std::vector<PairwiseRelation> rs;
    for (int i = 0; i < 50; ++i) rs.push_back(rel(-2, 0, 0));
    for (int i = 0; i < 50; ++i) rs.push_back(rel(2, 0, 0));
    const auto m = fit_kde(rs, PoseMode::FullPose);
    CHECK(m.bandwidth.x ==
          doctest::Approx(1.06 * 2.0 * std::pow(100.0, -0.2)).epsilon(1e-9));
    CHECK(m.bandwidth.x == doctest::Approx(0.8456).epsilon(1e-3));
    CHECK(m.bandwidth.z == doctest::Approx(0));
}

TEST_CASE("kde_density matches the closed-form two-component mixture") {
    const auto m = fit_kde({rel(0, 0, 0), rel(4, 0, 0)}, PoseMode::FullPose,
                           Bandwidth{1, 1, 1});
    // independent closed-form evaluation at (2, 0, 0)
    auto g = [](double d, double h) {
        return std::exp(-0.5 * d * d / (h * h)) / (h * std::sqrt(2 * kPi));
    };
    auto wg = [&](double d, double h) {
        return g(d, h) + g(d + 2 * kPi, h) + g(d - 2 * kPi, h);
    };
    const double expected =
        0.5 * (g(2, 1) * g(0, 1) * wg(0, 1) + g(-2, 1) * g(0, 1) * wg(0, 1));
    CHECK(kde_density(m, rel(2, 0, 0)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kde_density peaks at a lone sample and decays far away") {
    const auto m =
        fit_kde({rel(1, 2, 0.3)}, PoseMode::FullPose, Bandwidth{0.5, 0.5, 0.2});
    const double peak = kde_density(m, rel(1, 2, 0.3));
    CHECK(peak > kde_density(m, rel(1.4, 2, 0.3)));
    CHECK(peak > kde_density(m, rel(1, 2.4, 0.35)));
    CHECK(kde_density(m, rel(20, 30, 0.3)) < 1e-6 * peak);
}

TEST_CASE("kde_density requires positive bandwidth") {
    const auto m = fit_kde({rel(0, 0, 0)}, PoseMode::FullPose, Bandwidth{0, 1, 1});
    CHECK_THROWS_AS(kde_density(m, rel(0, 0, 0)), ZeroBandwidth);
}

TEST_CASE("kde_sample is deterministic given the seed") {
    const auto m = fit_kde({rel(0, 0, 0), rel(4, 2, 1)}, PoseMode::FullPose,
                           Bandwidth{1, 1, 0.3});
    const auto a = kde_sample(m, 9, 100);
    const auto b = kde_sample(m, 9, 100);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].r_x == b[i].r_x);
        CHECK(a[i].r_z == b[i].r_z);
        CHECK(a[i].r_theta == b[i].r_theta);
    }
}

TEST_CASE("kde_sample statistics match the mixture") {
    // components far apart so draws are attributable by sign of r_x
    const auto m = fit_kde({rel(-50, 0, 0), rel(50, 0, 0)}, PoseMode::FullPose,
                           Bandwidth{1.5, 2.0, 0.1});
    const size_t n = 100000;
    const auto draws = kde_sample(m, 123, n);
    size_t left = 0;
    double mean_z = 0;
    for (const auto& d : draws) {
        if (d.r_x < 0) ++left;
        mean_z += d.r_z;
    }
    mean_z /= double(n);
    CHECK(double(left) / double(n) == doctest::Approx(0.5).epsilon(0.02));
    // per-dimension variance approaches sigma_samples^2 + h^2
    double var_z = 0, var_x = 0;
    for (const auto& d : draws) {
        var_z += (d.r_z - mean_z) * (d.r_z - mean_z);
        const double mu = d.r_x < 0 ? -50.0 : 50.0;
        var_x += (d.r_x - mu) * (d.r_x - mu);
    }
    var_z /= double(n);
    var_x /= double(n);
    CHECK(var_z == doctest::Approx(2.0 * 2.0).epsilon(0.05));
    CHECK(var_x == doctest::Approx(1.5 * 1.5).epsilon(0.05));
}

TEST_CASE("angular draws stay in the declared range") {
    const auto mf = fit_kde({rel(0, 0, 3.0)}, PoseMode::FullPose, Bandwidth{0, 0, 1});
    for (const auto& d : kde_sample(mf, 5, 1000)) {
        CHECK(d.r_theta > -kPi);
        CHECK(d.r_theta <= kPi);
    }
    const auto me = fit_kde({rel(0, 0, 2.0)}, PoseMode::Elongation, Bandwidth{0, 0, 1});
    for (const auto& d : kde_sample(me, 5, 1000)) {
        CHECK(d.r_theta >= 0);
        CHECK(d.r_theta < kPi);
    }
}

TEST_CASE("zero-bandwidth fit-sample-fit reproduces the sample multiset") {
    const std::vector<PairwiseRelation> rs{rel(0, 1, 0.1), rel(2, 3, 0.2),
                                           rel(-4, 5, 0.3)};
    const auto m = fit_kde(rs, PoseMode::FullPose, Bandwidth{0, 0, 0});
    const auto draws = kde_sample(m, 77, 3000);
    std::set<double> xs;
    for (const auto& d : draws) xs.insert(d.r_x);
    CHECK(xs == std::set<double>{-4.0, 0.0, 2.0});
}

TEST_CASE("kde model round-trips through serialization") {
    const auto m = fit_kde({rel(0.25, -1.5, 0.75), rel(4, 2, -2)},
                           PoseMode::Elongation, Bandwidth{1.25, 0.5, 0.2});
    std::stringstream ss;
    save_kde(m, ss);
    const auto back = load_kde(ss);
    CHECK(back.pose_mode == m.pose_mode);
    CHECK(back.bandwidth.x == m.bandwidth.x);
    REQUIRE(back.samples.size() == m.samples.size());
    for (size_t i = 0; i < m.samples.size(); ++i) {
        CHECK(back.samples[i].r_x == m.samples[i].r_x);
        CHECK(back.samples[i].r_theta == m.samples[i].r_theta);
    }
}
