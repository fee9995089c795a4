#include "ctxprop/dataset.hpp"
#include "ctxprop/kde.hpp"
#include "ctxprop/proposals.hpp"
#include "ctxprop/topics.hpp"

#include <benchmark/benchmark.h>

using namespace ctxprop;

namespace {

GridSpec bench_grid() {
    GridSpec g;
    g.x_min = -15;
    g.x_max = 15;
    g.z_min = 4;
    g.z_max = 64;
    g.x_step = 0.5;
    g.z_step = 0.5;
    g.num_orientations = 8;
    g.l = 4;
    g.w = 1.6;
    g.h = 1.5;
    return g;
}

void BM_ProjectBox(benchmark::State& state) {
    const auto cam = synthetic_camera();
    const Box3D box{1.5, 20, 4, 1.6, 1.5, 0.7};
    for (auto _ : state) benchmark::DoNotOptimize(try_project_box(box, cam));
}
BENCHMARK(BM_ProjectBox);

void BM_ProjectedGridBuild(benchmark::State& state) {
    const auto cam = synthetic_camera();
    const auto grid = generate_grid(bench_grid());
    for (auto _ : state)
        benchmark::DoNotOptimize(ProjectedGrid::build(grid, cam));
}
BENCHMARK(BM_ProjectedGridBuild);

void BM_LiftDetection(benchmark::State& state) {
    const auto cam = synthetic_camera();
    const auto pg = ProjectedGrid::build(generate_grid(bench_grid()), cam);
    const Detection2D d{project_box(Box3D{1.5, 20, 4, 1.6, 1.5, 0}, cam), 0, 1};
    for (auto _ : state) benchmark::DoNotOptimize(lift_detection(d, pg));
}
BENCHMARK(BM_LiftDetection);

void BM_KdeSample(benchmark::State& state) {
    std::vector<PairwiseRelation> rels;
    for (int i = 0; i < 200; ++i)
        rels.push_back({double(i % 7) - 3, double(i % 11), 0.1 * (i % 5)});
    const auto m = fit_kde(rels, PoseMode::FullPose);
    std::mt19937_64 rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(kde_sample_one(m, rng));
}
BENCHMARK(BM_KdeSample);

void BM_GibbsSweep(benchmark::State& state) {
    Vocabulary v;
    v.cell_x = 1;
    v.cell_z = 1;
    v.theta_bins = 4;
    v.x_min = -8;
    v.x_max = 8;
    v.z_min = -8;
    v.z_max = 8;
    std::vector<Document> corpus;
    for (int d = 0; d < 100; ++d) {
        Document doc;
        for (int j = 0; j < 30; ++j) doc.words.push_back((d * 13 + j * 7) % v.size());
        corpus.push_back(doc);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_lda(corpus, v, 8, 50.0 / 8, 0.01, 1, 1));
}
BENCHMARK(BM_GibbsSweep);

}  // namespace

BENCHMARK_MAIN();
