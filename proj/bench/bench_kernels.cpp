// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "lsgd/descriptor.hpp"
#include "lsgd/fixture.hpp"
#include "lsgd/kernels.hpp"
#include "lsgd/segmentation.hpp"

namespace {

using namespace lsgd;

GrayImage bench_image(int side) {
  Lcg64 rng(17);
  return perturb(smooth_random_field(rng, side, side, 16), rng, 6);
}

template <auto Kernel>
void bm_assign(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto image = bench_image(side);
  SegmentationConfig cfg;
  cfg.sp = 16;
  const auto centers = init_centers(image, cfg);
  std::vector<std::int32_t> labels(image.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(image, centers, cfg, labels));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(image.size()));
}

template <auto Kernel>
void bm_score(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  SegmentationConfig cfg;
  cfg.sp = 16;
  Lcg64 rng(23);
  std::vector<Lsgd> database;
  for (std::size_t i = 0; i < count; ++i) {
    const auto img = smooth_random_field(rng, 64, 64, 8);
    database.push_back(extract_lsgd(img, segment(img, cfg)));
  }
  std::vector<const Lsgd*> ptrs;
  for (const auto& d : database) ptrs.push_back(&d);
  std::vector<double> out(count);
  for (auto _ : state) {
    Kernel(database.front(), ptrs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}

}  // namespace

BENCHMARK(bm_assign<kernels::assign_serial>)->Name("assign/serial")->Arg(128)->Arg(512);
BENCHMARK(bm_assign<kernels::assign_parallel>)->Name("assign/parallel")->Arg(128)->Arg(512);
BENCHMARK(bm_score<kernels::score_serial>)->Name("score/serial")->Arg(100)->Arg(1000);
BENCHMARK(bm_score<kernels::score_parallel>)->Name("score/parallel")->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
