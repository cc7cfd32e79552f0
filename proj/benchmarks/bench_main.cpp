#include <benchmark/benchmark.h>

#include <cmath>

#include "generators.hpp"
#include "tour.hpp"
#include "traceview/diff.hpp"
#include "traceview/projection.hpp"
#include "traceview/viewpoint.hpp"

using namespace traceview;

namespace {

const std::string kSaved = "2012-05-01T10:00:00Z";

// Copies of a captured state over the budget fixture, each with up to
// `edits` random assignment changes.
std::vector<Viewpoint> family(std::size_t n, std::size_t edits) {
  tvtest::Rng rng(42);
  auto schema = std::make_shared<const PreferenceSchema>(default_schema());
  MetaDraft draft;
  draft.name = "base";
  draft.owner = "bench";
  auto base = capture(tvtest::tour_state(schema, tvtest::fixture("ministries_budget.csv"), 1), draft);
  std::vector<Viewpoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(tvtest::perturbed(rng, base, *schema, edits));
    out.back().file.name = "vp" + std::to_string(i);
  }
  return out;
}

void BM_Diff(benchmark::State& state) {
  auto vps = family(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(diff(vps[0], vps[1], default_schema()));
  state.counters["assignments"] = static_cast<double>(vps[0].snapshot.assignments.size());
}
BENCHMARK(BM_Diff)->Arg(0)->Arg(10)->Arg(40);

void BM_ViewpointToXml(benchmark::State& state) {
  auto vp = family(1, 10)[0];
  for (auto _ : state) benchmark::DoNotOptimize(viewpoint_to_xml(vp, default_schema()));
}
BENCHMARK(BM_ViewpointToXml);

void BM_ViewpointFromXml(benchmark::State& state) {
  auto xml = viewpoint_to_xml(family(1, 10)[0], default_schema());
  for (auto _ : state) benchmark::DoNotOptimize(viewpoint_from_xml(xml, default_schema(), default_area_list()));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * xml.size()));
}
BENCHMARK(BM_ViewpointFromXml);

void BM_DistanceMatrix(benchmark::State& state) {
  auto vps = family(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix(vps, default_schema()));
}
BENCHMARK(BM_DistanceMatrix)->Arg(10)->Arg(50);

void BM_MdsProject(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  tvtest::Rng rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<std::array<double, 3>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  std::vector<std::string> labels;
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = std::sqrt((pts[i][0] - pts[j][0]) * (pts[i][0] - pts[j][0]) +
                           (pts[i][1] - pts[j][1]) * (pts[i][1] - pts[j][1]) +
                           (pts[i][2] - pts[j][2]) * (pts[i][2] - pts[j][2]));
      values[i * n + j] = values[j * n + i] = d;
    }
  }
  DistanceMatrix m(labels, values);
  for (auto _ : state) {
    auto layout = mds_project(m);
    benchmark::DoNotOptimize(quality(m, layout));
  }
}
BENCHMARK(BM_MdsProject)->Arg(12)->Arg(50)->Arg(100);

}  // namespace
BENCHMARK_MAIN();
