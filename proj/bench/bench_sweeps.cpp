// Serial reference against the OpenMP path for the sample sweeps.
#include <benchmark/benchmark.h>

#include "poisson4d/casimir.hpp"
#include "poisson4d/darboux.hpp"
#include "poisson4d/gallery.hpp"
#include "poisson4d/halton.hpp"

using namespace p4d;

namespace {

const FamilyStructure& mixed() {
  static const FamilyStructure f = gallery_entry("case1-mixed").build();
  return f;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& s) {
  s.SetLabel(s.range(1) == 0 ? "serial" : "parallel x" + std::to_string(max_threads()));
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_Jacobi(benchmark::State& s) {
  auto pts = halton_points(mixed().domain, static_cast<std::size_t>(s.range(0)));
  MatrixField m = family_field(mixed());
  for (auto _ : s) benchmark::DoNotOptimize(max_jacobi_residual(m, pts, exec_of(s)));
  label(s);
}

void BM_Hypotheses(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(check_hypotheses(mixed(), static_cast<int>(s.range(0)), 0, exec_of(s)));
  label(s);
}

void BM_Casimir(benchmark::State& s) {
  CasimirPair p = casimirs_for(mixed());
  for (auto _ : s) benchmark::DoNotOptimize(verify_casimir(mixed(), p, static_cast<int>(s.range(0)), 0, exec_of(s)));
  label(s);
}

void BM_Pipeline(benchmark::State& s) {
  DarbouxPipeline p = build_pipeline(mixed());
  for (auto _ : s) benchmark::DoNotOptimize(verify_pipeline(p, static_cast<int>(s.range(0)), 0, exec_of(s)));
  label(s);
}

void sizes(benchmark::internal::Benchmark* b, long max_n) {
  for (long n = 1000; n <= max_n; n *= 10)
    for (long e : {0L, 1L}) b->Args({n, e});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Jacobi)->Apply([](auto* b) { sizes(b, 100000); });
BENCHMARK(BM_Hypotheses)->Apply([](auto* b) { sizes(b, 100000); });
BENCHMARK(BM_Casimir)->Apply([](auto* b) { sizes(b, 10000); });
BENCHMARK(BM_Pipeline)->Apply([](auto* b) { sizes(b, 10000); });

BENCHMARK_MAIN();
