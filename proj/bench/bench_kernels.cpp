// Serial against parallel for the hot kernels.

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "fdchk/criterion.hpp"
#include "fdchk/pde.hpp"

using namespace fdchk;
using std::numbers::pi;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

GridField probe_field(const GridDomain& d) {
  return GridField::from_function(
      d, [](double x, double y) { return (1 + x) * std::sin(pi * x) * std::sin(pi * y) * std::polar(1.0, 3 * y); });
}

MatrixField linear_skew() { return MatrixField::parse(2, {{{"1", "0"}, {"0", "9*x1"}}, {{"0", "-9*x1"}, {"1", "0"}}}); }

void BM_DissipativityIntegral(benchmark::State& state) {
  const auto d = GridDomain::unit_square(static_cast<int>(state.range(0)));
  const DiscreteOperatorData op(linear_skew(), d);
  const AuxBundle aux(make_builtin("ratio4"));
  const GridField u = probe_field(d);
  for (auto _ : state) benchmark::DoNotOptimize(dissipativity_integral(op, u, aux, exec_of(state)));
}
BENCHMARK(BM_DissipativityIntegral)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_FormIntegralV(benchmark::State& state) {
  const auto d = GridDomain::unit_square(static_cast<int>(state.range(0)));
  const DiscreteOperatorData op(linear_skew(), d);
  const AuxBundle aux(make_builtin("ratio4"));
  const GridField v = sqrt_phi_times(aux, probe_field(d));
  for (auto _ : state) benchmark::DoNotOptimize(form_integral_v(op, v, aux, exec_of(state)));
}
BENCHMARK(BM_FormIntegralV)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Spmv(benchmark::State& state) {
  const auto d = GridDomain::unit_square(static_cast<int>(state.range(0)));
  const auto l = assemble_operator(linear_skew(), d);
  const GridField u = probe_field(d);
  std::vector<cplx> out(u.values.size());
  for (auto _ : state) {
    kernels::spmv(l, u.values, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Spmv)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_OrliczIntegral(benchmark::State& state) {
  const auto d = GridDomain::unit_square(static_cast<int>(state.range(0)));
  const AuxBundle aux(make_builtin("ratio_log"));
  const GridField u = probe_field(d);
  for (auto _ : state) benchmark::DoNotOptimize(orlicz_integral(aux, u, exec_of(state)));
}
BENCHMARK(BM_OrliczIntegral)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Lambda0Search(benchmark::State& state) {
  const PhiSpec phi = make_builtin("ratio_log");
  for (auto _ : state) benchmark::DoNotOptimize(lambda0_search(phi, {}, exec_of(state)).value);
}
BENCHMARK(BM_Lambda0Search)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Evolve(benchmark::State& state) {
  const auto d = GridDomain::unit_square(static_cast<int>(state.range(0)));
  const AuxBundle aux(make_builtin("ratio4"));
  const auto id = MatrixField::constant(ComplexMatrix::identity(2));
  const GridField u = probe_field(d);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(id, aux, u, 1e-3, 10, 1e-12, exec_of(state)).l2.back());
}
BENCHMARK(BM_Evolve)->ArgsProduct({{64}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
