// Horizon sweeps over the bundled two-region problem: operator assembly,
// the fixed-point iteration, the splitting baseline, one staged projection,
// and the exhaustive oracle at small horizons.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "polysplit/admm.hpp"
#include "polysplit/json_io.hpp"
#include "polysplit/mpc.hpp"
#include "polysplit/operator.hpp"
#include "polysplit/oracle.hpp"
#include "polysplit/problem.hpp"
#include "polysplit/solver.hpp"

namespace {

using namespace polysplit;

struct Instance {
  ConsensusProblem prob;
  FixedStages fs;
  OperatorData op;
  VectorXd s;  // fixed pseudo-random projection query
};

const Instance& instance(int N) {
  static std::map<int, Instance> cache;
  auto it = cache.find(N);
  if (it == cache.end()) {
    static const PwaSystem sys = load_pwa_json(EX51_JSON_PATH);
    Instance in;
    in.prob = build_consensus(sys, N);
    in.fs = instantiate_stages(in.prob, VectorXd::Ones(in.prob.p));
    in.op = build_operator(in.prob, 10.0);
    std::mt19937_64 gen(42);
    in.s = VectorXd(in.prob.n);
    for (Eigen::Index j = 0; j < in.prob.n; ++j)
      in.s(j) = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
    it = cache.emplace(N, std::move(in)).first;
  }
  return it->second;
}

void BM_OperatorBuild(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_operator(in.prob, 10.0));
}
BENCHMARK(BM_OperatorBuild)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FixedPointSolve(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  SolverConfig cfg;
  cfg.gamma = 0.5;
  cfg.eps_tol = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(solve(in.prob, in.fs, in.op, cfg));
}
BENCHMARK(BM_FixedPointSolve)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_AdmmSolve(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  AdmmConfig cfg;
  cfg.rho = 10.0;
  cfg.eps_tol = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(solve_admm(in.prob, in.fs, cfg));
}
BENCHMARK(BM_AdmmSolve)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ProjectZ(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(project_Z(in.prob, in.fs, in.s));
}
BENCHMARK(BM_ProjectZ)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_OracleSolve(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(global_solve(in.prob, in.fs));
}
BENCHMARK(BM_OracleSolve)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
