// Copyright 2026 The qfeedback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs OpenMP: ensemble runner and two-level level-set grid.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "qfb/bloch.hpp"
#include "qfb/ensemble.hpp"

namespace {

using namespace qfb;

EnsembleConfig make_config(Eigen::Index n, std::size_t trajectories) {
    std::vector<double> levels;
    for (Eigen::Index i = 0; i < n; ++i) levels.push_back(static_cast<double>(n - 1 - 2 * i) / 2.0);
    const auto c = HermitianMatrix::diagonal(levels);
    CMatrix hb = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) hb(i, i + 1) = hb(i + 1, i) = 1.0;
    auto model = ModelSpec::create(c, HermitianMatrix(hb), c, 1.0, 0.5);
    auto target = TargetSpec::for_level(model, n - 1);
    SimConfig sim;
    sim.dt = 1e-3;
    sim.t_final = 2.0;
    sim.seed = 1;
    sim.record_stride = 100;
    return EnsembleConfig{trajectories, model, target, ControllerSpec::create(ControlLaw::square_of_sum, 1.0, 1.0),
                          sim, DensityMatrix::maximally_mixed(n), "."};
}

void BM_ensemble_serial(benchmark::State& state) {
    const auto cfg = make_config(state.range(0), 64);
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(cfg).target_frequency);
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_ensemble_openmp(benchmark::State& state) {
    const auto cfg = make_config(state.range(0), 64);
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(cfg).target_frequency);
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_levelset_serial(benchmark::State& state) {
    const auto res = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bloch::levelset_grid_serial(1.0, 1.0, 1.0, 0.5, res).points.data());
}

void BM_levelset_openmp(benchmark::State& state) {
    const auto res = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bloch::levelset_grid(1.0, 1.0, 1.0, 0.5, res).points.data());
}

}  // namespace

BENCHMARK(BM_ensemble_serial)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ensemble_openmp)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_levelset_serial)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_levelset_openmp)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
