// SPDX-License-Identifier: Apache-2.0
//
// pilotsim - pilot precoding and combining simulator for multiuser MIMO
// Copyright (C) 2026 The pilotsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pilotsim/estimation.hpp"
#include "pilotsim/linalg.hpp"
#include "pilotsim/rate.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace pilotsim;

std::vector<ChannelStats> users(Eigen::Index m, Eigen::Index n, Eigen::Index l, Eigen::Index k)
{
    RandomStream rng(7);
    const auto bs = ArrayConfig::uniform_linear(m);
    const auto ue = ArrayConfig::uniform_linear(n);
    std::vector<ChannelStats> out;
    for (Eigen::Index i = 0; i < k; ++i)
        out.push_back(stats_from_paths(bs, ue, sample_paths(rng, l, kDefaultAoaRange, kDefaultAodRange, 1.0)));
    return out;
}

void BM_KhatriRao(benchmark::State& state)
{
    RandomStream rng(1);
    const auto n = state.range(0);
    const ComplexMatrix a = rng.complex_normal_matrix(n, 8);
    const ComplexMatrix b = rng.complex_normal_matrix(n, 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(khatri_rao(a, b));
}
BENCHMARK(BM_KhatriRao)->Arg(32)->Arg(128);

void BM_HermitianEvd(benchmark::State& state)
{
    RandomStream rng(2);
    const auto n = state.range(0);
    const ComplexMatrix x = rng.complex_normal_matrix(n, n);
    const ComplexMatrix a = x * x.adjoint();
    for (auto _ : state)
        benchmark::DoNotOptimize(hermitian_evd(a));
}
BENCHMARK(BM_HermitianEvd)->Arg(32)->Arg(128);

void BM_EstimatorSetup(benchmark::State& state)
{
    const auto sc = static_cast<Scenario>(state.range(0));
    const auto stats = users(128, 32, 4, 2);
    const auto t = sc == Scenario::PrecodedCombined ? 1 : default_pilot_length(sc, 2, 32, 4);
    const PilotScheme scheme = build_scheme(sc, t, 0.1, stats);
    for (auto _ : state)
        benchmark::DoNotOptimize(MmseEstimator(scheme, stats, 1.0, 0).error_core());
}
BENCHMARK(BM_EstimatorSetup)->DenseRange(0, 2);

void BM_PilotDraw(benchmark::State& state)
{
    const auto sc = static_cast<Scenario>(state.range(0));
    const auto stats = users(128, 32, 4, 2);
    const auto t = sc == Scenario::PrecodedCombined ? 1 : default_pilot_length(sc, 2, 32, 4);
    const PilotPhase phase(build_scheme(sc, t, 0.1, stats), stats, 1.0);
    RandomStream rng(3);
    for (auto _ : state)
        benchmark::DoNotOptimize(phase.sample(rng));
}
BENCHMARK(BM_PilotDraw)->DenseRange(0, 2);

void BM_SumRateTrial(benchmark::State& state)
{
    const auto stats = users(128, 32, 4, 2);
    const PilotScheme scheme = build_scheme(Scenario::PrecodedCombined, 1, 0.05, stats);
    DataPhaseConfig cfg;
    cfg.rho_d = 0.45;
    cfg.coherence = 128;
    cfg.pilot_length = 1;
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sum_rate_mc(scheme, stats, cfg, 1, seed++, 0));
}
BENCHMARK(BM_SumRateTrial);

} // namespace

BENCHMARK_MAIN();
