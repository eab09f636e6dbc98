// Copyright 2026 The ragbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Micro-benchmarks for the hot loops: exact search, PPR, fusion and TwoNN.

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "ragbench/fingerprint.hpp"
#include "ragbench/paradigms.hpp"
#include "ragbench/retrievers.hpp"
#include "ragbench/vindex.hpp"

using namespace ragbench;

namespace {

backends::EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> g;
  backends::EmbeddingVector v;
  v.values.resize(dim);
  for (float& x : v.values) x = g(rng);
  v.normalize();
  return v;
}

void BM_TopK(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::pair<std::string, backends::EmbeddingVector>> items;
  for (std::size_t i = 0; i < n; ++i) items.emplace_back("c" + std::to_string(i), random_unit(rng, 384));
  const auto index = vindex::VectorIndex::build(items);
  const auto q = random_unit(rng, 384);
  for (auto _ : state) benchmark::DoNotOptimize(index.top_k(q, 100));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TopK)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_PageRank(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  // Sparse graph with average degree near 2.7, like extracted entity graphs.
  std::vector<std::vector<std::size_t>> adj(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t e = 0; e < n * 27 / 20; ++e) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<double> p(n, 0.0);
  for (int s = 0; s < 20; ++s) p[pick(rng)] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(retrievers::pagerank(adj, p));
}
BENCHMARK(BM_PageRank)->Arg(1000)->Arg(20000)->Arg(200000);

void BM_RrfFuse(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<retrievers::ScoredChunk>> lists(2);
  for (auto& l : lists) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t r = 0; r < n; ++r) l.push_back({"d" + std::to_string(ids[r]), 0.0, r + 1});
  }
  for (auto _ : state) benchmark::DoNotOptimize(paradigms::rrf_fuse(lists, 60.0));
}
BENCHMARK(BM_RrfFuse)->Arg(100)->Arg(1000);

void BM_TwoNN(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<backends::EmbeddingVector> pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back(random_unit(rng, 64));
  for (auto _ : state) benchmark::DoNotOptimize(fingerprint::intrinsic_dimension_twonn(pts));
}
BENCHMARK(BM_TwoNN)->Arg(500)->Arg(2000);

}  // namespace
