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

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/kgraph.hpp"

namespace ragbench::fingerprint {

using backends::EmbeddingVector;

class EmptyGraph : public DataError {
 public:
  EmptyGraph() : DataError("fingerprint of an empty graph") {}
};

class DegenerateCloud : public DataError {
 public:
  DegenerateCloud() : DataError("point cloud has no spread") {}
};

class ZeroCentroid : public DataError {
 public:
  ZeroCentroid() : DataError("embedding centroid is (numerically) zero") {}
};

struct StructuralFingerprint {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0.0;
  std::size_t relation_type_count = 0;
  double avg_degree = 0.0;
  double max_degree_centrality = 0.0;
  std::size_t component_count = 0;
  double lcc_ratio = 0.0;
  double clustering_coefficient = 0.0;
};

double average_degree(std::size_t nodes, std::size_t edges);
// 2|E| / (|V| (|V| - 1)); 0 for fewer than two nodes.
double density(std::size_t nodes, std::size_t edges);

// `adjacency` is a simple undirected neighborhood list (sorted, no self).
// `edge_count` counts multi-edges, which only enter |E|, density and the
// average degree.
StructuralFingerprint structural_from_adjacency(
    const std::vector<std::vector<std::size_t>>& adjacency, std::size_t edge_count,
    std::size_t relation_type_count);

// Throws EmptyGraph.
StructuralFingerprint structural_fingerprint(const kgraph::KnowledgeGraph& graph);

// TwoNN estimate 1 / mean(ln(r2 / r1)) with Euclidean distances; points with
// r1 = 0 are skipped. Requires at least 10 distinct points.
double intrinsic_dimension_twonn(const std::vector<EmbeddingVector>& vectors);

struct Dispersion {
  double avg = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Population statistics of 1 - cos(x_i, centroid).
Dispersion dispersion_stats(const std::vector<EmbeddingVector>& vectors);

// N_k(i): how often point i appears among the k cosine nearest neighbors of
// the other points. Ties go to the lower index.
std::vector<std::size_t> k_occurrence(const std::vector<EmbeddingVector>& vectors, std::size_t k);

// Population skewness; 0 when the standard deviation is 0.
double skewness(const std::vector<double>& values);

double hubness_skewness(const std::vector<EmbeddingVector>& vectors, std::size_t k = 10);

struct SemanticFingerprint {
  std::size_t chunk_count = 0;
  std::optional<double> intrinsic_dimension;  // unset below 10 distinct points
  std::optional<double> hubness;              // unset when k >= point count
  std::optional<Dispersion> dispersion;
};

SemanticFingerprint semantic_fingerprint(const std::vector<EmbeddingVector>& vectors,
                                         std::size_t hubness_k = 10);

nlohmann::json to_json(const StructuralFingerprint& f);
nlohmann::json to_json(const SemanticFingerprint& f);

}  // namespace ragbench::fingerprint
