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

#include "ragbench/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ragbench::fingerprint {
namespace {

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.values.size(); ++d) {
    const double diff = static_cast<double>(a.values[d]) - b.values[d];
    s += diff * diff;
  }
  return s;
}

void check_dimensions(const std::vector<EmbeddingVector>& v) {
  for (const auto& x : v) {
    if (x.dimension() != v.front().dimension()) {
      throw backends::DimensionMismatch(v.front().dimension(), x.dimension());
    }
  }
}

std::size_t distinct_points(const std::vector<EmbeddingVector>& v) {
  std::vector<const std::vector<float>*> rows;
  rows.reserve(v.size());
  for (const auto& x : v) rows.push_back(&x.values);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return *a < *b; });
  return static_cast<std::size_t>(
      std::unique(rows.begin(), rows.end(), [](auto* a, auto* b) { return *a == *b; }) -
      rows.begin());
}

}  // namespace

double average_degree(std::size_t nodes, std::size_t edges) {
  return nodes == 0 ? 0.0 : 2.0 * static_cast<double>(edges) / static_cast<double>(nodes);
}

double density(std::size_t nodes, std::size_t edges) {
  if (nodes < 2) return 0.0;
  const double n = static_cast<double>(nodes);
  return 2.0 * static_cast<double>(edges) / (n * (n - 1.0));
}

StructuralFingerprint structural_from_adjacency(
    const std::vector<std::vector<std::size_t>>& adj, std::size_t edge_count,
    std::size_t relation_type_count) {
  const std::size_t n = adj.size();
  if (n == 0) throw EmptyGraph();
  StructuralFingerprint f;
  f.node_count = n;
  f.edge_count = edge_count;
  f.relation_type_count = relation_type_count;
  f.density = density(n, edge_count);
  f.avg_degree = average_degree(n, edge_count);

  std::size_t max_deg = 0;
  double clustering_sum = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nb = adj[v];
    max_deg = std::max(max_deg, nb.size());
    if (nb.size() < 2) continue;
    std::size_t links = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const auto& ni = adj[nb[i]];
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (std::binary_search(ni.begin(), ni.end(), nb[j])) ++links;
      }
    }
    const double k = static_cast<double>(nb.size());
    clustering_sum += 2.0 * static_cast<double>(links) / (k * (k - 1.0));
  }
  f.clustering_coefficient = clustering_sum / static_cast<double>(n);
  f.max_degree_centrality =
      n < 2 ? 0.0 : static_cast<double>(max_deg) / static_cast<double>(n - 1);

  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  std::size_t largest = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++f.component_count;
    std::size_t size = 0;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      ++size;
      for (std::size_t u : adj[v]) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    largest = std::max(largest, size);
  }
  f.lcc_ratio = static_cast<double>(largest) / static_cast<double>(n);
  return f;
}

StructuralFingerprint structural_fingerprint(const kgraph::KnowledgeGraph& graph) {
  if (graph.empty()) throw EmptyGraph();
  std::vector<std::vector<std::size_t>> adj(graph.node_count());
  for (std::size_t v = 0; v < graph.node_count(); ++v) adj[v] = graph.neighbors(v);
  std::set<std::string> relations;
  for (const auto& e : graph.edges()) relations.insert(e.relation);
  return structural_from_adjacency(adj, graph.edge_count(), relations.size());
}

double intrinsic_dimension_twonn(const std::vector<EmbeddingVector>& v) {
  if (v.empty()) throw std::invalid_argument("TwoNN: empty point cloud");
  check_dimensions(v);
  const std::size_t distinct = distinct_points(v);
  if (distinct <= 1) throw DegenerateCloud();
  if (distinct < 10) throw std::invalid_argument("TwoNN: needs at least 10 distinct points");

  const std::size_t n = v.size();
  double log_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r1 = std::numeric_limits<double>::infinity();
    double r2 = r1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = squared_distance(v[i], v[j]);
      if (d < r1) {
        r2 = r1;
        r1 = d;
      } else if (d < r2) {
        r2 = d;
      }
    }
    if (r1 <= 0.0) continue;
    // Squared distances: ln(r2/r1) = 0.5 * ln(r2^2 / r1^2).
    log_sum += 0.5 * std::log(r2 / r1);
    ++used;
  }
  if (used == 0 || log_sum <= 0.0) throw DegenerateCloud();
  return static_cast<double>(used) / log_sum;
}

Dispersion dispersion_stats(const std::vector<EmbeddingVector>& v) {
  if (v.size() < 2) throw std::invalid_argument("dispersion needs at least two vectors");
  check_dimensions(v);
  const std::size_t dim = v.front().dimension();
  std::vector<double> centroid(dim, 0.0);
  for (const auto& x : v) {
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += x.values[d];
  }
  double cn = 0.0;
  for (double& c : centroid) {
    c /= static_cast<double>(v.size());
    cn += c * c;
  }
  cn = std::sqrt(cn);
  if (cn <= 1e-9) throw ZeroCentroid();

  std::vector<double> dist;
  dist.reserve(v.size());
  for (const auto& x : v) {
    double dotp = 0.0;
    for (std::size_t d = 0; d < dim; ++d) dotp += x.values[d] * centroid[d];
    const double xn = x.norm();
    const double cos = xn > 0.0 ? dotp / (xn * cn) : 0.0;
    dist.push_back(std::clamp(1.0 - cos, 0.0, 2.0));
  }
  Dispersion out;
  out.avg = std::accumulate(dist.begin(), dist.end(), 0.0) / static_cast<double>(dist.size());
  double var = 0.0;
  for (double d : dist) var += (d - out.avg) * (d - out.avg);
  out.std = std::sqrt(var / static_cast<double>(dist.size()));
  auto [mn, mx] = std::minmax_element(dist.begin(), dist.end());
  out.min = *mn;
  out.max = *mx;
  out.avg = std::clamp(out.avg, out.min, out.max);
  return out;
}

std::vector<std::size_t> k_occurrence(const std::vector<EmbeddingVector>& v, std::size_t k) {
  const std::size_t n = v.size();
  if (k == 0 || k >= n) throw std::invalid_argument("k-occurrence needs 1 <= k < point count");
  check_dimensions(v);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = v[i].norm();

  std::vector<std::size_t> counts(n, 0);
  std::vector<std::pair<double, std::size_t>> sims(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      if (norms[i] > 0.0 && norms[j] > 0.0) s = backends::dot(v[i], v[j]) / (norms[i] * norms[j]);
      sims[m++] = {-s, j};
    }
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end());
    for (std::size_t r = 0; r < k; ++r) ++counts[sims[r].second];
  }
  return counts;
}

double skewness(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double xi : x) {
    const double d = xi - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

double hubness_skewness(const std::vector<EmbeddingVector>& v, std::size_t k) {
  auto counts = k_occurrence(v, k);
  return skewness(std::vector<double>(counts.begin(), counts.end()));
}

SemanticFingerprint semantic_fingerprint(const std::vector<EmbeddingVector>& v,
                                         std::size_t hubness_k) {
  SemanticFingerprint f;
  f.chunk_count = v.size();
  if (v.size() >= 2 && distinct_points(v) >= 10) {
    try {
      f.intrinsic_dimension = intrinsic_dimension_twonn(v);
    } catch (const DegenerateCloud&) {
    }
  }
  if (hubness_k >= 1 && hubness_k < v.size()) f.hubness = hubness_skewness(v, hubness_k);
  if (v.size() >= 2) {
    try {
      f.dispersion = dispersion_stats(v);
    } catch (const ZeroCentroid&) {
    }
  }
  return f;
}

nlohmann::json to_json(const StructuralFingerprint& f) {
  return {{"nodes", f.node_count},
          {"edges", f.edge_count},
          {"density", f.density},
          {"relation_types", f.relation_type_count},
          {"avg_degree", f.avg_degree},
          {"max_degree_centrality", f.max_degree_centrality},
          {"components", f.component_count},
          {"lcc_ratio", f.lcc_ratio},
          {"clustering_coefficient", f.clustering_coefficient}};
}

nlohmann::json to_json(const SemanticFingerprint& f) {
  auto opt = [](const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  };
  nlohmann::json j = {{"chunks", f.chunk_count},
                      {"intrinsic_dimension", opt(f.intrinsic_dimension)},
                      {"hubness", opt(f.hubness)}};
  if (f.dispersion) {
    j["dispersion"] = {{"avg", f.dispersion->avg},
                       {"std", f.dispersion->std},
                       {"min", f.dispersion->min},
                       {"max", f.dispersion->max}};
  } else {
    j["dispersion"] = nullptr;
  }
  return j;
}

}  // namespace ragbench::fingerprint
