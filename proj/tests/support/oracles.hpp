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

// Brute-force reference implementations and random generators shared by the
// unit and acceptance suites. Nothing here calls into the code under test
// except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ragbench/backends.hpp"
#include "ragbench/retrievers.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double cosine(const Vec& a, const Vec& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return d / std::sqrt(na * nb);
}

inline Vec as_vec(const ragbench::backends::EmbeddingVector& v) {
  return Vec(v.values.begin(), v.values.end());
}

inline ragbench::backends::EmbeddingVector as_embedding(const Vec& v) {
  ragbench::backends::EmbeddingVector e;
  e.values.assign(v.begin(), v.end());
  return e;
}

// Full sort by cosine descending, key ascending.
inline std::vector<std::pair<std::string, double>> brute_top_k(
    const std::vector<std::pair<std::string, Vec>>& items, const Vec& q, std::size_t k,
    double min_score = -std::numeric_limits<double>::infinity()) {
  std::vector<std::pair<std::string, double>> all;
  for (const auto& [key, v] : items) {
    const double s = cosine(q, v);
    if (s >= min_score) all.emplace_back(key, s);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Dense column-stochastic power iteration. Columns of isolated nodes are
// replaced by the personalization vector.
inline Vec dense_pagerank(const std::vector<std::vector<std::size_t>>& adj, Vec p, double alpha,
                          int max_iterations, double tol) {
  const std::size_t n = adj.size();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  std::vector<Vec> m(n, Vec(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    if (adj[j].empty()) {
      for (std::size_t i = 0; i < n; ++i) m[i][j] = p[i];
    } else {
      for (std::size_t i : adj[j]) m[i][j] = 1.0 / static_cast<double>(adj[j].size());
    }
  }
  Vec pi = p;
  for (int it = 0; it < max_iterations; ++it) {
    Vec next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += m[i][j] * pi[j];
      next[i] = alpha * s + (1.0 - alpha) * p[i];
    }
    double diff = 0;
    for (std::size_t i = 0; i < n; ++i) diff += std::abs(next[i] - pi[i]);
    pi = std::move(next);
    if (diff < tol) break;
  }
  return pi;
}

// Solves (I - alpha M) pi = (1 - alpha) p by Gaussian elimination.
inline Vec solve_pagerank(const std::vector<std::vector<std::size_t>>& adj, Vec p, double alpha) {
  const std::size_t n = adj.size();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  std::vector<Vec> a(n, Vec(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0;
    a[i][n] = (1.0 - alpha) * p[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (adj[j].empty()) {
      for (std::size_t i = 0; i < n; ++i) a[i][j] -= alpha * p[i];
    } else {
      for (std::size_t i : adj[j]) a[i][j] -= alpha / static_cast<double>(adj[j].size());
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

// Random simple undirected graph as sorted adjacency lists.
inline std::vector<std::vector<std::size_t>> random_graph(std::mt19937_64& rng, std::size_t n,
                                                          double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

struct Structural {
  double density = 0, avg_degree = 0, clustering = 0, lcc_ratio = 0, max_degree_centrality = 0;
  std::size_t components = 0;
};

// Adjacency-matrix evaluation of the structural formulas; components by
// repeated label propagation.
inline Structural brute_structural(const std::vector<std::vector<std::size_t>>& adj,
                                   std::size_t edge_count) {
  const std::size_t n = adj.size();
  std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : adj[i]) a[i][j] = 1;
  }
  Structural s;
  const double nn = static_cast<double>(n);
  s.density = n < 2 ? 0 : 2.0 * static_cast<double>(edge_count) / (nn * (nn - 1));
  s.avg_degree = 2.0 * static_cast<double>(edge_count) / nn;
  std::size_t maxdeg = 0;
  double csum = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t deg = 0;
    for (std::size_t u = 0; u < n; ++u) deg += static_cast<std::size_t>(a[v][u]);
    maxdeg = std::max(maxdeg, deg);
    if (deg < 2) continue;
    std::size_t closed = 0;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        if (a[v][x] && a[v][y] && a[x][y]) ++closed;
      }
    }
    csum += static_cast<double>(closed) / (static_cast<double>(deg * (deg - 1)) / 2.0);
  }
  s.clustering = csum / nn;
  s.max_degree_centrality = n < 2 ? 0 : static_cast<double>(maxdeg) / (nn - 1);
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (a[i][j] && label[j] < label[i]) {
          label[i] = label[j];
          changed = true;
        }
      }
    }
  }
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t l : label) ++sizes[l];
  s.components = sizes.size();
  std::size_t largest = 0;
  for (const auto& [l, c] : sizes) largest = std::max(largest, c);
  s.lcc_ratio = static_cast<double>(largest) / nn;
  return s;
}

// Reciprocal rank fusion by explicit score table and full sort.
struct Fused {
  std::string id;
  double score;
};
inline std::vector<Fused> brute_rrf(const std::vector<std::vector<std::pair<std::string, std::size_t>>>& lists,
                                    double k) {
  std::map<std::string, std::vector<std::size_t>> ranks;
  for (std::size_t l = 0; l < lists.size(); ++l) {
    for (const auto& [id, r] : lists[l]) {
      auto& v = ranks[id];
      v.resize(lists.size(), 0);
      if (v[l] == 0 || r < v[l]) v[l] = r;
    }
  }
  struct Row {
    std::string id;
    double score;
    std::size_t first;
  };
  std::vector<Row> rows;
  for (const auto& [id, v] : ranks) {
    double s = 0;
    for (std::size_t r : v) {
      if (r) s += 1.0 / (k + static_cast<double>(r));
    }
    rows.push_back({id, s, v[0] ? v[0] : std::numeric_limits<std::size_t>::max()});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(b.score, a.first, a.id) < std::tie(a.score, b.first, b.id);
  });
  std::vector<Fused> out;
  for (const auto& r : rows) out.push_back({r.id, r.score});
  return out;
}

// Random ranked list over doc ids "d<i>": a random subset in random order.
inline std::vector<std::pair<std::string, std::size_t>> random_ranking(std::mt19937_64& rng,
                                                                       std::size_t universe) {
  std::vector<std::size_t> ids(universe);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::size_t m = std::uniform_int_distribution<std::size_t>(0, universe)(rng);
  std::vector<std::pair<std::string, std::size_t>> out;
  for (std::size_t i = 0; i < m; ++i) out.emplace_back("d" + std::to_string(ids[i]), i + 1);
  return out;
}

inline std::vector<ragbench::retrievers::ScoredChunk> as_scored(
    const std::vector<std::pair<std::string, std::size_t>>& ranking) {
  std::vector<ragbench::retrievers::ScoredChunk> out;
  for (const auto& [id, r] : ranking) out.push_back({id, 0.0, r, ragbench::retrievers::Source::naive});
  return out;
}

// TwoNN from the full Euclidean distance matrix.
inline double brute_twonn(const std::vector<Vec>& pts) {
  const std::size_t n = pts.size();
  double sum = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0;
      for (std::size_t c = 0; c < pts[i].size(); ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      d.push_back(std::sqrt(s));
    }
    std::sort(d.begin(), d.end());
    if (d[0] <= 0) continue;
    sum += std::log(d[1] / d[0]);
    ++used;
  }
  return static_cast<double>(used) / sum;
}

// N_k by full sort of every neighbor list; ties to the lower index.
inline std::vector<std::size_t> brute_k_occurrence(const std::vector<Vec>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> nb;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) nb.emplace_back(cosine(pts[i], pts[j]), j);
    }
    std::sort(nb.begin(), nb.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t r = 0; r < k; ++r) ++counts[nb[r].second];
  }
  return counts;
}

inline double brute_skewness(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0, m3 = 0;
  for (double v : x) {
    m2 += (v - mean) * (v - mean);
    m3 += (v - mean) * (v - mean) * (v - mean);
  }
  m2 /= n;
  m3 /= n;
  if (m2 == 0) return 0;
  return m3 / (m2 * std::sqrt(m2));
}

// Greedy skip-and-continue admission.
inline std::vector<std::size_t> brute_budget(const std::vector<std::size_t>& sizes,
                                             std::size_t budget) {
  std::vector<std::size_t> keep;
  std::size_t used = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (used + sizes[i] <= budget) {
      used += sizes[i];
      keep.push_back(i);
    }
  }
  return keep;
}

// Word lists made of a small vocabulary so overlaps are common.
inline std::string random_words(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words,
                                std::size_t vocab = 12) {
  std::uniform_int_distribution<std::size_t> len(min_words, max_words);
  std::uniform_int_distribution<std::size_t> w(0, vocab - 1);
  std::string out;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += "w" + std::to_string(w(rng));
  }
  return out;
}

// Sentences "<words>." joined by spaces.
inline std::vector<std::string> random_sentences(std::mt19937_64& rng, std::size_t min_s,
                                                 std::size_t max_s, std::size_t vocab = 6) {
  std::uniform_int_distribution<std::size_t> count(min_s, max_s);
  std::vector<std::string> out;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_words(rng, 1, 3, vocab) + ".");
  return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Lexical semantic-F1 under one-hot token embeddings: a token matches iff it
// occurs in the other text.
struct Prf {
  double p, r, f;
};
inline Prf lexical_f1(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
  const std::set<std::string> ps(pred.begin(), pred.end()), rs(ref.begin(), ref.end());
  double hp = 0, hr = 0;
  for (const auto& t : pred) hp += rs.count(t) ? 1 : 0;
  for (const auto& t : ref) hr += ps.count(t) ? 1 : 0;
  Prf out{hp / static_cast<double>(pred.size()), hr / static_cast<double>(ref.size()), 0};
  out.f = out.p + out.r == 0 ? 0 : 2 * out.p * out.r / (out.p + out.r);
  return out;
}

// Share of `from` sentences that also occur in `to` (exact text match).
inline double lexical_match_share(const std::vector<std::string>& from,
                                  const std::vector<std::string>& to) {
  const std::set<std::string> ts(to.begin(), to.end());
  double hits = 0;
  for (const auto& s : from) hits += ts.count(s) ? 1 : 0;
  return hits / static_cast<double>(from.size());
}

}  // namespace oracle
