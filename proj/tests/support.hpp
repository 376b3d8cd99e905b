#pragma once

#include "duplexnet/multiplex.hpp"
#include "duplexnet/netbuild.hpp"
#include "duplexnet/synth.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace duplexnet::testing {

// O(n^2) sign-pair Kendall; nullopt when either side is all ties.
inline std::optional<double> kendall_brute(const std::vector<double>& x, const std::vector<double>& y,
                                           bool tau_b = true) {
  const std::size_t n = x.size();
  double s = 0, n0 = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[j] - x[i], dy = y[j] - y[i];
      n0 += 1;
      if (dx == 0) tx += 1;
      if (dy == 0) ty += 1;
      s += (dx > 0 ? 1 : dx < 0 ? -1 : 0) * (dy > 0 ? 1 : dy < 0 ? -1 : 0);
    }
  if (tx == n0 || ty == n0) return std::nullopt;
  if (!tau_b) return s / n0;
  return s / std::sqrt((n0 - tx) * (n0 - ty));
}

inline std::vector<std::vector<bool>> adjacency(const LayerGraph& g) {
  std::vector<std::vector<bool>> a(std::size_t(g.n), std::vector<bool>(std::size_t(g.n), false));
  for (auto [u, v] : g.edges) a[std::size_t(u)][std::size_t(v)] = a[std::size_t(v)][std::size_t(u)] = true;
  return a;
}

// Clustering coefficient by enumerating every vertex triple.
inline double clustering_brute(const LayerGraph& g, int i) {
  const auto a = adjacency(g);
  int k = 0;
  for (int j = 0; j < g.n; ++j) k += a[std::size_t(i)][std::size_t(j)];
  if (k < 2) return 0.0;
  int triangles = 0;
  for (int j = 0; j < g.n; ++j)
    for (int l = j + 1; l < g.n; ++l)
      if (a[std::size_t(i)][std::size_t(j)] && a[std::size_t(i)][std::size_t(l)] && a[std::size_t(j)][std::size_t(l)])
        ++triangles;
  return 2.0 * triangles / (double(k) * (k - 1));
}

inline double closure_brute(const LayerGraph& g, int u, int v) {
  const auto a = adjacency(g);
  double sum = 0.0;
  int count = 0;
  for (int w = 0; w < g.n; ++w)
    if (a[std::size_t(u)][std::size_t(w)] && a[std::size_t(v)][std::size_t(w)]) {
      sum += clustering_brute(g, w);
      ++count;
    }
  return count == 0 ? 0.0 : sum / count;
}

// Brute positive-negative comparison with half credit for ties.
inline double auc_brute(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double wins = 0, total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      total += 1;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / total;
}

inline LayerGraph random_graph(std::mt19937_64& rng, int n, double density, Layer layer = Layer::Financial) {
  std::bernoulli_distribution coin(density);
  std::vector<Pair> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return make_graph(layer, {0, 1}, n, std::move(edges));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("duplexnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace duplexnet::testing
