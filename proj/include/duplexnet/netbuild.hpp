#pragma once

#include "duplexnet/correlate.hpp"
#include "duplexnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace duplexnet {

/// Number of shortest edges kept by the asset-graph filter. `Quartile`
/// keeps floor(P/4) of the P = n(n-1)/2 pairs; `Count` keeps a fixed number.
struct EdgeBudget {
  enum class Kind { Quartile, Count };
  Kind kind = Kind::Quartile;
  std::int64_t count = 0;

  std::int64_t edges_for(int n) const;

  static EdgeBudget quartile() { return {}; }
  static EdgeBudget fixed(std::int64_t k) { return {Kind::Count, k}; }
  /// "quartile" or "count:K".
  static EdgeBudget parse(std::string_view text);
  std::string to_string() const;
};

struct LayerGraph {
  Layer layer = Layer::Financial;
  Window window;
  int n = 0;
  std::vector<Pair> edges;  // sorted, unique, first < second

  bool has_edge(int u, int v) const;
  std::size_t size() const { return edges.size(); }
};

/// Normalizes (orders each pair, sorts, dedups) and validates an edge list.
LayerGraph make_graph(Layer layer, Window window, int n, std::vector<Pair> edges);

/// Keeps the K shortest upper-triangular distances; ties at the cutoff go to
/// the lexicographically smaller pair.
LayerGraph filter_graph(const WindowedMatrix& distance, const EdgeBudget& budget,
                        Layer layer = Layer::Financial);

double new_edge_fraction(const LayerGraph& now, const LayerGraph& future);

/// |A ∩ B| / |A ∪ B|, and 1 for two empty graphs.
double jaccard(const LayerGraph& a, const LayerGraph& b);

void write_edgelist(const LayerGraph& g, std::span<const std::string> tickers,
                    const std::filesystem::path& path);
LayerGraph read_edgelist(const std::filesystem::path& path, std::span<const std::string> tickers,
                         Layer layer, Window window);

std::string edgelist_filename(const LayerGraph& g);

}  // namespace duplexnet
