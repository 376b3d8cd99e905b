#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string_view>
#include <utility>

namespace duplexnet {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Half-open index range [start, end) into a PanelSeries calendar.
struct Window {
  int start = 0;
  int end = 0;

  int width() const { return end - start; }
  friend bool operator==(const Window&, const Window&) = default;
};

enum class Layer { Financial, Social, Aggregated };

std::string_view to_string(Layer layer);
Layer parse_layer(std::string_view text);

// The layer that is not `layer`; Aggregated maps to itself.
inline Layer other_layer(Layer layer) {
  switch (layer) {
    case Layer::Financial: return Layer::Social;
    case Layer::Social: return Layer::Financial;
    default: return layer;
  }
}

// Unordered vertex pair stored with first < second.
using Pair = std::pair<int, int>;

inline std::int64_t pair_count(std::int64_t n) { return n * (n - 1) / 2; }

// Position of (u, v), u < v, in the lexicographic enumeration of all pairs.
inline std::int64_t pair_index(std::int64_t u, std::int64_t v, std::int64_t n) {
  return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

}  // namespace duplexnet
