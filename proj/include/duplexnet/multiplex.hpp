#pragma once

#include "duplexnet/netbuild.hpp"
#include "duplexnet/types.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace duplexnet {

/// Financial and social layers on a shared vertex set, plus their union.
struct DuplexSnapshot {
  LayerGraph financial;
  LayerGraph social;
  LayerGraph aggregated;

  int n() const { return financial.n; }
  const LayerGraph& layer(Layer which) const;
};

DuplexSnapshot make_duplex(LayerGraph financial, LayerGraph social);

/// Predictor values for one unordered pair at one window.
struct PairFeatures {
  int u = 0;
  int v = 0;
  bool e_fin = false;
  bool e_soc = false;
  bool e_any = false;
  double t_fin = 0.0;
  double t_soc = 0.0;
  double t_multi = 0.0;
};

/// Fraction of neighbor pairs of i that are adjacent; 0 when degree < 2.
double clustering_coefficient(const LayerGraph& g, int i);
Eigen::VectorXd clustering_coefficients(const LayerGraph& g);

/// Mean clustering coefficient over the common neighbors of u and v; 0 when
/// they share none.
double triadic_closure(const LayerGraph& g, int u, int v);

/// triadic_closure for every pair of g, lexicographic pair order.
std::vector<double> closure_scores(const LayerGraph& g);

/// Triadic closure on the union of both layers, so triangles may mix layers.
double multiplex_triadic_closure(const DuplexSnapshot& d, int u, int v);

/// One row per unordered pair, lexicographic order.
std::vector<PairFeatures> pair_features(const DuplexSnapshot& d);

void write_features_csv(std::span<const PairFeatures> rows, const std::filesystem::path& path);

/// Window-indexed sequence of snapshots together with their pair features.
struct DuplexTimeline {
  std::vector<DuplexSnapshot> snapshots;
  std::vector<std::vector<PairFeatures>> features;
  std::vector<std::string> labels;  // one per window, e.g. the window's last date

  int n() const { return snapshots.empty() ? 0 : snapshots.front().n(); }
  int size() const { return static_cast<int>(snapshots.size()); }
};

/// Computes features for every snapshot. Labels default to window indices.
DuplexTimeline make_timeline(std::vector<DuplexSnapshot> snapshots,
                             std::vector<std::string> labels = {}, unsigned threads = 1);

}  // namespace duplexnet
