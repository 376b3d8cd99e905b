#include "duplexnet/multiplex.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/io.hpp"
#include "duplexnet/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

namespace duplexnet {

const LayerGraph& DuplexSnapshot::layer(Layer which) const {
  switch (which) {
    case Layer::Financial: return financial;
    case Layer::Social: return social;
    default: return aggregated;
  }
}

DuplexSnapshot make_duplex(LayerGraph financial, LayerGraph social) {
  if (financial.n != social.n)
    throw Error(Errc::ShapeError, "duplex layers have different vertex counts");
  std::vector<Pair> both;
  both.reserve(financial.edges.size() + social.edges.size());
  std::set_union(financial.edges.begin(), financial.edges.end(), social.edges.begin(),
                 social.edges.end(), std::back_inserter(both));
  LayerGraph aggregated{Layer::Aggregated, financial.window, financial.n, std::move(both)};
  financial.layer = Layer::Financial;
  social.layer = Layer::Social;
  return DuplexSnapshot{std::move(financial), std::move(social), std::move(aggregated)};
}

namespace {

// Dense 0/1 adjacency with neighbor lists, built once per graph.
class Adjacency {
 public:
  explicit Adjacency(const LayerGraph& g)
      : n_(g.n), cells_(std::size_t(g.n) * std::size_t(g.n), 0), neighbors_(std::size_t(g.n)) {
    for (const auto& [u, v] : g.edges) {
      cells_[index(u, v)] = 1;
      cells_[index(v, u)] = 1;
      neighbors_[std::size_t(u)].push_back(v);
      neighbors_[std::size_t(v)].push_back(u);
    }
    for (auto& list : neighbors_) std::sort(list.begin(), list.end());
  }

  bool operator()(int u, int v) const { return cells_[index(u, v)] != 0; }
  const std::vector<int>& neighbors(int i) const { return neighbors_[std::size_t(i)]; }
  int n() const { return n_; }

 private:
  std::size_t index(int u, int v) const { return std::size_t(u) * std::size_t(n_) + std::size_t(v); }

  int n_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::vector<int>> neighbors_;
};

double clustering_of(const Adjacency& a, int i) {
  const auto& nb = a.neighbors(i);
  const std::int64_t k = static_cast<std::int64_t>(nb.size());
  if (k < 2) return 0.0;
  std::int64_t triangles = 0;
  for (std::size_t x = 0; x < nb.size(); ++x)
    for (std::size_t y = x + 1; y < nb.size(); ++y) triangles += a(nb[x], nb[y]);
  return static_cast<double>(2 * triangles) / static_cast<double>(k * (k - 1));
}

Eigen::VectorXd clustering_all(const Adjacency& a) {
  Eigen::VectorXd c(a.n());
  for (int i = 0; i < a.n(); ++i) c(i) = clustering_of(a, i);
  return c;
}

// Mean of c over common neighbors, accumulated in increasing vertex order.
double closure_of(const Adjacency& a, const Eigen::VectorXd& c, int u, int v) {
  const auto& nu = a.neighbors(u);
  const auto& nv = a.neighbors(v);
  double sum = 0.0;
  int common = 0;
  auto i = nu.begin();
  auto j = nv.begin();
  while (i != nu.end() && j != nv.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      sum += c(*i);
      ++common;
      ++i;
      ++j;
    }
  }
  return common == 0 ? 0.0 : sum / common;
}

void check_vertex(const LayerGraph& g, int i) {
  if (i < 0 || i >= g.n) throw Error(Errc::ShapeError, "vertex " + std::to_string(i) + " out of range");
}

}  // namespace

double clustering_coefficient(const LayerGraph& g, int i) {
  check_vertex(g, i);
  return clustering_of(Adjacency(g), i);
}

Eigen::VectorXd clustering_coefficients(const LayerGraph& g) { return clustering_all(Adjacency(g)); }

double triadic_closure(const LayerGraph& g, int u, int v) {
  check_vertex(g, u);
  check_vertex(g, v);
  if (u == v) throw Error(Errc::ShapeError, "triadic closure needs two distinct vertices");
  const Adjacency a(g);
  return closure_of(a, clustering_all(a), u, v);
}

std::vector<double> closure_scores(const LayerGraph& g) {
  const Adjacency a(g);
  const Eigen::VectorXd c = clustering_all(a);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(pair_count(g.n)));
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v) out.push_back(closure_of(a, c, u, v));
  return out;
}

double multiplex_triadic_closure(const DuplexSnapshot& d, int u, int v) {
  return triadic_closure(d.aggregated, u, v);
}

std::vector<PairFeatures> pair_features(const DuplexSnapshot& d) {
  const int n = d.n();
  const Adjacency fin(d.financial), soc(d.social), any(d.aggregated);
  const Eigen::VectorXd c_fin = clustering_all(fin);
  const Eigen::VectorXd c_soc = clustering_all(soc);
  const Eigen::VectorXd c_any = clustering_all(any);

  std::vector<PairFeatures> rows;
  rows.reserve(static_cast<std::size_t>(pair_count(n)));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      PairFeatures f;
      f.u = u;
      f.v = v;
      f.e_fin = fin(u, v);
      f.e_soc = soc(u, v);
      f.e_any = any(u, v);
      f.t_fin = closure_of(fin, c_fin, u, v);
      f.t_soc = closure_of(soc, c_soc, u, v);
      f.t_multi = closure_of(any, c_any, u, v);
      rows.push_back(f);
    }
  }
  return rows;
}

void write_features_csv(std::span<const PairFeatures> rows, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "u,v,e_fin,e_soc,e_any,t_fin,t_soc,t_multi\n";
  for (const auto& f : rows)
    out << f.u << ',' << f.v << ',' << int(f.e_fin) << ',' << int(f.e_soc) << ',' << int(f.e_any)
        << ',' << format_double(f.t_fin) << ',' << format_double(f.t_soc) << ','
        << format_double(f.t_multi) << '\n';
  write_file_atomic(path, out.str());
}

DuplexTimeline make_timeline(std::vector<DuplexSnapshot> snapshots, std::vector<std::string> labels,
                             unsigned threads) {
  DuplexTimeline tl;
  tl.snapshots = std::move(snapshots);
  for (const auto& s : tl.snapshots)
    if (s.n() != tl.snapshots.front().n())
      throw Error(Errc::ShapeError, "snapshots on different vertex counts");
  if (labels.empty()) {
    for (std::size_t t = 0; t < tl.snapshots.size(); ++t) labels.push_back(std::to_string(t));
  } else if (labels.size() != tl.snapshots.size()) {
    throw Error(Errc::ShapeError, "one label per snapshot required");
  }
  tl.labels = std::move(labels);
  tl.features.resize(tl.snapshots.size());
  parallel_for(tl.snapshots.size(), threads,
               [&](std::size_t t) { tl.features[t] = pair_features(tl.snapshots[t]); });
  return tl;
}

}  // namespace duplexnet
