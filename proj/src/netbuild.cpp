#include "duplexnet/netbuild.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace duplexnet {

std::int64_t EdgeBudget::edges_for(int n) const {
  const std::int64_t pairs = pair_count(n);
  const std::int64_t k = kind == Kind::Quartile ? pairs / 4 : count;
  if (k < 0) throw Error(Errc::Usage, "negative edge budget");
  if (k > pairs)
    throw Error(Errc::BudgetTooLarge, "budget " + std::to_string(k) + " exceeds " +
                                          std::to_string(pairs) + " pairs");
  return k;
}

EdgeBudget EdgeBudget::parse(std::string_view text) {
  if (text == "quartile") return quartile();
  if (text.starts_with("count:")) {
    std::int64_t k = 0;
    const auto digits = text.substr(6);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && p == digits.data() + digits.size() && k >= 0) return fixed(k);
  }
  throw Error(Errc::Usage, "edge budget must be 'quartile' or 'count:K', got '" +
                               std::string(text) + "'");
}

std::string EdgeBudget::to_string() const {
  return kind == Kind::Quartile ? "quartile" : "count:" + std::to_string(count);
}

bool LayerGraph::has_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges.begin(), edges.end(), Pair{u, v});
}

LayerGraph make_graph(Layer layer, Window window, int n, std::vector<Pair> edges) {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) throw Error(Errc::ShapeError, "self-loop on vertex " + std::to_string(e.first));
    if (e.first < 0 || e.second >= n)
      throw Error(Errc::ShapeError, "edge endpoint outside [0, " + std::to_string(n) + ")");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return LayerGraph{layer, window, n, std::move(edges)};
}

LayerGraph filter_graph(const WindowedMatrix& distance, const EdgeBudget& budget, Layer layer) {
  if (distance.kind != MatrixKind::Distance)
    throw Error(Errc::ShapeError, "filter_graph expects a distance matrix");
  const int n = static_cast<int>(distance.values.rows());
  const std::int64_t k = budget.edges_for(n);

  std::vector<std::tuple<double, int, int>> candidates;
  candidates.reserve(static_cast<std::size_t>(pair_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) candidates.emplace_back(distance.values(i, j), i, j);
  // Lexicographic tuple order breaks distance ties by (i, j).
  std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());

  std::vector<Pair> edges;
  edges.reserve(static_cast<std::size_t>(k));
  for (std::int64_t e = 0; e < k; ++e)
    edges.emplace_back(std::get<1>(candidates[std::size_t(e)]), std::get<2>(candidates[std::size_t(e)]));
  std::sort(edges.begin(), edges.end());
  return LayerGraph{layer, distance.window, n, std::move(edges)};
}

namespace {

std::size_t intersection_size(const LayerGraph& a, const LayerGraph& b) {
  std::size_t common = 0;
  auto i = a.edges.begin();
  auto j = b.edges.begin();
  while (i != a.edges.end() && j != b.edges.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

}  // namespace

double new_edge_fraction(const LayerGraph& now, const LayerGraph& future) {
  if (now.n != future.n) throw Error(Errc::ShapeError, "graphs on different vertex counts");
  if (future.edges.empty()) throw Error(Errc::DegenerateGraph, "future graph has no edges");
  const std::size_t kept = intersection_size(now, future);
  return static_cast<double>(future.edges.size() - kept) / static_cast<double>(future.edges.size());
}

double jaccard(const LayerGraph& a, const LayerGraph& b) {
  if (a.n != b.n) throw Error(Errc::ShapeError, "graphs on different vertex counts");
  const std::size_t common = intersection_size(a, b);
  const std::size_t uni = a.edges.size() + b.edges.size() - common;
  if (uni == 0) return 1.0;
  return static_cast<double>(common) / static_cast<double>(uni);
}

std::string edgelist_filename(const LayerGraph& g) {
  return "graph_" + std::string(to_string(g.layer)) + "_" + std::to_string(g.window.start) + "_" +
         std::to_string(g.window.end) + ".edgelist";
}

void write_edgelist(const LayerGraph& g, std::span<const std::string> tickers,
                    const std::filesystem::path& path) {
  if (static_cast<int>(tickers.size()) != g.n)
    throw Error(Errc::ShapeError, "ticker count does not match graph size");
  std::vector<std::pair<std::string, std::string>> lines;
  lines.reserve(g.edges.size());
  for (const auto& [u, v] : g.edges) {
    auto a = tickers[std::size_t(u)], b = tickers[std::size_t(v)];
    if (b < a) std::swap(a, b);
    lines.emplace_back(a, b);
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream out;
  for (const auto& [a, b] : lines) out << a << ' ' << b << '\n';
  write_file_atomic(path, out.str());
}

LayerGraph read_edgelist(const std::filesystem::path& path, std::span<const std::string> tickers,
                         Layer layer, Window window) {
  std::unordered_map<std::string, int> pos;
  for (std::size_t i = 0; i < tickers.size(); ++i) pos.emplace(tickers[i], int(i));
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<Pair> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra))
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected two tickers");
    auto ia = pos.find(a), ib = pos.find(b);
    if (ia == pos.end() || ib == pos.end())
      throw Error(Errc::MissingAsset, path.string() + ":" + std::to_string(line_no) + ": unknown ticker");
    edges.emplace_back(ia->second, ib->second);
  }
  return make_graph(layer, window, static_cast<int>(tickers.size()), std::move(edges));
}

}  // namespace duplexnet
