#include "duplexnet/evaluate.hpp"

#include "duplexnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace duplexnet {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::FullGraph: return "full";
    case Split::NewEdges: return "new_edges";
    case Split::Deletions: return "deletions";
  }
  return "unknown";
}

std::size_t ScoredPairs::positives() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ScoredPair& r) { return r.label; }));
}

double auc(const ScoredPairs& s) {
  const std::size_t pos = s.positives();
  const std::size_t neg = s.rows.size() - pos;
  if (pos == 0 || neg == 0)
    throw Error(Errc::UndefinedAUC, "AUC needs both classes (" + std::to_string(pos) + " positive, " +
                                        std::to_string(neg) + " negative)");
  std::vector<std::size_t> order(s.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.rows[a].score < s.rows[b].score; });

  // Walk groups of equal score: each positive beats every negative below its
  // group and gets half credit against negatives within it. Counts are kept
  // doubled so the numerator stays an exact integer.
  std::uint64_t doubled_wins = 0;
  std::uint64_t negatives_below = 0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    std::uint64_t p = 0, q = 0;
    while (end < order.size() && s.rows[order[end]].score == s.rows[order[k]].score) {
      (s.rows[order[end]].label ? p : q) += 1;
      ++end;
    }
    doubled_wins += p * (2 * negatives_below + q);
    negatives_below += q;
    k = end;
  }
  return static_cast<double>(doubled_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double auc_star(double auc_model, double auc_benchmark) {
  if (!(auc_benchmark > 0.5))
    throw Error(Errc::BenchmarkDegenerate, "benchmark AUC " + std::to_string(auc_benchmark) + " is not above 0.5");
  return (auc_model - 0.5) / (auc_benchmark - 0.5) - 1.0;
}

std::vector<double> benchmark_scores(const LayerGraph& now) {
  std::vector<double> scores(static_cast<std::size_t>(pair_count(now.n)), 0.0);
  for (const auto& [u, v] : now.edges) scores[std::size_t(pair_index(u, v, now.n))] = 1.0;
  return scores;
}

ScoredPairs score_pairs(std::span<const double> scores, const LayerGraph& future) {
  if (static_cast<std::int64_t>(scores.size()) != pair_count(future.n))
    throw Error(Errc::ShapeError, "one score per pair required");
  ScoredPairs out;
  out.split = Split::FullGraph;
  out.rows.reserve(scores.size());
  std::size_t k = 0;
  for (int u = 0; u < future.n; ++u)
    for (int v = u + 1; v < future.n; ++v, ++k) out.rows.push_back({{u, v}, scores[k], false});
  for (const auto& [u, v] : future.edges) out.rows[std::size_t(pair_index(u, v, future.n))].label = true;
  return out;
}

SplitViews split(const ScoredPairs& full, const LayerGraph& now) {
  SplitViews views;
  views.full = full;
  views.full.split = Split::FullGraph;
  views.new_edges.split = Split::NewEdges;
  views.deletions.split = Split::Deletions;
  for (const auto& row : full.rows) {
    if (now.has_edge(row.pair.first, row.pair.second))
      views.deletions.rows.push_back({row.pair, -row.score, !row.label});
    else
      views.new_edges.rows.push_back(row);
  }
  return views;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  double sum = 0.0;
  for (double v : values)
    if (std::isfinite(v)) {
      sum += v;
      ++s.count;
    }
  if (s.count == 0) {
    s.mean = s.standard_error = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) {
    s.standard_error = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (double v : values)
    if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
  s.standard_error = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
  return s;
}

}  // namespace duplexnet
