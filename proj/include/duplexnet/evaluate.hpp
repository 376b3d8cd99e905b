#pragma once

#include "duplexnet/netbuild.hpp"
#include "duplexnet/types.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace duplexnet {

enum class Split { FullGraph, NewEdges, Deletions };

std::string_view to_string(Split split);

struct ScoredPair {
  Pair pair;
  double score = 0.0;
  bool label = false;
};

struct ScoredPairs {
  std::vector<ScoredPair> rows;
  Split split = Split::FullGraph;

  std::size_t positives() const;
  std::size_t negatives() const { return rows.size() - positives(); }
};

/// Mann-Whitney AUC with half credit for tied scores.
double auc(const ScoredPairs& s);

/// (model - 0.5) / (benchmark - 0.5) - 1.
double auc_star(double auc_model, double auc_benchmark);

/// 1 for pairs that are edges now, 0 otherwise; lexicographic pair order.
std::vector<double> benchmark_scores(const LayerGraph& now);

/// All pairs of an n-vertex graph scored and labelled against `future`.
ScoredPairs score_pairs(std::span<const double> scores, const LayerGraph& future);

struct SplitViews {
  ScoredPairs full;
  ScoredPairs new_edges;  // pairs absent now; positive = appears
  ScoredPairs deletions;  // pairs present now; positive = disappears, score negated
};

SplitViews split(const ScoredPairs& full, const LayerGraph& now);

struct Summary {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error of the finite entries, in order.
Summary summarize(std::span<const double> values);

}  // namespace duplexnet
