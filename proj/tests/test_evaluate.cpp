#include "duplexnet/evaluate.hpp"

#include "check_errc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace duplexnet;
using namespace duplexnet::testing;

namespace {

ScoredPairs scored(const std::vector<double>& scores, const std::vector<bool>& labels) {
  ScoredPairs s;
  for (std::size_t i = 0; i < scores.size(); ++i) s.rows.push_back({{0, int(i) + 1}, scores[i], labels[i]});
  return s;
}

LayerGraph graph(int n, std::vector<Pair> edges) { return make_graph(Layer::Financial, {0, 1}, n, std::move(edges)); }

}  // namespace

TEST_CASE("auc fixed cases") {
  CHECK(auc(scored({0.9, 0.8, 0.2, 0.1}, {true, true, false, false})) == 1.0);
  CHECK(auc(scored({0.3, 0.3, 0.3, 0.3}, {true, false, true, false})) == 0.5);
  CHECK(auc(scored({0.9, 0.8, 0.7, 0.1}, {true, false, true, false})) == 0.75);
  CHECK_ERRC(auc(scored({0.1, 0.2}, {true, true})), Errc::UndefinedAUC);
  CHECK_ERRC(auc(scored({}, {})), Errc::UndefinedAUC);
}

TEST_CASE("auc matches brute-force pair comparison") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(2, 300);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = size(rng);
    const int levels = trial % 4 == 0 ? 2 : (trial % 4 == 1 ? 10 : 0);
    std::uniform_int_distribution<int> level(0, std::max(levels - 1, 0));
    std::normal_distribution<double> gauss;
    std::bernoulli_distribution coin(0.1 + 0.8 * (trial % 9) / 8.0);
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<bool> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      scores[std::size_t(i)] = levels ? level(rng) : gauss(rng);
      labels[std::size_t(i)] = coin(rng);
    }
    labels[0] = true;
    labels[1] = false;
    const double fast = auc(scored(scores, labels));
    CHECK(std::abs(fast - auc_brute(scores, labels)) < 1e-12);

    std::vector<double> mapped(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) mapped[i] = 2.0 * std::atan(scores[i]) + 5.0;
    CHECK(auc(scored(mapped, labels)) == fast);
    if (levels == 0) {
      std::vector<bool> flipped(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) flipped[i] = !labels[i];
      CHECK(std::abs(auc(scored(scores, flipped)) + fast - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("auc star") {
  CHECK(auc_star(0.8, 0.8) == 0.0);
  CHECK(auc_star(0.9, 0.7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(auc_star(0.97, 0.952) == doctest::Approx(0.04).epsilon(0.01));
  for (double x = 0.51; x < 1.0; x += 0.01) CHECK(auc_star(x, x) == 0.0);
  CHECK_ERRC(auc_star(0.9, 0.5), Errc::BenchmarkDegenerate);
  CHECK_ERRC(auc_star(0.9, 0.3), Errc::BenchmarkDegenerate);
}

TEST_CASE("time-invariance benchmark") {
  std::mt19937_64 rng(5);
  auto now = random_graph(rng, 12, 0.3);
  auto bench = benchmark_scores(now);
  REQUIRE(bench.size() == std::size_t(pair_count(12)));
  CHECK(auc(score_pairs(bench, now)) == 1.0);

  std::vector<Pair> absent;
  for (int u = 0; u < 12; ++u)
    for (int v = u + 1; v < 12; ++v)
      if (!now.has_edge(u, v)) absent.emplace_back(u, v);
  CHECK(auc(score_pairs(bench, graph(12, absent))) == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    auto future = random_graph(rng, 12, 0.3);
    auto s = score_pairs(bench, future);
    std::vector<double> scores;
    std::vector<bool> labels;
    for (const auto& r : s.rows) {
      scores.push_back(r.score);
      labels.push_back(r.label);
      CHECK(r.label == future.has_edge(r.pair.first, r.pair.second));
    }
    CHECK(std::abs(auc(s) - auc_brute(scores, labels)) < 1e-12);
  }
}

TEST_CASE("evaluation splits") {
  // 5 vertices = 10 pairs; 4 edges now, 2 added and 1 deleted later
  auto now = graph(5, {{0, 1}, {0, 2}, {1, 2}, {3, 4}});
  auto future = graph(5, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 4}});
  std::vector<double> scores(10);
  for (std::size_t k = 0; k < 10; ++k) scores[k] = 0.1 * double(k);
  auto views = split(score_pairs(scores, future), now);
  CHECK(views.full.rows.size() == 10);
  CHECK(views.new_edges.rows.size() == 6);
  CHECK(views.deletions.rows.size() == 4);
  CHECK(views.new_edges.positives() == 2);
  CHECK(views.deletions.positives() == 1);
  CHECK(views.new_edges.split == Split::NewEdges);
  for (const auto& r : views.deletions.rows) {
    CHECK(now.has_edge(r.pair.first, r.pair.second));
    CHECK(r.label == !future.has_edge(r.pair.first, r.pair.second));
    CHECK(r.score == -scores[std::size_t(pair_index(r.pair.first, r.pair.second, 5))]);
  }
  for (const auto& r : views.new_edges.rows) CHECK_FALSE(now.has_edge(r.pair.first, r.pair.second));

  SUBCASE("no churn leaves single-class splits") {
    auto still = split(score_pairs(scores, now), now);
    CHECK(still.new_edges.positives() == 0);
    CHECK(still.deletions.positives() == 0);
    CHECK_ERRC(auc(still.new_edges), Errc::UndefinedAUC);
    CHECK_ERRC(auc(still.deletions), Errc::UndefinedAUC);
  }
}

TEST_CASE("summaries") {
  const std::vector<double> v{1, 2, 3, 4, NAN};
  auto s = summarize(v);
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const std::vector<double> one{7};
  CHECK(std::isnan(summarize(one).standard_error));
  CHECK(to_string(Split::NewEdges) == "new_edges");
}
