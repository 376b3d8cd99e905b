#include "duplexnet/backtest.hpp"

#include "check_errc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace duplexnet;
using namespace duplexnet::testing;

namespace {

SynthSpec small_spec(std::uint64_t seed) {
  SynthSpec s;
  s.n = 20;
  s.n_windows = 40;
  s.burn_in = 20;
  s.seed = seed;
  return s;
}

DuplexTimeline small_timeline(std::uint64_t seed) { return make_timeline(generate_graph_dynamics(small_spec(seed))); }

BacktestConfig small_config() {
  BacktestConfig c;
  c.lags = {1, 3};
  c.train_windows = 5;
  return c;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same(const Summary& a, const Summary& b) {
  return same(a.mean, b.mean) && same(a.standard_error, b.standard_error) && a.count == b.count;
}

}  // namespace

TEST_CASE("training span never reaches past the prediction time") {
  for (auto policy : {WindowPolicy::Rolling, WindowPolicy::Expanding}) {
    BacktestConfig c;
    c.train_policy = policy;
    c.train_windows = 7;
    c.lags = {1, 4, 9};
    for (int lag : c.lags)
      for (int t = 15; t < 40; ++t) {
        auto span = training_span(c, t, lag);
        CHECK(span.last + lag == t);
        if (policy == WindowPolicy::Rolling) CHECK(span.last - span.first + 1 == 7);
        else CHECK(span.first == 15 - lag - 7 + 1);
      }
  }
}

TEST_CASE("expanding and rolling agree at the first step") {
  auto tl = small_timeline(3);
  auto rolling = small_config();
  auto expanding = rolling;
  expanding.train_policy = WindowPolicy::Expanding;
  for (int lag : rolling.lags) {
    const int t0 = rolling.train_windows + 3 - 1;
    auto a = run_cell(rolling, tl, t0, lag);
    auto b = run_cell(expanding, tl, t0, lag);
    CHECK(a.train.first == b.train.first);
    CHECK(a.full.coefficients == b.full.coefficients);
    CHECK(a.scores == b.scores);
    CHECK(same(a.lr.lambda, b.lr.lambda));
    auto c = run_cell(expanding, tl, t0 + 5, lag);
    CHECK(c.train.first == a.train.first);
    CHECK(c.train.last == a.train.last + 5);
  }
}

TEST_CASE("frozen graphs are perfectly predicted") {
  auto spec = small_spec(4);
  spec.persistence = 1.0;
  spec.closure_strength = 0.0;
  spec.social_noise = 0.0;
  auto tl = make_timeline(generate_graph_dynamics(spec));
  auto report = run(small_config(), tl);
  REQUIRE_FALSE(report.rows.empty());
  for (const auto& r : report.rows) {
    if (r.split != Split::FullGraph) continue;
    CHECK(r.auc == 1.0);
    CHECK(r.auc_benchmark == 1.0);
    CHECK(r.auc_star == 0.0);
  }
}

TEST_CASE("sweep layout, aggregates and csv round trip") {
  auto tl = small_timeline(5);
  auto config = small_config();
  auto report = run(config, tl);
  const int t0 = config.train_windows + 3 - 1;
  std::size_t expected_cells = 0;
  for (int lag : config.lags) expected_cells += std::size_t(tl.size() - lag - t0);
  CHECK(report.cells.size() == expected_cells);
  CHECK(report.rows.size() == 3 * expected_cells);
  CHECK(report.cells.front().lag == 1);
  CHECK(report.cells.front().t == t0);
  CHECK(report.cells.back().lag == 3);
  CHECK(report.cells.back().t + 3 == tl.size() - 1);

  for (const auto& cell : report.cells) {
    CHECK(cell.train.last + cell.lag <= cell.t);
    if (!cell.failed) {
      CHECK(cell.lr.lambda >= 0.0);
      CHECK(cell.full.data_fingerprint == cell.restricted.data_fingerprint);
    }
  }

  auto dir = scratch_dir("report");
  write_report_csv(report, dir / "report.csv");
  auto rows = read_report_csv(dir / "report.csv");
  REQUIRE(rows.size() == report.rows.size());
  auto again = aggregate(rows);
  REQUIRE(again.size() == report.aggregates.size());
  for (const auto& [key, a] : report.aggregates) {
    const auto& b = again.at(key);
    CHECK(same(a.auc, b.auc));
    CHECK(same(a.auc_benchmark, b.auc_benchmark));
    CHECK(same(a.auc_star, b.auc_star));
    CHECK(same(a.lambda, b.lambda));
    CHECK(same(a.significant_fraction, b.significant_fraction));
    CHECK(a.cells == b.cells);
    CHECK(a.failed == b.failed);
  }
  write_report_json(report, dir / "report.json");
  CHECK(read_text(dir / "report.json").find("\"lambda_threshold\"") != std::string::npos);
}

TEST_CASE("threads do not change results") {
  auto tl = small_timeline(6);
  auto config = small_config();
  auto one = run(config, tl);
  config.threads = 4;
  auto many = run(config, tl);
  REQUIRE(one.rows.size() == many.rows.size());
  for (std::size_t k = 0; k < one.rows.size(); ++k) {
    CHECK(same(one.rows[k].auc, many.rows[k].auc));
    CHECK(same(one.rows[k].lambda, many.rows[k].lambda));
  }
}

TEST_CASE("short test span gives an empty report") {
  auto tl = small_timeline(7);
  auto config = small_config();
  config.last_label_window = config.train_windows + 3 - 1;
  auto report = run(config, tl);
  CHECK(report.rows.empty());
  CHECK(report.aggregates.empty());
}

TEST_CASE("cells with no history fail without aborting") {
  auto tl = small_timeline(8);
  auto config = small_config();
  config.first_prediction = 2;
  auto report = run(config, tl);
  REQUIRE_FALSE(report.cells.empty());
  CHECK(report.cells.front().failed);
  CHECK(std::isnan(report.rows.front().lambda));
  CHECK_FALSE(report.cells.back().failed);
}

TEST_CASE("layer swap") {
  BacktestConfig c;
  CHECK(layer_swap(c).target == Layer::Social);
  CHECK(layer_swap(layer_swap(c)).target == Layer::Financial);
}

TEST_CASE("swapped run on statistically identical layers") {
  auto duplex = [](const std::vector<DuplexSnapshot>& fin, const std::vector<DuplexSnapshot>& soc) {
    std::vector<DuplexSnapshot> snaps;
    for (std::size_t t = 0; t < fin.size(); ++t) {
      LayerGraph social = soc[t].financial;
      social.layer = Layer::Social;
      snaps.push_back(make_duplex(fin[t].financial, social));
    }
    return make_timeline(snaps);
  };
  auto config = small_config();

  SUBCASE("mirrored layers give identical rows") {
    auto a = generate_graph_dynamics(small_spec(21)), b = generate_graph_dynamics(small_spec(22));
    auto fin = run(config, duplex(a, b));
    auto soc = run(layer_swap(config), duplex(b, a));
    CHECK(soc.target == Layer::Social);
    REQUIRE(fin.rows.size() == soc.rows.size());
    for (std::size_t k = 0; k < fin.rows.size(); ++k) {
      CHECK(same(fin.rows[k].auc, soc.rows[k].auc));
      CHECK(same(fin.rows[k].lambda, soc.rows[k].lambda));
    }
  }
  SUBCASE("per-lag AUC agrees across independent replicates") {
    // Windows within one run are serially correlated, so the comparison uses
    // one mean per independent replicate.
    for (int lag : config.lags) {
      std::vector<double> diff;
      for (std::uint64_t r = 0; r < 8; ++r) {
        auto tl = duplex(generate_graph_dynamics(small_spec(100 + 2 * r)), generate_graph_dynamics(small_spec(101 + 2 * r)));
        auto c = config;
        c.lags = {lag};
        const double x = run(c, tl).aggregates.at({lag, Split::FullGraph}).auc.mean;
        const double y = run(layer_swap(c), tl).aggregates.at({lag, Split::FullGraph}).auc.mean;
        diff.push_back(x - y);
      }
      const auto s = summarize(diff);
      CHECK(std::abs(s.mean) <= 2 * s.standard_error);
    }
  }
}

TEST_CASE("churn diagnostics") {
  SUBCASE("static sequence") {
    std::mt19937_64 rng(1);
    std::vector<LayerGraph> same_graph(8, random_graph(rng, 10, 0.3));
    auto t = churn_diagnostics(same_graph, 3);
    REQUIRE(t.new_edge_fraction.size() == 3);
    for (const auto& s : t.new_edge_fraction) {
      CHECK(s.mean == 0.0);
      CHECK(s.count == 8 - std::size_t(&s - t.new_edge_fraction.data()) - 1);
    }
    CHECK(t.jaccard.isOnes());
  }
  SUBCASE("jaccard matrix") {
    auto tl = small_timeline(9);
    std::vector<LayerGraph> graphs;
    for (const auto& s : tl.snapshots) graphs.push_back(s.financial);
    auto t = churn_diagnostics(graphs, 5);
    CHECK(t.jaccard.rows() == tl.size());
    CHECK(t.jaccard.diagonal().isOnes());
    CHECK(t.jaccard == t.jaccard.transpose());
    CHECK(t.jaccard(2, 7) == jaccard(graphs[2], graphs[7]));
    double sum = 0;
    for (std::size_t k = 0; k + 2 < graphs.size(); ++k) sum += new_edge_fraction(graphs[k], graphs[k + 2]);
    CHECK(t.new_edge_fraction[1].mean == doctest::Approx(sum / double(graphs.size() - 2)).epsilon(1e-14));
  }
  SUBCASE("too few graphs") {
    std::mt19937_64 rng(1);
    std::vector<LayerGraph> two(2, random_graph(rng, 5, 0.5));
    CHECK_ERRC(churn_diagnostics(two, 2), Errc::InsufficientHistory);
  }
}

TEST_CASE("timeline from panels") {
  SynthSpec s;
  s.mode = SynthMode::TimeSeries;
  s.n = 12;
  s.n_windows = 10;
  s.n_blocks = 3;
  s.window = {30, 5, WindowPolicy::Rolling};
  auto [returns, opinion] = generate_timeseries(s);
  NetworkOptions net;
  net.window = s.window;
  auto tl = build_timeline(returns, opinion, net);
  REQUIRE(tl.size() == 10);
  CHECK(tl.labels[0] == returns.dates[29]);
  CHECK(tl.snapshots[0].financial.size() == std::size_t(EdgeBudget::quartile().edges_for(12)));
  CHECK(tl.snapshots[3].financial.window == Window{15, 45});
  auto bad = opinion;
  bad.dates.back() = "2099-01-01";
  CHECK_ERRC(build_timeline(returns, bad, net), Errc::ShapeError);
}

TEST_CASE("model dumps") {
  auto tl = small_timeline(10);
  auto cell = run_cell(small_config(), tl, 10, 1);
  auto dir = scratch_dir("models");
  write_model_json(cell, dir);
  const auto text = read_text(dir / "model_full_h1_t10.json");
  for (const char* key : {"\"variant\"", "\"lag_h\"", "\"train_start\"", "\"train_end\"", "\"coefficients\"",
                          "\"loglik\"", "\"lambda\"", "\"converged\"", "\"e_any\""})
    CHECK(text.find(key) != std::string::npos);
  CHECK(std::filesystem::exists(dir / "model_restricted_h1_t10.json"));
}

TEST_CASE("churn is non-decreasing in h under stationary replacement") {
  SynthSpec s;
  s.n = 40;
  s.n_windows = 150;
  std::vector<LayerGraph> graphs;
  for (const auto& d : generate_graph_dynamics(s)) graphs.push_back(d.financial);
  const auto t = churn_diagnostics(graphs, 15);
  for (std::size_t k = 1; k < t.new_edge_fraction.size(); ++k) {
    const auto& a = t.new_edge_fraction[k - 1];
    const auto& b = t.new_edge_fraction[k];
    CHECK(b.mean >= a.mean - 2.0 * std::hypot(a.standard_error, b.standard_error));
  }
  CHECK(t.new_edge_fraction.back().mean > t.new_edge_fraction.front().mean);
}
